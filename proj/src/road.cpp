#include "rnk/road.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "rnk/binary_io.h"
#include "rnk/partition.h"
#include "rnk/search.h"

namespace rnk {

namespace {

constexpr char kRoadMagic[8] = {'R', 'N', 'K', 'R', 'O', 'A', 'D', '\0'};
constexpr std::uint32_t kRoadVersion = 1;

using LocalAdj = std::vector<std::vector<std::pair<std::uint32_t, Distance>>>;

void local_dijkstra(const LocalAdj& adj, std::uint32_t s, std::vector<Distance>& dist,
                    std::vector<std::uint8_t>& done, MinQueue& queue) {
    dist.assign(adj.size(), kInfDistance);
    done.assign(adj.size(), 0);
    queue.clear();
    dist[s] = 0;
    queue.push(0, s);
    while (!queue.empty()) {
        const auto [d, id] = queue.pop_min();
        const auto v = static_cast<std::uint32_t>(id);
        if (done[v]) continue;
        done[v] = 1;
        for (const auto& [u, w] : adj[v]) {
            const Distance nd = d + w;
            if (nd < dist[u]) {
                dist[u] = nd;
                queue.push(nd, u);
            }
        }
    }
}

std::uint32_t local_index(const std::vector<Vertex>& sorted, Vertex v) {
    return static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

}  // namespace

RoadIndex::RoadIndex(const Graph& g, std::uint32_t fanout, std::uint32_t levels, bool bottom_up)
    : graph_(&g), fanout_(fanout), levels_(levels) {
    if (fanout < 2) throw FormatError("Rnet fanout must be at least 2");
    if (levels < 1) throw FormatError("Rnet hierarchy needs at least 1 level");
    const std::size_t n = g.vertex_count();

    // recursive vertex partitioning fixes per-level region ownership; Rnet
    // ids follow creation order, so ids grow with level
    std::vector<std::vector<Vertex>> anc(levels_ + 1, std::vector<Vertex>(n, 0));
    rnets_.emplace_back();
    std::vector<std::vector<Vertex>> pending(1);
    pending[0].resize(n);
    for (Vertex v = 0; v < n; ++v) pending[0][v] = v;
    for (std::uint32_t ri = 0; ri < rnets_.size(); ++ri) {
        std::vector<Vertex> verts = std::move(pending[ri]);
        const std::uint32_t level = rnets_[ri].level;
        if (level == levels_) continue;
        if (verts.size() < fanout_)
            throw FormatError("Rnet hierarchy level " + std::to_string(level + 1) +
                              " is infeasible: a region of " + std::to_string(verts.size()) +
                              " vertices cannot split into " + std::to_string(fanout_) + " Rnets");
        const auto part = partition_vertices(g, verts, fanout_);
        std::vector<std::vector<Vertex>> groups(fanout_);
        for (std::size_t i = 0; i < verts.size(); ++i) groups[part[i]].push_back(verts[i]);
        for (auto& group : groups) {
            const auto child = static_cast<std::uint32_t>(rnets_.size());
            rnets_.emplace_back();
            rnets_[child].parent = static_cast<std::int32_t>(ri);
            rnets_[child].level = level + 1;
            rnets_[ri].children.push_back(child);
            for (Vertex v : group) anc[level + 1][v] = child;
            pending.resize(rnets_.size());
            pending[child] = std::move(group);
        }
    }

    // V_R: owned vertices plus guests pulled in by duplicated cut edges
    for (Vertex v = 0; v < n; ++v)
        for (std::uint32_t i = 0; i <= levels_; ++i) rnets_[anc[i][v]].vertices.push_back(v);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex w : g.neighbors(u)) {
            if (w <= u) continue;
            for (std::uint32_t i = 1; i <= levels_; ++i) {
                const std::uint32_t au = anc[i][u], aw = anc[i][w];
                if (au != aw) {
                    rnets_[au].vertices.push_back(w);
                    rnets_[aw].vertices.push_back(u);
                }
            }
        }
    for (auto& r : rnets_) {
        std::sort(r.vertices.begin(), r.vertices.end());
        r.vertices.erase(std::unique(r.vertices.begin(), r.vertices.end()), r.vertices.end());
    }

    // borders: members with an adjacent edge whose endpoints both fall
    // outside the region (guests only; an owned vertex keeps all its edges)
    for (std::uint32_t ri = 1; ri < rnets_.size(); ++ri) {
        Rnet& r = rnets_[ri];
        for (Vertex v : r.vertices) {
            if (anc[r.level][v] == ri) continue;
            for (Vertex x : g.neighbors(v))
                if (anc[r.level][x] != ri) {
                    r.borders.push_back(v);
                    break;
                }
        }
    }

    std::uint64_t total = 0;
    for (auto& r : rnets_) {
        r.sc_offset = total;
        total += static_cast<std::uint64_t>(r.borders.size()) * r.borders.size();
    }
    shortcut_weights_.assign(total, kInfDistance);

    std::vector<Distance> dist;
    std::vector<std::uint8_t> done;
    MinQueue queue;
    LocalAdj adj;

    const auto rnet_adjacency = [&](std::uint32_t ri, LocalAdj& out) {
        const Rnet& r = rnets_[ri];
        out.assign(r.vertices.size(), {});
        for (std::uint32_t lv = 0; lv < r.vertices.size(); ++lv) {
            const Vertex v = r.vertices[lv];
            const auto nbrs = g.neighbors(v);
            const auto ws = g.weights(v);
            for (std::size_t e = 0; e < nbrs.size(); ++e)
                if (anc[r.level][v] == ri || anc[r.level][nbrs[e]] == ri)
                    out[lv].push_back({local_index(r.vertices, nbrs[e]), ws[e]});
        }
    };

    // within-Rnet shortest distances between every border pair
    const auto fill_direct = [&](std::uint32_t ri) {
        const Rnet& r = rnets_[ri];
        if (r.borders.empty()) return;
        rnet_adjacency(ri, adj);
        const std::size_t b = r.borders.size();
        for (std::size_t row = 0; row < b; ++row) {
            local_dijkstra(adj, local_index(r.vertices, r.borders[row]), dist, done, queue);
            for (std::size_t col = 0; col < b; ++col)
                shortcut_weights_[r.sc_offset + row * b + col] = dist[local_index(r.vertices, r.borders[col])];
        }
    };

    // same distances over the reduced graph of child borders: child shortcuts
    // provide the border-to-border legs, and for a sibling's border that sits
    // inside a child without being its border, a within-child search supplies
    // the missing legs from that entry vertex
    std::vector<Distance> cdist;
    std::vector<std::uint8_t> cdone;
    LocalAdj cadj;
    const auto fill_reduced = [&](std::uint32_t ri) {
        const Rnet& r = rnets_[ri];
        if (r.borders.empty()) return;
        std::vector<Vertex> nodes;
        for (std::uint32_t c : r.children)
            nodes.insert(nodes.end(), rnets_[c].borders.begin(), rnets_[c].borders.end());
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        adj.assign(nodes.size(), {});
        for (std::uint32_t c : r.children) {
            const Rnet& cr = rnets_[c];
            const std::size_t cb = cr.borders.size();
            for (std::size_t i = 0; i < cb; ++i)
                for (std::size_t j = 0; j < cb; ++j) {
                    if (i == j) continue;
                    const Distance w = shortcut_weights_[cr.sc_offset + i * cb + j];
                    if (w == kInfDistance) continue;
                    adj[local_index(nodes, cr.borders[i])].push_back({local_index(nodes, cr.borders[j]), w});
                }
            std::vector<Vertex> terminals, entries;
            for (Vertex x : cr.vertices)
                if (std::binary_search(nodes.begin(), nodes.end(), x)) {
                    terminals.push_back(x);
                    if (!std::binary_search(cr.borders.begin(), cr.borders.end(), x)) entries.push_back(x);
                }
            if (entries.empty()) continue;
            rnet_adjacency(c, cadj);
            for (Vertex x : entries) {
                local_dijkstra(cadj, local_index(cr.vertices, x), cdist, cdone, queue);
                for (Vertex t : terminals) {
                    if (t == x) continue;
                    const Distance w = cdist[local_index(cr.vertices, t)];
                    if (w == kInfDistance) continue;
                    adj[local_index(nodes, x)].push_back({local_index(nodes, t), w});
                    adj[local_index(nodes, t)].push_back({local_index(nodes, x), w});
                }
            }
        }
        const std::size_t b = r.borders.size();
        for (std::size_t row = 0; row < b; ++row) {
            local_dijkstra(adj, local_index(nodes, r.borders[row]), dist, done, queue);
            for (std::size_t col = 0; col < b; ++col)
                shortcut_weights_[r.sc_offset + row * b + col] = dist[local_index(nodes, r.borders[col])];
        }
    };

    if (bottom_up) {
        for (std::uint32_t ri = 0; ri < rnets_.size(); ++ri)
            if (rnets_[ri].level == levels_) fill_direct(ri);
        // child blocks are always ready: ids grow with level
        for (std::uint32_t ri = static_cast<std::uint32_t>(rnets_.size()); ri-- > 1;)
            if (rnets_[ri].level < levels_) fill_reduced(ri);
    } else {
        for (std::uint32_t ri = 1; ri < rnets_.size(); ++ri) fill_direct(ri);
    }

    // Route Overlay: one shortcut tree per vertex, children contiguous,
    // leaves carrying the vertex's edges of that leaf Rnet
    std::vector<std::vector<std::uint32_t>> membership(n);
    for (std::uint32_t ri = 1; ri < rnets_.size(); ++ri)
        for (Vertex v : rnets_[ri].vertices) membership[v].push_back(ri);
    tree_first_.assign(n, 0);
    tree_count_.assign(n, 0);
    for (Vertex v = 0; v < n; ++v) {
        const auto& mem = membership[v];
        const auto start = static_cast<std::uint32_t>(tree_nodes_.size());
        tree_first_[v] = start;
        const auto emit = [&](std::uint32_t ri) {
            TreeNode tn;
            tn.rnet = ri;
            const auto& bs = rnets_[ri].borders;
            const auto it = std::lower_bound(bs.begin(), bs.end(), v);
            if (it != bs.end() && *it == v) tn.border_row = static_cast<std::int32_t>(it - bs.begin());
            if (rnets_[ri].level == levels_) {
                tn.edge_offset = static_cast<std::uint32_t>(edge_targets_.size());
                const auto nbrs = g.neighbors(v);
                const auto ws = g.weights(v);
                for (std::size_t e = 0; e < nbrs.size(); ++e)
                    if (anc[levels_][v] == ri || anc[levels_][nbrs[e]] == ri) {
                        edge_targets_.push_back(nbrs[e]);
                        edge_weights_.push_back(ws[e]);
                    }
                tn.edge_count = static_cast<std::uint32_t>(edge_targets_.size()) - tn.edge_offset;
            }
            tree_nodes_.push_back(tn);
        };
        for (std::uint32_t ri : mem)
            if (rnets_[ri].level == 1) emit(ri);
        tree_count_[v] = static_cast<std::uint32_t>(tree_nodes_.size()) - start;
        for (std::uint32_t at = start; at < tree_nodes_.size(); ++at) {
            const std::uint32_t ri = tree_nodes_[at].rnet;
            if (rnets_[ri].level == levels_) continue;
            tree_nodes_[at].first_child = static_cast<std::uint32_t>(tree_nodes_.size());
            for (std::uint32_t m : mem)
                if (rnets_[m].parent == static_cast<std::int32_t>(ri)) emit(m);
            tree_nodes_[at].child_count =
                static_cast<std::uint32_t>(tree_nodes_.size()) - tree_nodes_[at].first_child;
        }
    }
}

std::size_t RoadIndex::byte_size() const {
    std::size_t total = shortcut_weights_.size() * sizeof(Distance) +
                        tree_nodes_.size() * sizeof(TreeNode) +
                        (tree_first_.size() + tree_count_.size()) * sizeof(std::uint32_t) +
                        edge_targets_.size() * sizeof(Vertex) + edge_weights_.size() * sizeof(Weight);
    for (const auto& r : rnets_)
        total += sizeof(Rnet) + r.children.size() * sizeof(std::uint32_t) +
                 (r.vertices.size() + r.borders.size()) * sizeof(Vertex);
    return total;
}

void RoadIndex::save(std::ostream& out) const {
    io::write_magic(out, kRoadMagic, kRoadVersion);
    io::write_scalar<std::uint32_t>(out, fanout_);
    io::write_scalar<std::uint32_t>(out, levels_);
    io::write_scalar<std::uint64_t>(out, graph_->vertex_count());
    io::write_scalar<std::uint64_t>(out, rnets_.size());
    for (const auto& r : rnets_) {
        io::write_scalar<std::int32_t>(out, r.parent);
        io::write_scalar<std::uint32_t>(out, r.level);
        io::write_scalar<std::uint64_t>(out, r.sc_offset);
        io::write_vector(out, r.children);
        io::write_vector(out, r.vertices);
        io::write_vector(out, r.borders);
    }
    io::write_vector(out, shortcut_weights_);
    io::write_vector(out, tree_nodes_);
    io::write_vector(out, tree_first_);
    io::write_vector(out, tree_count_);
    io::write_vector(out, edge_targets_);
    io::write_vector(out, edge_weights_);
}

RoadIndex RoadIndex::load(std::istream& in, const Graph& g) {
    io::check_magic(in, kRoadMagic, kRoadVersion);
    RoadIndex idx(g);
    idx.fanout_ = io::read_scalar<std::uint32_t>(in);
    idx.levels_ = io::read_scalar<std::uint32_t>(in);
    if (io::read_scalar<std::uint64_t>(in) != g.vertex_count())
        throw FormatError("Rnet cache was built for a different graph");
    const auto count = io::read_scalar<std::uint64_t>(in);
    idx.rnets_.resize(count);
    for (auto& r : idx.rnets_) {
        r.parent = io::read_scalar<std::int32_t>(in);
        r.level = io::read_scalar<std::uint32_t>(in);
        r.sc_offset = io::read_scalar<std::uint64_t>(in);
        io::read_vector(in, r.children);
        io::read_vector(in, r.vertices);
        io::read_vector(in, r.borders);
    }
    io::read_vector(in, idx.shortcut_weights_);
    io::read_vector(in, idx.tree_nodes_);
    io::read_vector(in, idx.tree_first_);
    io::read_vector(in, idx.tree_count_);
    io::read_vector(in, idx.edge_targets_);
    io::read_vector(in, idx.edge_weights_);
    return idx;
}

AssociationDirectory build_association_directory(const RoadIndex& idx, const ObjectSet& objects) {
    AssociationDirectory ad;
    ad.vertex_is_object.assign(idx.graph().vertex_count(), 0);
    for (Vertex v : objects.ids) ad.vertex_is_object[v] = 1;
    ad.object_count = objects.size();
    const auto& rnets = idx.rnets();
    ad.rnet_has_object.assign(rnets.size(), 0);
    // leaf bits by member scan, then one bottom-up OR pass (ids grow with
    // level, and a guest of a region is a guest of one of its children)
    for (std::uint32_t ri = static_cast<std::uint32_t>(rnets.size()); ri-- > 0;) {
        if (rnets[ri].children.empty()) {
            for (Vertex v : rnets[ri].vertices)
                if (ad.vertex_is_object[v]) {
                    ad.rnet_has_object[ri] = 1;
                    break;
                }
        } else {
            for (std::uint32_t c : rnets[ri].children)
                if (ad.rnet_has_object[c]) {
                    ad.rnet_has_object[ri] = 1;
                    break;
                }
        }
    }
    return ad;
}

KnnResult knn_road(Vertex q, std::size_t k, const RoadIndex& idx, const AssociationDirectory& ad,
                   RoadStats* stats, bool visited_pruning) {
    const Graph& g = idx.graph();
    const auto& rnets = idx.rnets();
    if (stats) stats->settled_order.clear();
    CandidateHeap heap(std::min(k, ad.object_count));
    std::vector<std::uint8_t> visited(g.vertex_count(), 0);
    MinQueue queue;
    queue.push(0, q);
    std::size_t inserts = 1, settled = 0, bypassed = 0;
    std::vector<const RoadIndex::TreeNode*> stack;
    while (!queue.empty()) {
        const auto [d, id] = queue.pop_min();
        if (heap.full() && d > heap.d_k()) break;
        const Vertex v = static_cast<Vertex>(id);
        if (visited[v]) continue;
        visited[v] = 1;
        ++settled;
        if (stats) stats->settled_order.push_back(v);
        if (ad.vertex_is_object[v]) heap.offer({v, d});
        stack.clear();
        for (const auto& tn : idx.tree_roots(v)) stack.push_back(&tn);
        while (!stack.empty()) {
            const RoadIndex::TreeNode& tn = *stack.back();
            stack.pop_back();
            const auto& r = rnets[tn.rnet];
            if (!ad.rnet_has_object[tn.rnet] && tn.border_row >= 0) {
                // object-free region: jump straight to its other borders
                const std::size_t b = r.borders.size();
                const Distance* row =
                    idx.shortcut_weights().data() + r.sc_offset + static_cast<std::size_t>(tn.border_row) * b;
                for (std::size_t j = 0; j < b; ++j) {
                    if (row[j] == kInfDistance || j == static_cast<std::size_t>(tn.border_row)) continue;
                    if (visited_pruning && visited[r.borders[j]]) continue;
                    queue.push(d + row[j], r.borders[j]);
                    ++inserts;
                }
                bypassed += r.vertices.size() - b;
            } else if (r.level == idx.levels()) {
                const auto targets = idx.leaf_edge_targets(tn);
                const auto weights = idx.leaf_edge_weights(tn);
                for (std::size_t e = 0; e < targets.size(); ++e) {
                    if (visited[targets[e]]) continue;
                    queue.push(d + weights[e], targets[e]);
                    ++inserts;
                }
            } else {
                for (const auto& child : idx.tree_children(tn)) stack.push_back(&child);
            }
        }
    }
    if (stats) {
        stats->settled = settled;
        stats->queue_inserts = inserts;
        stats->vertices_bypassed = bypassed;
    }
    return heap.finalize();
}

}  // namespace rnk

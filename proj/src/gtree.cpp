#include "rnk/gtree.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "rnk/binary_io.h"
#include "rnk/partition.h"
#include "rnk/search.h"

namespace rnk {

namespace {

constexpr char kGtreeMagic[8] = {'R', 'N', 'K', 'G', 'T', 'R', 'E', '\0'};
constexpr std::uint32_t kGtreeVersion = 1;
constexpr std::uint64_t kNodeBit = std::uint64_t{1} << 63;

}  // namespace

GTreeIndex::GTreeIndex(const Graph& g, std::uint32_t fanout, std::uint32_t tau)
    : graph_(&g), fanout_(fanout), tau_(tau) {
    if (fanout < 2) throw FormatError("G-tree fanout must be at least 2");
    if (tau < 1) throw FormatError("G-tree leaf capacity must be at least 1");
    const std::size_t n = g.vertex_count();
    leaf_of_.assign(n, 0);
    leaf_row_.assign(n, 0);

    // top-down recursive partitioning; worklist index order fixes node ids
    std::vector<std::vector<Vertex>> pending(1);
    pending[0].resize(n);
    for (Vertex v = 0; v < n; ++v) pending[0][v] = v;
    nodes_.emplace_back();
    std::vector<char> member(n, 0);
    for (std::uint32_t ni = 0; ni < nodes_.size(); ++ni) {
        std::vector<Vertex> verts = std::move(pending[ni]);
        for (Vertex v : verts) member[v] = 1;
        for (Vertex v : verts)
            for (Vertex u : g.neighbors(v))
                if (!member[u]) {
                    nodes_[ni].borders.push_back(v);
                    break;
                }
        if (verts.size() <= tau_) {
            nodes_[ni].leaf_vertices = verts;
            for (std::uint32_t row = 0; row < verts.size(); ++row) {
                leaf_of_[verts[row]] = ni;
                leaf_row_[verts[row]] = row;
            }
        } else {
            const auto part = partition_vertices(g, verts, fanout_);
            std::vector<std::vector<Vertex>> groups(fanout_);
            for (std::size_t i = 0; i < verts.size(); ++i) groups[part[i]].push_back(verts[i]);
            for (auto& group : groups) {
                if (group.empty()) continue;
                const std::uint32_t child = static_cast<std::uint32_t>(nodes_.size());
                nodes_.emplace_back();
                nodes_[child].parent = static_cast<std::int32_t>(ni);
                nodes_[ni].children.push_back(child);
                pending.resize(nodes_.size());
                pending[child] = std::move(group);
            }
        }
        for (Vertex v : verts) member[v] = 0;
    }

    // union border layout and own-border offsets
    for (auto& node : nodes_) {
        if (node.is_leaf()) continue;
        std::unordered_map<Vertex, std::uint32_t> pos;
        for (std::uint32_t child : node.children) {
            node.child_border_start.push_back(static_cast<std::uint32_t>(node.union_borders.size()));
            for (Vertex b : nodes_[child].borders) {
                pos.emplace(b, static_cast<std::uint32_t>(node.union_borders.size()));
                node.union_borders.push_back(b);
            }
        }
        for (Vertex b : node.borders) {
            const auto it = pos.find(b);
            if (it == pos.end()) throw FormatError("G-tree border not inherited from any child");
            node.own_border_offsets.push_back(it->second);
        }
    }

    // one full-graph SSSP per distinct border vertex fills every matrix row
    // and leaf matrix column that mentions it
    struct Fill {
        std::uint32_t node;
        std::uint32_t index;  // union row (non-leaf) or border column (leaf)
    };
    std::unordered_map<Vertex, std::vector<Fill>> fills;
    for (std::uint32_t ni = 0; ni < nodes_.size(); ++ni) {
        Node& node = nodes_[ni];
        if (node.is_leaf()) {
            node.matrix.assign(node.leaf_vertices.size() * node.borders.size(), kInfDistance);
            for (std::uint32_t j = 0; j < node.borders.size(); ++j)
                fills[node.borders[j]].push_back({ni, j});
        } else {
            node.matrix.assign(node.union_borders.size() * node.union_borders.size(), kInfDistance);
            for (std::uint32_t row = 0; row < node.union_borders.size(); ++row)
                fills[node.union_borders[row]].push_back({ni, row});
        }
    }
    std::vector<Vertex> distinct;
    distinct.reserve(fills.size());
    for (const auto& [b, list] : fills) distinct.push_back(b);
    std::sort(distinct.begin(), distinct.end());
    DijkstraScratch scratch;
    std::vector<Distance> dist;
    for (Vertex b : distinct) {
        dijkstra_sssp(b, g, scratch, dist);
        for (const Fill& f : fills[b]) {
            Node& node = nodes_[f.node];
            if (node.is_leaf()) {
                const std::size_t cols = node.borders.size();
                for (std::uint32_t row = 0; row < node.leaf_vertices.size(); ++row)
                    node.matrix[static_cast<std::size_t>(row) * cols + f.index] =
                        dist[node.leaf_vertices[row]];
            } else {
                const std::size_t cols = node.union_borders.size();
                Distance* out = node.matrix.data() + static_cast<std::size_t>(f.index) * cols;
                for (std::uint32_t col = 0; col < cols; ++col) out[col] = dist[node.union_borders[col]];
            }
        }
    }
}

std::size_t GTreeIndex::byte_size() const {
    std::size_t bytes = leaf_of_.size() * sizeof(std::uint32_t) * 2;
    for (const Node& n : nodes_) {
        bytes += sizeof(Node);
        bytes += n.children.size() * sizeof(std::uint32_t);
        bytes += (n.borders.size() + n.leaf_vertices.size() + n.union_borders.size()) * sizeof(Vertex);
        bytes += (n.child_border_start.size() + n.own_border_offsets.size()) * sizeof(std::uint32_t);
        bytes += n.matrix.size() * sizeof(Distance);
    }
    return bytes;
}

void GTreeIndex::save(std::ostream& out) const {
    io::write_magic(out, kGtreeMagic, kGtreeVersion);
    io::write_scalar<std::uint32_t>(out, fanout_);
    io::write_scalar<std::uint32_t>(out, tau_);
    io::write_scalar<std::uint64_t>(out, nodes_.size());
    for (const Node& n : nodes_) {
        io::write_scalar<std::int32_t>(out, n.parent);
        io::write_vector(out, n.children);
        io::write_vector(out, n.borders);
        io::write_vector(out, n.leaf_vertices);
        io::write_vector(out, n.union_borders);
        io::write_vector(out, n.child_border_start);
        io::write_vector(out, n.own_border_offsets);
        io::write_vector(out, n.matrix);
    }
    io::write_vector(out, leaf_of_);
    io::write_vector(out, leaf_row_);
}

GTreeIndex GTreeIndex::load(std::istream& in, const Graph& g) {
    io::check_magic(in, kGtreeMagic, kGtreeVersion);
    GTreeIndex idx(g);
    idx.fanout_ = io::read_scalar<std::uint32_t>(in);
    idx.tau_ = io::read_scalar<std::uint32_t>(in);
    const auto count = io::read_scalar<std::uint64_t>(in);
    idx.nodes_.resize(count);
    for (Node& n : idx.nodes_) {
        n.parent = io::read_scalar<std::int32_t>(in);
        io::read_vector(in, n.children);
        io::read_vector(in, n.borders);
        io::read_vector(in, n.leaf_vertices);
        io::read_vector(in, n.union_borders);
        io::read_vector(in, n.child_border_start);
        io::read_vector(in, n.own_border_offsets);
        io::read_vector(in, n.matrix);
    }
    io::read_vector(in, idx.leaf_of_);
    io::read_vector(in, idx.leaf_row_);
    if (idx.leaf_of_.size() != g.vertex_count()) throw FormatError("G-tree cache does not match graph");
    return idx;
}

GTreeAssembly::GTreeAssembly(const GTreeIndex& idx) : idx_(&idx) {
    to_union_.resize(idx.nodes().size());
    to_borders_.resize(idx.nodes().size());
    have_union_.assign(idx.nodes().size(), 0);
    have_borders_.assign(idx.nodes().size(), 0);
}

void GTreeAssembly::reset_source(Vertex s) {
    for (std::uint32_t n : touched_) {
        have_union_[n] = 0;
        have_borders_[n] = 0;
    }
    touched_.clear();
    source_ = s;
    sweeps_ = 0;
    path_cost_ = 0;
    leaf_local_.clear();
    have_leaf_local_ = false;

    in_path_.assign(idx_->nodes().size(), 0);
    path_.clear();
    std::int32_t n = static_cast<std::int32_t>(idx_->leaf_of(s));
    while (n >= 0) {
        path_.push_back(static_cast<std::uint32_t>(n));
        in_path_[n] = 1;
        n = idx_->nodes()[n].parent;
    }
}

bool GTreeAssembly::contains_source(std::uint32_t node) const {
    return in_path_[node] != 0;
}

std::span<const Distance> GTreeAssembly::node_border_distances(std::uint32_t node) {
    if (have_borders_[node]) return to_borders_[node];
    const auto& nodes = idx_->nodes();
    const GTreeIndex::Node& n = nodes[node];
    std::vector<Distance>& out = to_borders_[node];
    if (node == idx_->leaf_of(source_)) {
        // own leaf: the source's leaf matrix row
        out.resize(n.borders.size());
        const std::uint32_t row = idx_->leaf_row(source_);
        for (std::uint32_t j = 0; j < n.borders.size(); ++j)
            out[j] = idx_->leaf_matrix_entry(node, row, j);
    } else if (in_path_[node]) {
        // ancestor of the source: project own borders out of the union row
        const auto u = union_row(node);
        out.resize(n.borders.size());
        for (std::uint32_t j = 0; j < n.borders.size(); ++j) out[j] = u[n.own_border_offsets[j]];
    } else {
        // any other node: its borders are a contiguous run in the parent's
        // union row
        const std::uint32_t parent = static_cast<std::uint32_t>(n.parent);
        const auto u = union_row(parent);
        const GTreeIndex::Node& p = nodes[parent];
        std::uint32_t child_idx = 0;
        while (p.children[child_idx] != node) ++child_idx;
        const std::uint32_t start = p.child_border_start[child_idx];
        out.assign(u.begin() + start, u.begin() + start + n.borders.size());
    }
    have_borders_[node] = 1;
    touched_.push_back(node);
    return out;
}

std::span<const Distance> GTreeAssembly::union_row(std::uint32_t node) {
    if (have_union_[node]) return to_union_[node];
    const GTreeIndex::Node& n = idx_->nodes()[node];
    std::vector<Distance>& out = to_union_[node];
    out.assign(n.union_borders.size(), kInfDistance);

    // min-plus over a known source-to-border vector; for nodes on the source
    // path that vector belongs to the path child, otherwise to the node's own
    // borders, both of which separate the source from the union borders
    std::span<const Distance> base;
    const std::uint32_t* base_rows = nullptr;
    std::uint32_t base_count = 0;
    std::vector<std::uint32_t> rows_storage;
    if (in_path_[node]) {
        std::size_t pi = 0;
        while (path_[pi] != node) ++pi;
        const std::uint32_t child = path_[pi - 1];
        base = node_border_distances(child);
        std::uint32_t child_idx = 0;
        while (n.children[child_idx] != child) ++child_idx;
        rows_storage.resize(base.size());
        for (std::uint32_t i = 0; i < base.size(); ++i)
            rows_storage[i] = n.child_border_start[child_idx] + i;
        base_rows = rows_storage.data();
        base_count = static_cast<std::uint32_t>(base.size());
    } else {
        base = node_border_distances(node);
        base_rows = n.own_border_offsets.data();
        base_count = static_cast<std::uint32_t>(base.size());
    }
    const std::size_t cols = n.union_borders.size();
    for (std::uint32_t i = 0; i < base_count; ++i) {
        const Distance bd = base[i];
        const Distance* row = n.matrix.data() + static_cast<std::size_t>(base_rows[i]) * cols;
        for (std::size_t x = 0; x < cols; ++x) {
            const Distance cand = bd + row[x];
            if (cand < out[x]) out[x] = cand;
        }
    }
    path_cost_ += static_cast<std::size_t>(base_count) * cols;
    ++sweeps_;
    have_union_[node] = 1;
    touched_.push_back(node);
    return out;
}

const std::vector<Distance>& GTreeAssembly::leaf_local_distances() {
    if (have_leaf_local_) return leaf_local_;
    const std::uint32_t leaf = idx_->leaf_of(source_);
    const GTreeIndex::Node& n = idx_->nodes()[leaf];
    const Graph& g = idx_->graph();
    leaf_local_.assign(n.leaf_vertices.size(), kInfDistance);
    // Dijkstra restricted to the leaf subgraph, in leaf-row index space
    MinQueue& q = leaf_scratch_.queue;
    q.clear();
    std::vector<char> done(n.leaf_vertices.size(), 0);
    leaf_local_[idx_->leaf_row(source_)] = 0;
    q.push(0, idx_->leaf_row(source_));
    while (!q.empty()) {
        const auto [d, id] = q.pop_min();
        const std::uint32_t row = static_cast<std::uint32_t>(id);
        if (done[row]) continue;
        done[row] = 1;
        const Vertex v = n.leaf_vertices[row];
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (idx_->leaf_of(nbrs[i]) != leaf) continue;
            const std::uint32_t urow = idx_->leaf_row(nbrs[i]);
            const Distance nd = d + ws[i];
            if (nd < leaf_local_[urow]) {
                leaf_local_[urow] = nd;
                q.push(nd, urow);
            }
        }
    }
    have_leaf_local_ = true;
    return leaf_local_;
}

Distance GTreeAssembly::distance_to(Vertex t) {
    if (t == source_) return 0;
    const std::uint32_t leaf_s = idx_->leaf_of(source_);
    const std::uint32_t leaf_t = idx_->leaf_of(t);
    const GTreeIndex::Node& lt = idx_->nodes()[leaf_t];
    const std::uint32_t row_t = idx_->leaf_row(t);
    if (leaf_t == leaf_s) {
        // inside the shared leaf or out through one of its borders and back
        Distance best = leaf_local_distances()[row_t];
        const std::uint32_t row_s = idx_->leaf_row(source_);
        for (std::uint32_t j = 0; j < lt.borders.size(); ++j) {
            const Distance cand =
                idx_->leaf_matrix_entry(leaf_t, row_s, j) + idx_->leaf_matrix_entry(leaf_t, row_t, j);
            if (cand < best) best = cand;
        }
        path_cost_ += lt.borders.size();
        return best;
    }
    const auto bd = node_border_distances(leaf_t);
    Distance best = kInfDistance;
    for (std::uint32_t j = 0; j < bd.size(); ++j) {
        const Distance cand = bd[j] + idx_->leaf_matrix_entry(leaf_t, row_t, j);
        if (cand < best) best = cand;
    }
    path_cost_ += bd.size();
    return best;
}

Distance GTreeAssembly::distance_to_node(std::uint32_t node) {
    const auto bd = node_border_distances(node);
    Distance best = kInfDistance;
    for (Distance d : bd) best = std::min(best, d);
    return best;
}

OccurrenceList build_occurrence_list(const GTreeIndex& idx, const ObjectSet& objects) {
    const auto& nodes = idx.nodes();
    OccurrenceList ol;
    ol.occupied_children.resize(nodes.size());
    ol.leaf_objects.resize(nodes.size());
    ol.occupied.assign(nodes.size(), 0);
    ol.total_objects = objects.size();
    for (Vertex o : objects.ids) ol.leaf_objects[idx.leaf_of(o)].push_back(o);
    // leaves first in id order is not guaranteed, so propagate bottom-up by
    // walking parents from each occupied leaf
    for (std::uint32_t ni = 0; ni < nodes.size(); ++ni) {
        if (!nodes[ni].is_leaf() || ol.leaf_objects[ni].empty()) continue;
        std::uint32_t cur = ni;
        ol.occupied[cur] = 1;
        while (nodes[cur].parent >= 0) {
            const std::uint32_t parent = static_cast<std::uint32_t>(nodes[cur].parent);
            auto& list = ol.occupied_children[parent];
            if (std::find(list.begin(), list.end(), cur) == list.end()) list.push_back(cur);
            if (ol.occupied[parent]) break;
            ol.occupied[parent] = 1;
            cur = parent;
        }
    }
    for (auto& list : ol.occupied_children) std::sort(list.begin(), list.end());
    return ol;
}

std::size_t OccurrenceList::byte_size() const {
    std::size_t bytes = occupied.size();
    for (const auto& l : occupied_children) bytes += l.size() * sizeof(std::uint32_t) + sizeof(l);
    for (const auto& l : leaf_objects) bytes += l.size() * sizeof(Vertex) + sizeof(l);
    return bytes;
}

namespace {

// Improved leaf search: Dijkstra inside the source leaf that teleports
// between borders through the leaf matrix, stopping after the first k
// objects (continuing only through distance ties). Settled distances are
// exact, so objects go straight into the candidate heap.
void gtree_leaf_search_improved(Vertex q, std::size_t k, const GTreeIndex& idx, const OccurrenceList& ol,
                                CandidateHeap& heap, GtreeStats* stats) {
    const std::uint32_t leaf = idx.leaf_of(q);
    const GTreeIndex::Node& n = idx.nodes()[leaf];
    const Graph& g = idx.graph();
    const auto& objs = ol.leaf_objects[leaf];
    std::vector<Distance> dist(n.leaf_vertices.size(), kInfDistance);
    std::vector<char> done(n.leaf_vertices.size(), 0);
    MinQueue L;
    dist[idx.leaf_row(q)] = 0;
    L.push(0, idx.leaf_row(q));
    std::size_t targets_found = 0;
    Distance kth = kInfDistance;
    std::size_t settled = 0;
    while (!L.empty()) {
        if (targets_found >= k && L.top().key > kth) break;
        const auto [d, id] = L.pop_min();
        const std::uint32_t row = static_cast<std::uint32_t>(id);
        if (done[row]) continue;
        done[row] = 1;
        ++settled;
        const Vertex v = n.leaf_vertices[row];
        if (std::binary_search(objs.begin(), objs.end(), v)) {
            heap.offer({v, d});
            ++targets_found;
            if (targets_found == k) kth = d;
        }
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (idx.leaf_of(nbrs[i]) != leaf) continue;
            const std::uint32_t urow = idx.leaf_row(nbrs[i]);
            const Distance nd = d + ws[i];
            if (!done[urow] && nd < dist[urow]) {
                dist[urow] = nd;
                L.push(nd, urow);
            }
        }
        const auto bit = std::lower_bound(n.borders.begin(), n.borders.end(), v);
        if (bit != n.borders.end() && *bit == v) {
            for (std::uint32_t j = 0; j < n.borders.size(); ++j) {
                const std::uint32_t brow = idx.leaf_row(n.borders[j]);
                if (done[brow]) continue;
                const Distance nd = d + idx.leaf_matrix_entry(leaf, row, j);
                if (nd < dist[brow]) {
                    dist[brow] = nd;
                    L.push(nd, brow);
                }
            }
        }
    }
    if (stats) stats->leaf_settled += settled;
}

// Unimproved baseline: settle the whole leaf, then resolve every leaf object
// by min(inside distance, best border round trip).
void gtree_leaf_search_basic(Vertex q, const GTreeIndex& idx, const OccurrenceList& ol,
                             GTreeAssembly& assembly, CandidateHeap& heap, GtreeStats* stats) {
    const std::uint32_t leaf = idx.leaf_of(q);
    for (Vertex o : ol.leaf_objects[leaf]) heap.offer({o, assembly.distance_to(o)});
    if (stats) stats->leaf_settled += idx.nodes()[leaf].leaf_vertices.size();
}

}  // namespace

KnnResult knn_gtree(Vertex q, std::size_t k, const GTreeIndex& idx, const OccurrenceList& ol,
                    GtreeStats* stats, bool improved_leaf_search) {
    GTreeAssembly assembly(idx);
    assembly.reset_source(q);
    const std::size_t want = std::min(k, ol.total_objects);
    CandidateHeap heap(want);
    if (want == 0) return {};

    const std::uint32_t leaf_q = idx.leaf_of(q);
    if (ol.occupied[leaf_q]) {
        if (improved_leaf_search)
            gtree_leaf_search_improved(q, k, idx, ol, heap, stats);
        else
            gtree_leaf_search_basic(q, idx, ol, assembly, heap, stats);
    }

    MinQueue queue;
    std::uint32_t t_n = leaf_q;
    auto node_bound = [&](std::uint32_t node) {
        if (node == idx.root()) return kInfDistance;
        Distance best = kInfDistance;
        for (Distance d : assembly.node_border_distances(node)) best = std::min(best, d);
        return best;
    };
    Distance t_min = node_bound(t_n);

    auto update_t = [&] {
        const std::uint32_t prev = t_n;
        t_n = static_cast<std::uint32_t>(idx.nodes()[t_n].parent);
        for (std::uint32_t c : ol.occupied_children[t_n])
            if (c != prev) queue.push(assembly.distance_to_node(c), kNodeBit | c);
        t_min = node_bound(t_n);
    };

    for (;;) {
        const Distance front = queue.empty() ? kInfDistance : queue.top().key;
        if (heap.full() && front > heap.d_k() && (t_n == idx.root() || t_min > heap.d_k())) break;
        if (!heap.full() && queue.empty() && t_n == idx.root()) break;
        if (t_n != idx.root() && (queue.empty() || front > t_min)) {
            update_t();
            continue;
        }
        if (queue.empty()) break;
        const auto [d, id] = queue.pop_min();
        if (id & kNodeBit) {
            const std::uint32_t node = static_cast<std::uint32_t>(id & ~kNodeBit);
            if (idx.nodes()[node].is_leaf()) {
                for (Vertex o : ol.leaf_objects[node]) queue.push(assembly.distance_to(o), o);
            } else {
                for (std::uint32_t c : ol.occupied_children[node])
                    queue.push(assembly.distance_to_node(c), kNodeBit | c);
            }
        } else {
            heap.offer({static_cast<Vertex>(id), d});
        }
    }
    if (stats) {
        stats->path_cost = assembly.path_cost();
        stats->sweeps = assembly.sweeps();
    }
    return heap.finalize();
}

}  // namespace rnk

#include "rnk/partition.h"

#include <algorithm>
#include <map>
#include <numeric>

namespace rnk {

namespace {

// Induced subgraph in local ids with aggregated edge weights; vertex weights
// count collapsed original vertices during coarsening.
struct Local {
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj;
    std::vector<std::uint32_t> vweight;

    std::size_t size() const { return adj.size(); }
    std::uint64_t total_weight() const {
        return std::accumulate(vweight.begin(), vweight.end(), std::uint64_t{0});
    }
};

std::vector<std::uint8_t> grow_bisection(const Local& g) {
    const std::size_t n = g.size();
    const std::uint64_t total = g.total_weight();
    std::vector<std::uint8_t> side(n, 1);

    // start from a peripheral vertex: two BFS sweeps
    auto farthest = [&](std::uint32_t from) {
        std::vector<int> depth(n, -1);
        std::vector<std::uint32_t> queue{from};
        depth[from] = 0;
        std::uint32_t last = from;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::uint32_t v = queue[head];
            last = v;
            for (auto [u, w] : g.adj[v]) {
                (void)w;
                if (depth[u] < 0) {
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        return last;
    };
    std::uint32_t start = farthest(farthest(0));

    // grow side 0 by strongest attachment until half the weight
    std::vector<std::uint64_t> attach(n, 0);
    std::vector<char> taken(n, 0);
    std::uint64_t grown = 0;
    std::uint32_t next = start;
    while (grown * 2 < total) {
        if (next == kNoVertex) {
            // disconnected remainder: restart from the lowest untaken vertex
            for (std::uint32_t v = 0; v < n; ++v)
                if (!taken[v]) {
                    next = v;
                    break;
                }
            if (next == kNoVertex) break;
        }
        taken[next] = 1;
        side[next] = 0;
        grown += g.vweight[next];
        for (auto [u, w] : g.adj[next])
            if (!taken[u]) attach[u] += w;
        next = kNoVertex;
        std::uint64_t best = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (!taken[v] && attach[v] > best) {
                best = attach[v];
                next = v;
            }
        }
    }
    return side;
}

void refine(const Local& g, std::vector<std::uint8_t>& side) {
    const std::size_t n = g.size();
    const std::uint64_t total = g.total_weight();
    const std::uint64_t lo = total * 45 / 100;
    std::uint64_t sw[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (std::uint32_t v = 0; v < n; ++v) {
        sw[side[v]] += g.vweight[v];
        ++count[side[v]];
    }
    for (int pass = 0; pass < 8; ++pass) {
        bool moved = false;
        for (std::uint32_t v = 0; v < n; ++v) {
            const std::uint8_t s = side[v];
            std::int64_t gain = 0;
            for (auto [u, w] : g.adj[v]) gain += side[u] == s ? -static_cast<std::int64_t>(w) : w;
            if (gain <= 0) continue;
            if (count[s] <= 1) continue;
            if (sw[s] < g.vweight[v] || sw[s] - g.vweight[v] < lo) continue;
            side[v] = 1 - s;
            sw[s] -= g.vweight[v];
            sw[1 - s] += g.vweight[v];
            --count[s];
            ++count[1 - s];
            moved = true;
        }
        if (!moved) break;
    }
}

std::vector<std::uint8_t> bisect(const Local& g0) {
    std::vector<Local> levels{g0};
    std::vector<std::vector<std::uint32_t>> fine_to_coarse;
    while (levels.back().size() > 32) {
        const Local& f = levels.back();
        const std::size_t n = f.size();
        std::vector<std::uint32_t> mate(n, kNoVertex);
        for (std::uint32_t v = 0; v < n; ++v) {
            if (mate[v] != kNoVertex) continue;
            std::uint32_t pick = kNoVertex, pick_w = 0;
            for (auto [u, w] : f.adj[v])
                if (mate[u] == kNoVertex && u != v && (w > pick_w || (w == pick_w && u < pick)))
                    pick = u, pick_w = w;
            mate[v] = pick == kNoVertex ? v : pick;
            if (pick != kNoVertex) mate[pick] = v;
        }
        std::vector<std::uint32_t> cid(n, kNoVertex);
        std::uint32_t nc = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (cid[v] != kNoVertex) continue;
            cid[v] = nc;
            cid[mate[v]] = nc;
            ++nc;
        }
        if (nc * 20 > n * 19) break;  // matching stalled
        Local coarse;
        coarse.adj.resize(nc);
        coarse.vweight.assign(nc, 0);
        for (std::uint32_t v = 0; v < n; ++v) coarse.vweight[cid[v]] += f.vweight[v];
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> cut;
        for (std::uint32_t v = 0; v < n; ++v)
            for (auto [u, w] : f.adj[v]) {
                const std::uint32_t a = cid[v], b = cid[u];
                if (a < b) cut[{a, b}] += w;
            }
        for (const auto& [key, w] : cut) {
            coarse.adj[key.first].emplace_back(key.second, w);
            coarse.adj[key.second].emplace_back(key.first, w);
        }
        fine_to_coarse.push_back(std::move(cid));
        levels.push_back(std::move(coarse));
    }

    std::vector<std::uint8_t> side = grow_bisection(levels.back());
    refine(levels.back(), side);
    for (std::size_t lvl = fine_to_coarse.size(); lvl-- > 0;) {
        const auto& cid = fine_to_coarse[lvl];
        std::vector<std::uint8_t> fine_side(cid.size());
        for (std::uint32_t v = 0; v < cid.size(); ++v) fine_side[v] = side[cid[v]];
        side = std::move(fine_side);
        refine(levels[lvl], side);
    }
    // guarantee both sides occupied
    if (std::count(side.begin(), side.end(), 0) == 0) side[0] = 0;
    if (std::count(side.begin(), side.end(), 1) == 0) side[side.size() - 1] = 1;
    return side;
}

void partition_recursive(const Graph& g, const std::vector<Vertex>& vertices, std::uint32_t parts,
                         std::uint32_t group_base, std::vector<std::int64_t>& local_of,
                         std::vector<std::uint32_t>& group_of_global) {
    if (parts == 1 || vertices.size() <= 1) {
        for (Vertex v : vertices) group_of_global[v] = group_base;
        return;
    }
    Local local;
    local.adj.resize(vertices.size());
    local.vweight.assign(vertices.size(), 1);
    for (std::size_t i = 0; i < vertices.size(); ++i) local_of[vertices[i]] = static_cast<std::int64_t>(i);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (Vertex u : g.neighbors(vertices[i])) {
            if (local_of[u] >= 0)
                local.adj[i].emplace_back(static_cast<std::uint32_t>(local_of[u]), 1u);
        }
    }
    const std::vector<std::uint8_t> side = bisect(local);
    for (std::size_t i = 0; i < vertices.size(); ++i) local_of[vertices[i]] = -1;
    std::vector<Vertex> left, right;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        (side[i] == 0 ? left : right).push_back(vertices[i]);
    partition_recursive(g, left, parts / 2, group_base, local_of, group_of_global);
    partition_recursive(g, right, parts / 2, group_base + parts / 2, local_of, group_of_global);
}

}  // namespace

std::vector<std::uint32_t> partition_vertices(const Graph& g, std::span<const Vertex> vertices,
                                              std::uint32_t parts) {
    if (parts == 0 || (parts & (parts - 1)) != 0) throw FormatError("parts must be a power of two");
    std::vector<std::uint32_t> group_of_global(g.vertex_count(), 0);
    std::vector<std::int64_t> local_of(g.vertex_count(), -1);
    std::vector<Vertex> list(vertices.begin(), vertices.end());
    partition_recursive(g, list, parts, 0, local_of, group_of_global);
    std::vector<std::uint32_t> out;
    out.reserve(vertices.size());
    for (Vertex v : vertices) out.push_back(group_of_global[v]);
    return out;
}

}  // namespace rnk

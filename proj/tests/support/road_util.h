#ifndef RNK_TESTS_SUPPORT_ROAD_UTIL_H_
#define RNK_TESTS_SUPPORT_ROAD_UTIL_H_

#include <map>
#include <set>
#include <vector>

#include "rnk/road.h"

namespace rnk::test {

using EdgeSet = std::set<std::pair<Vertex, Vertex>>;

// per-Rnet edge sets recovered from the Route Overlay leaf nodes
inline std::vector<EdgeSet> recover_edge_sets(const RoadIndex& idx) {
    const Graph& g = idx.graph();
    std::vector<EdgeSet> edges(idx.rnets().size());
    std::vector<const RoadIndex::TreeNode*> stack;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        for (const auto& tn : idx.tree_roots(v)) stack.push_back(&tn);
        while (!stack.empty()) {
            const auto& tn = *stack.back();
            stack.pop_back();
            if (idx.rnets()[tn.rnet].level == idx.levels()) {
                for (Vertex t : idx.leaf_edge_targets(tn))
                    edges[tn.rnet].insert({std::min(v, t), std::max(v, t)});
            } else {
                for (const auto& child : idx.tree_children(tn)) stack.push_back(&child);
            }
        }
    }
    // non-leaf Rnets own the union of their children's edges
    for (std::uint32_t ri = static_cast<std::uint32_t>(edges.size()); ri-- > 0;)
        for (std::uint32_t c : idx.rnets()[ri].children)
            edges[ri].insert(edges[c].begin(), edges[c].end());
    return edges;
}

// Dijkstra restricted to an explicit edge set
inline Distance restricted_distance(const Graph& g, const EdgeSet& edges, Vertex s, Vertex t) {
    std::map<Vertex, Distance> dist;
    std::set<std::pair<Distance, Vertex>> queue;
    dist[s] = 0;
    queue.insert({0, s});
    while (!queue.empty()) {
        const auto [d, v] = *queue.begin();
        queue.erase(queue.begin());
        if (v == t) return d;
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (!edges.count({std::min(v, nbrs[i]), std::max(v, nbrs[i])})) continue;
            const Distance nd = d + ws[i];
            const auto it = dist.find(nbrs[i]);
            if (it == dist.end() || nd < it->second) {
                if (it != dist.end()) queue.erase({it->second, nbrs[i]});
                dist[nbrs[i]] = nd;
                queue.insert({nd, nbrs[i]});
            }
        }
    }
    return kInfDistance;
}

}  // namespace rnk::test

#endif  // RNK_TESTS_SUPPORT_ROAD_UTIL_H_

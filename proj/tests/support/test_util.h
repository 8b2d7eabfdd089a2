#ifndef RNK_TESTS_SUPPORT_TEST_UTIL_H_
#define RNK_TESTS_SUPPORT_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "rnk/graph.h"
#include "rnk/types.h"

namespace rnk::test {

// Uniform integer in [lo, hi] via rejection sampling so the stream of values
// is pinned to the engine, not to a library distribution implementation.
inline std::uint64_t rand_range(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / span * span;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return lo + r % span;
}

inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct RandomGraph {
    Graph graph;
    CoordinateTable coords;
};

// Connected planar-ish test graph: n random points, Euclidean minimum spanning
// tree, then extra short edges until roughly 1.5n edges. Weights are either
// random in [1, 1000] or scaled Euclidean lengths.
inline RandomGraph make_random_graph(std::size_t n, std::uint64_t seed, bool euclidean_weights = false) {
    std::mt19937_64 rng(seed);
    CoordinateTable coords;
    coords.x.resize(n);
    coords.y.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        coords.x[v] = rand_unit(rng) * 1000.0;
        coords.y[v] = rand_unit(rng) * 1000.0;
    }
    jitter_duplicate_coordinates(coords);

    auto d_e = [&](Vertex a, Vertex b) { return euclidean_distance(a, b, coords); };

    // Prim MST over the complete Euclidean graph.
    std::vector<char> in_tree(n, 0);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<Vertex> best_from(n, 0);
    std::vector<std::pair<Vertex, Vertex>> edge_list;
    in_tree[0] = 1;
    for (Vertex v = 1; v < n; ++v) {
        best[v] = d_e(0, v);
        best_from[v] = 0;
    }
    for (std::size_t added = 1; added < n; ++added) {
        Vertex pick = kNoVertex;
        for (Vertex v = 0; v < n; ++v)
            if (!in_tree[v] && (pick == kNoVertex || best[v] < best[pick])) pick = v;
        in_tree[pick] = 1;
        edge_list.emplace_back(best_from[pick], pick);
        for (Vertex v = 0; v < n; ++v) {
            if (!in_tree[v]) {
                const double d = d_e(pick, v);
                if (d < best[v]) {
                    best[v] = d;
                    best_from[v] = pick;
                }
            }
        }
    }

    std::vector<std::vector<char>> have(n, std::vector<char>(n, 0));
    for (auto [u, v] : edge_list) have[u][v] = have[v][u] = 1;
    const std::size_t target_edges = n + n / 2;
    std::size_t attempts = 0;
    while (edge_list.size() < target_edges && attempts < 50 * n) {
        ++attempts;
        const Vertex u = static_cast<Vertex>(rand_range(rng, 0, n - 1));
        // connect u to its nearest not-yet-adjacent neighbor
        Vertex pick = kNoVertex;
        double pick_d = std::numeric_limits<double>::infinity();
        for (Vertex v = 0; v < n; ++v) {
            if (v == u || have[u][v]) continue;
            const double d = d_e(u, v);
            if (d < pick_d) {
                pick_d = d;
                pick = v;
            }
        }
        if (pick == kNoVertex) continue;
        have[u][pick] = have[pick][u] = 1;
        edge_list.emplace_back(u, pick);
    }

    std::vector<std::tuple<Vertex, Vertex, Weight>> edges;
    edges.reserve(edge_list.size());
    for (auto [u, v] : edge_list) {
        Weight w;
        if (euclidean_weights) {
            w = static_cast<Weight>(std::llround(d_e(u, v) * 100.0)) + 1;
        } else {
            w = rand_range(rng, 1, 1000);
        }
        edges.emplace_back(u, v, w);
    }
    RandomGraph out;
    out.graph = build_graph(n, edges, euclidean_weights ? WeightKind::kDistance : WeightKind::kTime);
    out.coords = std::move(coords);
    return out;
}

// Independent shortest-path oracle: Bellman-Ford over the directed arc view.
inline std::vector<Distance> bellman_ford(const Graph& g, Vertex s) {
    const std::size_t n = g.vertex_count();
    std::vector<Distance> dist(n, kInfDistance);
    dist[s] = 0;
    for (std::size_t round = 0; round + 1 < n; ++round) {
        bool changed = false;
        for (Vertex v = 0; v < n; ++v) {
            if (dist[v] == kInfDistance) continue;
            const auto nbrs = g.neighbors(v);
            const auto ws = g.weights(v);
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                if (dist[v] + ws[i] < dist[nbrs[i]]) {
                    dist[nbrs[i]] = dist[v] + ws[i];
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return dist;
}

// Canonical kNN answer from a full distance table: all objects sorted by
// (distance, id), truncated to k.
inline std::vector<KnnEntry> knn_oracle(const std::vector<Distance>& dist_from_query,
                                        const std::vector<Vertex>& objects, std::size_t k) {
    std::vector<KnnEntry> all;
    all.reserve(objects.size());
    for (Vertex o : objects) all.push_back({o, dist_from_query[o]});
    std::sort(all.begin(), all.end(), [](const KnnEntry& a, const KnnEntry& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.vertex < b.vertex;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

// Distinct random object vertices.
inline std::vector<Vertex> random_objects(std::mt19937_64& rng, std::size_t n, std::size_t count) {
    std::vector<char> used(n, 0);
    std::vector<Vertex> out;
    while (out.size() < count) {
        const Vertex v = static_cast<Vertex>(rand_range(rng, 0, n - 1));
        if (!used[v]) {
            used[v] = 1;
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace rnk::test

#endif  // RNK_TESTS_SUPPORT_TEST_UTIL_H_

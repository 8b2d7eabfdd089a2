#include <doctest.h>

#include "rnk/ier.h"
#include "rnk/ine.h"
#include "support/test_util.h"

using namespace rnk;

TEST_CASE("dijkstra oracle equals dijkstra_distance on sampled pairs") {
    auto rg = test::make_random_graph(150, 41);
    DijkstraOracle oracle(rg.graph);
    DijkstraScratch scratch;
    oracle.reset_source(17);
    CHECK(oracle.distance_to(17) == 0);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const Vertex s = static_cast<Vertex>(test::rand_range(rng, 0, 149));
        const Vertex t = static_cast<Vertex>(test::rand_range(rng, 0, 149));
        oracle.reset_source(s);
        CHECK(oracle.distance_to(t) == dijkstra_distance(s, t, rg.graph, scratch));
    }
}

TEST_CASE("collinear objects: exactly k oracle calls, zero false hits") {
    // vertices 0..9 on a line at x = 0, 10, 20, ..., weights equal the gaps
    const std::size_t n = 10;
    CoordinateTable coords;
    std::vector<std::tuple<Vertex, Vertex, Weight>> edges;
    for (Vertex v = 0; v < n; ++v) {
        coords.x.push_back(10.0 * v);
        coords.y.push_back(0.0);
        if (v > 0) edges.emplace_back(v - 1, v, 10);
    }
    Graph g = build_graph(n, edges, WeightKind::kDistance);
    ObjectSet o;
    o.ids = {2, 4, 6, 8};
    o.density = 0.4;
    RTree rt(o, coords);
    DijkstraOracle oracle(g);
    IerStats stats;
    const auto r = knn_ier(0, 2, oracle, rt, coords, 1.0, &stats);
    CHECK(r == KnnResult{{2, 20}, {4, 40}});
    CHECK(stats.oracle_calls == 2);
    CHECK(stats.false_hits == 0);
}

TEST_CASE("query on an object with k=1 uses one oracle call") {
    const std::size_t n = 5;
    CoordinateTable coords;
    std::vector<std::tuple<Vertex, Vertex, Weight>> edges;
    for (Vertex v = 0; v < n; ++v) {
        coords.x.push_back(10.0 * v);
        coords.y.push_back(0.0);
        if (v > 0) edges.emplace_back(v - 1, v, 10);
    }
    Graph g = build_graph(n, edges, WeightKind::kDistance);
    ObjectSet o;
    o.ids = {1, 3};
    RTree rt(o, coords);
    DijkstraOracle oracle(g);
    IerStats stats;
    const auto r = knn_ier(1, 1, oracle, rt, coords, 1.0, &stats);
    CHECK(r == KnnResult{{1, 0}});
    CHECK(stats.oracle_calls == 1);
}

TEST_CASE("Euclidean-close but network-far object causes a false hit") {
    // two parallel chains joined only at the far end, like banks of a river
    //   0 - 1 - 2 - 3
    //               |
    //   4 - 5 - 6 - 7
    CoordinateTable coords;
    coords.x = {0, 10, 20, 30, 0, 10, 20, 30};
    coords.y = {0, 0, 0, 0, 3, 3, 3, 3};
    std::vector<std::tuple<Vertex, Vertex, Weight>> edges = {
        {0, 1, 10}, {1, 2, 10}, {2, 3, 10}, {4, 5, 10}, {5, 6, 10}, {6, 7, 10}, {3, 7, 3}};
    Graph g = build_graph(8, edges, WeightKind::kDistance);
    ObjectSet o;
    o.ids = {2, 4};
    RTree rt(o, coords);
    DijkstraOracle oracle(g);
    IerStats stats;
    // from 0: d_E(0,4)=3 but d(0,4)=63; true 1-NN is 2 at distance 20
    const auto r = knn_ier(0, 1, oracle, rt, coords, 1.0, &stats);
    CHECK(r == KnnResult{{2, 20}});
    CHECK(stats.false_hits == 1);
    CHECK(stats.oracle_calls == 2);
}

TEST_CASE("knn_ier equals knn_ine on random instances, both weight kinds") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const bool euclidean = seed % 2 == 0;
        auto rg = test::make_random_graph(200, seed, euclidean);
        const Graph& g = rg.graph;
        ObjectSet o = gen_uniform(g, 0.08, seed);
        RTree rt(o, rg.coords, 16);
        DijkstraOracle oracle(g);
        const double lb_scale = 1.0 / max_speed(g, rg.coords);
        DijkstraScratch scratch;
        std::mt19937_64 rng(seed * 7);
        for (int trial = 0; trial < 3; ++trial) {
            const Vertex q = static_cast<Vertex>(test::rand_range(rng, 0, g.vertex_count() - 1));
            const std::size_t k = 1 + static_cast<std::size_t>(test::rand_range(rng, 0, 9));
            IerStats stats;
            const auto got = knn_ier(q, k, oracle, rt, rg.coords, lb_scale, &stats);
            const auto expect = knn_ine(q, k, g, o, scratch);
            CHECK(got == expect);
            CHECK(stats.false_hits == stats.oracle_calls - got.size());
        }
    }
}

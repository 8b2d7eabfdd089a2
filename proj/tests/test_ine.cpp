#include <doctest.h>

#include "rnk/ine.h"
#include "support/test_util.h"

using namespace rnk;

TEST_CASE("knn_ine trivial cases") {
    auto rg = test::make_random_graph(80, 31);
    ObjectSet o = gen_uniform(rg.graph, 0.2, 2);
    DijkstraScratch scratch;
    const Vertex q = o.ids[3];
    auto r = knn_ine(q, 1, rg.graph, o, scratch);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == KnnEntry{q, 0});

    auto all = knn_ine(q, o.size() + 10, rg.graph, o, scratch);
    CHECK(all.size() == o.size());
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].distance <= all[i].distance);
}

TEST_CASE("knn_ine matches the SSSP oracle on random instances") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto rg = test::make_random_graph(300, seed);
        const Graph& g = rg.graph;
        ObjectSet o = gen_uniform(g, 0.05 + 0.01 * static_cast<double>(seed % 5), seed * 3);
        std::mt19937_64 rng(seed * 17);
        DijkstraScratch scratch;
        const Vertex q = static_cast<Vertex>(test::rand_range(rng, 0, g.vertex_count() - 1));
        const std::size_t k = 1 + seed % 12;
        const auto dist = test::bellman_ford(g, q);
        const auto expect = test::knn_oracle(dist, o.ids, k);
        IneStats stats;
        const auto got = knn_ine(q, k, g, o, scratch, &stats);
        CHECK(got == expect);

        // settled count sandwiched by strict and inclusive distance counts
        if (!expect.empty()) {
            const Distance d_k = expect.back().distance;
            std::size_t strict = 0, incl = 0;
            for (Distance d : dist) {
                if (d < d_k) ++strict;
                if (d <= d_k) ++incl;
            }
            CHECK(stats.settled >= strict);
            CHECK(stats.settled <= incl);
        }
    }
}

TEST_CASE("knn_ine keeps id-order on exact distance ties") {
    // star: center 0, spokes all at weight 7
    std::vector<std::tuple<Vertex, Vertex, Weight>> edges;
    for (Vertex v = 1; v <= 6; ++v) edges.emplace_back(0, v, 7);
    Graph g = build_graph(7, edges, WeightKind::kDistance);
    ObjectSet o;
    o.ids = {1, 2, 3, 4, 5, 6};
    DijkstraScratch scratch;
    const auto r = knn_ine(0, 3, g, o, scratch);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == KnnEntry{1, 7});
    CHECK(r[1] == KnnEntry{2, 7});
    CHECK(r[2] == KnnEntry{3, 7});
}

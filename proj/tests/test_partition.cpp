#include <doctest.h>

#include <numeric>
#include <set>

#include "rnk/partition.h"
#include "support/test_util.h"

using namespace rnk;

TEST_CASE("bisection is balanced, total, and deterministic") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto rg = test::make_random_graph(240, seed);
        std::vector<Vertex> all(240);
        std::iota(all.begin(), all.end(), 0);
        const auto part = partition_vertices(rg.graph, all, 2);
        REQUIRE(part.size() == all.size());
        std::size_t counts[2] = {0, 0};
        for (auto p : part) {
            REQUIRE(p < 2);
            ++counts[p];
        }
        CHECK(counts[0] >= 240 * 2 / 5);
        CHECK(counts[1] >= 240 * 2 / 5);
        CHECK(part == partition_vertices(rg.graph, all, 2));
    }
}

TEST_CASE("fanout-4 partition covers all groups on sublists") {
    auto rg = test::make_random_graph(300, 9);
    std::vector<Vertex> subset;
    for (Vertex v = 0; v < 300; v += 2) subset.push_back(v);
    const auto part = partition_vertices(rg.graph, subset, 4);
    std::set<std::uint32_t> groups(part.begin(), part.end());
    CHECK(groups == std::set<std::uint32_t>{0, 1, 2, 3});
    std::size_t counts[4] = {0, 0, 0, 0};
    for (auto p : part) ++counts[p];
    for (int i = 0; i < 4; ++i) CHECK(counts[i] >= subset.size() / 8);
}

TEST_CASE("partition cut is small on a two-community graph") {
    // two dense blobs joined by one bridge edge
    std::vector<std::tuple<Vertex, Vertex, Weight>> edges;
    for (Vertex v = 0; v < 20; ++v)
        for (Vertex u = v + 1; u < 20; u += 3) edges.emplace_back(v, u, 1);
    for (Vertex v = 20; v < 40; ++v)
        for (Vertex u = v + 1; u < 40; u += 3) edges.emplace_back(v, u, 1);
    edges.emplace_back(19, 20, 1);
    Graph g = build_graph(40, edges, WeightKind::kDistance);
    std::vector<Vertex> all(40);
    std::iota(all.begin(), all.end(), 0);
    const auto part = partition_vertices(g, all, 2);
    std::size_t cut = 0;
    for (const auto& [u, v, w] : edges)
        if (part[u] != part[v]) ++cut;
    CHECK(cut <= 3);
}

TEST_CASE("tiny inputs keep every group nonempty") {
    std::vector<std::tuple<Vertex, Vertex, Weight>> edges{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}};
    Graph g = build_graph(4, edges, WeightKind::kDistance);
    std::vector<Vertex> all{0, 1, 2, 3};
    const auto part = partition_vertices(g, all, 4);
    CHECK(std::set<std::uint32_t>(part.begin(), part.end()).size() == 4);
    CHECK_THROWS_AS(partition_vertices(g, all, 3), FormatError);
}

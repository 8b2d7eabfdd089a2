#include <doctest.h>

#include <set>
#include <sstream>

#include "rnk/object_set.h"
#include "support/test_util.h"

using namespace rnk;

TEST_CASE("gen_uniform size, determinism, bounds") {
    auto rg = test::make_random_graph(200, 11);
    ObjectSet a = gen_uniform(rg.graph, 0.1, 42);
    CHECK(a.size() == 20);
    CHECK(std::is_sorted(a.ids.begin(), a.ids.end()));
    CHECK(std::adjacent_find(a.ids.begin(), a.ids.end()) == a.ids.end());
    for (Vertex v : a.ids) CHECK(v < 200);
    ObjectSet b = gen_uniform(rg.graph, 0.1, 42);
    CHECK(a.ids == b.ids);
    ObjectSet c = gen_uniform(rg.graph, 0.1, 43);
    CHECK(a.ids != c.ids);
    ObjectSet full = gen_uniform(rg.graph, 1.0, 1);
    CHECK(full.size() == 200);
    ObjectSet tiny = gen_uniform(rg.graph, 1e-9, 1);
    CHECK(tiny.size() == 1);
    CHECK_THROWS_AS(gen_uniform(rg.graph, 0.0, 1), FormatError);
    CHECK_THROWS_AS(gen_uniform(rg.graph, 1.5, 1), FormatError);
}

TEST_CASE("gen_clustered objects lie in some center's expansion") {
    auto rg = test::make_random_graph(150, 12);
    const Graph& g = rg.graph;
    const std::size_t clusters = 6, max_size = 5;
    ObjectSet o = gen_clustered(g, clusters, max_size, 9);
    CHECK(o.size() <= clusters * max_size);
    CHECK(o.size() >= clusters);

    // centers are the first `clusters` distinct rejection-sampled picks
    std::mt19937_64 rng(9);
    std::vector<char> used(g.vertex_count(), 0);
    std::vector<Vertex> centers;
    while (centers.size() < clusters) {
        const Vertex v = static_cast<Vertex>(test::rand_range(rng, 0, g.vertex_count() - 1));
        if (!used[v]) {
            used[v] = 1;
            centers.push_back(v);
        }
    }
    std::set<Vertex> covered;
    for (Vertex c : centers) {
        // brute expansion: max_size nearest vertices by (distance, settle order)
        auto dist = test::bellman_ford(g, c);
        std::vector<Vertex> order(g.vertex_count());
        for (Vertex v = 0; v < g.vertex_count(); ++v) order[v] = v;
        std::sort(order.begin(), order.end(),
                  [&](Vertex a, Vertex b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
        // ties at the cutoff can settle in either order, so cover everything
        // at distance <= the max_size-th distance
        const Distance cutoff = dist[order[max_size - 1]];
        for (Vertex v : order) {
            if (dist[v] <= cutoff) covered.insert(v);
        }
    }
    for (Vertex obj : o.ids) CHECK(covered.count(obj) == 1);

    ObjectSet again = gen_clustered(g, clusters, max_size, 9);
    CHECK(o.ids == again.ids);
}

TEST_CASE("gen_clustered with max_size 1 degenerates to the center picks") {
    auto rg = test::make_random_graph(100, 13);
    ObjectSet o = gen_clustered(rg.graph, 10, 1, 77);
    CHECK(o.size() == 10);
}

TEST_CASE("gen_min_dist objects pass the Dijkstra threshold re-check") {
    auto rg = test::make_random_graph(180, 14);
    const Graph& g = rg.graph;
    const Vertex centre = euclidean_centre_vertex(rg.coords);
    const auto dist = test::bellman_ford(g, centre);
    const Distance d_max = *std::max_element(dist.begin(), dist.end());
    const std::size_t m = 5;
    for (std::size_t i = 1; i <= m; ++i) {
        ObjectSet o = gen_min_dist(g, rg.coords, 10, i, m, 5);
        const double threshold = static_cast<double>(d_max) / std::pow(2.0, static_cast<double>(m - i + 1));
        for (Vertex obj : o.ids) CHECK(static_cast<double>(dist[obj]) >= threshold);
    }
    CHECK_THROWS_AS(gen_min_dist(g, rg.coords, 1000, 1, 5, 5), FormatError);
    CHECK_THROWS_AS(gen_min_dist(g, rg.coords, 10, 0, 5, 5), FormatError);
    CHECK_THROWS_AS(gen_min_dist(g, rg.coords, 10, 6, 5, 5), FormatError);
}

TEST_CASE("min_dist_query_pool is disjoint from every bucket") {
    auto rg = test::make_random_graph(180, 15);
    const auto pool = min_dist_query_pool(rg.graph, rg.coords, 5);
    CHECK(!pool.empty());
    ObjectSet innermost = gen_min_dist(rg.graph, rg.coords, 10, 1, 5, 3);
    for (Vertex q : pool) CHECK(!innermost.contains(q));
}

TEST_CASE("object file round trip and error cases") {
    {
        std::istringstream in("3\n1\n1\n");
        ObjectSet o = load_objects(in, 10);
        CHECK(o.ids == std::vector<Vertex>{1, 3});
    }
    {
        std::istringstream in("");
        CHECK_THROWS_AS(load_objects(in, 10), FormatError);
    }
    {
        std::istringstream in("12\n");
        CHECK_THROWS_AS(load_objects(in, 10), FormatError);
    }
    auto rg = test::make_random_graph(90, 16);
    ObjectSet o = gen_uniform(rg.graph, 0.2, 8);
    std::ostringstream out;
    save_objects(out, o);
    CHECK(out.str().rfind("# density=0.2 kind=uniform seed=8", 0) == 0);
    std::istringstream back(out.str());
    ObjectSet o2 = load_objects(back, 90);
    CHECK(o2.ids == o.ids);
}

#include <doctest.h>

#include <set>

#include "rnk/synth.h"
#include "support/test_util.h"

using namespace rnk;

TEST_CASE("synthetic networks hit the requested counts and stay connected") {
    const auto net = make_synthetic_network(500, 1200, 9);
    CHECK(net.distance_graph.vertex_count() == 500);
    CHECK(net.distance_graph.undirected_edge_count() == 1200);
    CHECK(net.time_graph.vertex_count() == 500);
    CHECK(net.time_graph.undirected_edge_count() == 1200);
    CHECK(net.coords.size() == 500);
    CHECK_NOTHROW(verify_connected(net.time_graph));

    // same topology for both weight kinds
    CHECK(net.distance_graph.first_edge == net.time_graph.first_edge);
    CHECK(net.distance_graph.edge_target == net.time_graph.edge_target);

    std::set<std::pair<double, double>> points;
    for (std::size_t v = 0; v < net.coords.size(); ++v)
        points.insert({net.coords.x[v], net.coords.y[v]});
    CHECK(points.size() == 500);
}

TEST_CASE("synthetic generation is deterministic per seed") {
    const auto a = make_synthetic_network(300, 700, 4);
    const auto b = make_synthetic_network(300, 700, 4);
    const auto c = make_synthetic_network(300, 700, 5);
    CHECK(a.distance_graph.edge_weight == b.distance_graph.edge_weight);
    CHECK(a.coords.x == b.coords.x);
    CHECK(a.distance_graph.edge_weight != c.distance_graph.edge_weight);
}

TEST_CASE("infeasible synthetic edge budgets are rejected") {
    CHECK_THROWS_AS(make_synthetic_network(100, 50, 1), FormatError);
    CHECK_THROWS_AS(make_synthetic_network(100, 100000, 1), FormatError);
}

#include <doctest.h>

#include <set>
#include <sstream>

#include "rnk/gtree.h"
#include "rnk/ine.h"
#include "support/test_util.h"

using namespace rnk;

namespace {

bool node_contains(const GTreeIndex& idx, std::uint32_t node, Vertex v) {
    std::int32_t n = static_cast<std::int32_t>(idx.leaf_of(v));
    while (n >= 0) {
        if (static_cast<std::uint32_t>(n) == node) return true;
        n = idx.nodes()[n].parent;
    }
    return false;
}

void check_structure(const GTreeIndex& idx, const Graph& g) {
    const auto& nodes = idx.nodes();
    // every vertex in exactly one leaf, sizes within tau
    std::vector<std::size_t> seen(g.vertex_count(), 0);
    for (std::uint32_t ni = 0; ni < nodes.size(); ++ni) {
        const auto& n = nodes[ni];
        CHECK(n.children.size() <= idx.fanout());
        if (n.is_leaf()) {
            CHECK(n.leaf_vertices.size() <= idx.tau());
            for (std::size_t row = 0; row < n.leaf_vertices.size(); ++row) {
                ++seen[n.leaf_vertices[row]];
                CHECK(idx.leaf_of(n.leaf_vertices[row]) == ni);
                CHECK(idx.leaf_row(n.leaf_vertices[row]) == row);
            }
        }
        // border soundness
        for (Vertex b : n.borders) {
            CHECK(node_contains(idx, ni, b));
            bool crosses = false;
            for (Vertex u : g.neighbors(b))
                if (!node_contains(idx, ni, u)) crosses = true;
            CHECK(crosses);
        }
        // no missed borders
        if (n.is_leaf()) {
            for (Vertex v : n.leaf_vertices) {
                bool crosses = false;
                for (Vertex u : g.neighbors(v))
                    if (idx.leaf_of(u) != ni) crosses = true;
                CHECK(crosses == std::binary_search(n.borders.begin(), n.borders.end(), v));
            }
        }
        // border inheritance and union layout
        if (!n.is_leaf()) {
            CHECK(n.child_border_start.size() == n.children.size());
            std::size_t at = 0;
            for (std::size_t c = 0; c < n.children.size(); ++c) {
                CHECK(n.child_border_start[c] == at);
                const auto& cb = nodes[n.children[c]].borders;
                for (std::size_t i = 0; i < cb.size(); ++i) CHECK(n.union_borders[at + i] == cb[i]);
                at += cb.size();
            }
            CHECK(at == n.union_borders.size());
            for (std::size_t j = 0; j < n.borders.size(); ++j)
                CHECK(n.union_borders[n.own_border_offsets[j]] == n.borders[j]);
            // each own border inherited from exactly one child
            for (Vertex b : n.borders) {
                int owners = 0;
                for (std::uint32_t c : n.children)
                    if (std::binary_search(nodes[c].borders.begin(), nodes[c].borders.end(), b)) ++owners;
                CHECK(owners == 1);
            }
        }
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v) CHECK(seen[v] == 1);
    CHECK(nodes[idx.root()].parent == -1);
    CHECK(nodes[idx.root()].borders.empty());
}

}  // namespace

TEST_CASE("gtree degenerates to a single leaf when tau covers the graph") {
    auto rg = test::make_random_graph(60, 51);
    GTreeIndex idx(rg.graph, 4, 64);
    CHECK(idx.nodes().size() == 1);
    CHECK(idx.nodes()[0].is_leaf());
    CHECK(idx.nodes()[0].borders.empty());
}

TEST_CASE("gtree structure invariants and matrix exactness") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto rg = test::make_random_graph(180, seed * 13);
        GTreeIndex idx(rg.graph, 4, 16);
        check_structure(idx, rg.graph);
        // sampled matrix entries against the oracle
        std::mt19937_64 rng(seed);
        int checked = 0;
        for (const auto& n : idx.nodes()) {
            if (checked > 200) break;
            if (n.is_leaf()) {
                if (n.borders.empty()) continue;
                const Vertex v = n.leaf_vertices[test::rand_range(rng, 0, n.leaf_vertices.size() - 1)];
                const auto dist = test::bellman_ford(rg.graph, v);
                for (std::size_t j = 0; j < n.borders.size(); ++j) {
                    CHECK(n.matrix[idx.leaf_row(v) * n.borders.size() + j] == dist[n.borders[j]]);
                    ++checked;
                }
            } else {
                const std::size_t row = test::rand_range(rng, 0, n.union_borders.size() - 1);
                const auto dist = test::bellman_ford(rg.graph, n.union_borders[row]);
                for (std::size_t x = 0; x < n.union_borders.size(); ++x) {
                    CHECK(n.matrix[row * n.union_borders.size() + x] == dist[n.union_borders[x]]);
                    ++checked;
                }
            }
        }
    }
}

TEST_CASE("assembly distance equals Dijkstra on random pairs") {
    auto rg = test::make_random_graph(300, 57);
    GTreeIndex idx(rg.graph, 4, 32);
    GTreeAssembly assembly(idx);
    DijkstraScratch scratch;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Vertex s = static_cast<Vertex>(test::rand_range(rng, 0, 299));
        const Vertex t = static_cast<Vertex>(test::rand_range(rng, 0, 299));
        assembly.reset_source(s);
        CHECK(assembly.distance_to(t) == dijkstra_distance(s, t, rg.graph, scratch));
        CHECK(assembly.distance_to(s) == 0);
    }
}

TEST_CASE("assembly is exact on an exhaustive all-pairs sweep") {
    auto rg = test::make_random_graph(120, 58);
    GTreeIndex idx(rg.graph, 4, 10);
    GTreeAssembly assembly(idx);
    DijkstraScratch scratch;
    std::vector<Distance> dist;
    for (Vertex s = 0; s < 120; ++s) {
        dijkstra_sssp(s, rg.graph, scratch, dist);
        assembly.reset_source(s);
        for (Vertex t = 0; t < 120; ++t) CHECK(assembly.distance_to(t) == dist[t]);
    }
}

TEST_CASE("materialization: a second same-leaf target costs no new sweeps") {
    auto rg = test::make_random_graph(250, 59);
    GTreeIndex idx(rg.graph, 4, 16);
    // find two objects sharing a leaf, away from the source's leaf
    Vertex a = kNoVertex, b = kNoVertex;
    for (Vertex v = 0; v < 249 && a == kNoVertex; ++v)
        for (Vertex u = v + 1; u < 250; ++u)
            if (idx.leaf_of(v) == idx.leaf_of(u) && idx.leaf_of(v) != idx.leaf_of(0)) {
                a = v;
                b = u;
                break;
            }
    REQUIRE(a != kNoVertex);
    MGtreeOracle oracle(idx);
    CHECK(oracle.supports_materialization());
    oracle.reset_source(0);
    DijkstraScratch scratch;
    CHECK(oracle.distance_to(a) == dijkstra_distance(0, a, rg.graph, scratch));
    const std::size_t sweeps_after_first = oracle.assembly().sweeps();
    CHECK(oracle.distance_to(b) == dijkstra_distance(0, b, rg.graph, scratch));
    CHECK(oracle.assembly().sweeps() == sweeps_after_first);
}

TEST_CASE("occurrence list marks match a brute descendant scan") {
    auto rg = test::make_random_graph(200, 60);
    GTreeIndex idx(rg.graph, 4, 16);
    ObjectSet o = gen_uniform(rg.graph, 0.05, 6);
    OccurrenceList ol = build_occurrence_list(idx, o);
    CHECK(ol.total_objects == o.size());
    for (std::uint32_t ni = 0; ni < idx.nodes().size(); ++ni) {
        bool brute = false;
        for (Vertex obj : o.ids)
            if (node_contains(idx, ni, obj)) brute = true;
        CHECK(static_cast<bool>(ol.occupied[ni]) == brute);
        std::set<std::uint32_t> expect;
        for (std::uint32_t c : idx.nodes()[ni].children)
            for (Vertex obj : o.ids)
                if (node_contains(idx, c, obj)) expect.insert(c);
        CHECK(std::set<std::uint32_t>(ol.occupied_children[ni].begin(),
                                      ol.occupied_children[ni].end()) == expect);
    }
    ObjectSet all = gen_uniform(rg.graph, 1.0, 1);
    OccurrenceList ol_all = build_occurrence_list(idx, all);
    for (auto f : ol_all.occupied) CHECK(f == 1);
}

TEST_CASE("knn_gtree trivial cases") {
    auto rg = test::make_random_graph(150, 61);
    GTreeIndex idx(rg.graph, 4, 16);
    ObjectSet o = gen_uniform(rg.graph, 0.1, 7);
    OccurrenceList ol = build_occurrence_list(idx, o);
    const Vertex q = o.ids[0];
    auto r = knn_gtree(q, 1, idx, ol);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == KnnEntry{q, 0});
}

TEST_CASE("knn_gtree matches knn_ine, both leaf-search variants") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto rg = test::make_random_graph(120 + 11 * (seed % 7), seed);
        const Graph& g = rg.graph;
        GTreeIndex idx(g, 4, 8 + static_cast<std::uint32_t>(seed % 3) * 8);
        ObjectSet o = gen_uniform(g, 0.1, seed);
        OccurrenceList ol = build_occurrence_list(idx, o);
        DijkstraScratch scratch;
        std::mt19937_64 rng(seed * 3);
        for (int trial = 0; trial < 3; ++trial) {
            const Vertex q = static_cast<Vertex>(test::rand_range(rng, 0, g.vertex_count() - 1));
            const std::size_t k = 1 + static_cast<std::size_t>(test::rand_range(rng, 0, 11));
            const auto expect = knn_ine(q, k, g, o, scratch);
            GtreeStats imp, basic;
            const auto got = knn_gtree(q, k, idx, ol, &imp, true);
            const auto got_basic = knn_gtree(q, k, idx, ol, &basic, false);
            CHECK(got == expect);
            CHECK(got_basic == expect);
            if (ol.occupied[idx.leaf_of(q)]) CHECK(imp.leaf_settled <= basic.leaf_settled);
        }
    }
}

TEST_CASE("knn_gtree with all objects in the query leaf needs no ascent") {
    auto rg = test::make_random_graph(200, 62);
    GTreeIndex idx(rg.graph, 4, 16);
    // pick the leaf of vertex 0 and use its vertices as the object set
    const std::uint32_t leaf = idx.leaf_of(0);
    ObjectSet o;
    o.ids = idx.nodes()[leaf].leaf_vertices;
    OccurrenceList ol = build_occurrence_list(idx, o);
    DijkstraScratch scratch;
    const auto expect = knn_ine(0, 3, rg.graph, o, scratch);
    CHECK(knn_gtree(0, 3, idx, ol) == expect);
}

TEST_CASE("gtree serialization round-trips byte-identically") {
    auto rg = test::make_random_graph(150, 63);
    GTreeIndex idx(rg.graph, 4, 16);
    std::ostringstream out1;
    idx.save(out1);
    std::istringstream in(out1.str());
    GTreeIndex idx2 = GTreeIndex::load(in, rg.graph);
    std::ostringstream out2;
    idx2.save(out2);
    CHECK(out1.str() == out2.str());
    // and the reloaded index answers queries
    ObjectSet o = gen_uniform(rg.graph, 0.1, 2);
    OccurrenceList ol = build_occurrence_list(idx2, o);
    DijkstraScratch scratch;
    CHECK(knn_gtree(5, 4, idx2, ol) == knn_ine(5, 4, rg.graph, o, scratch));
}

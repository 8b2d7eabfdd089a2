#ifndef RNK_GTREE_H_
#define RNK_GTREE_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "rnk/graph.h"
#include "rnk/ier.h"
#include "rnk/knn.h"
#include "rnk/object_set.h"

namespace rnk {

// Balanced partition hierarchy with border distance matrices. Non-leaf
// matrices are square over the concatenation of the children's borders
// (child runs contiguous, per-child start offsets); leaf matrices are
// (contained vertex) x (own border). Every entry is a full-graph shortest
// distance, which makes min-plus assembly along tree paths exact: the border
// set of any node separates its interior from the rest of the graph.
class GTreeIndex {
public:
    struct Node {
        std::int32_t parent = -1;
        std::vector<std::uint32_t> children;
        std::vector<Vertex> borders;         // own borders, ascending
        std::vector<Vertex> leaf_vertices;   // leaves only, ascending
        std::vector<Vertex> union_borders;   // non-leaf: children's borders concatenated
        std::vector<std::uint32_t> child_border_start;  // per child, run start in union_borders
        std::vector<std::uint32_t> own_border_offsets;  // own borders' positions in union_borders
        std::vector<Distance> matrix;  // row-major; non-leaf |U|^2, leaf |V_i| x |B_i|

        bool is_leaf() const { return children.empty(); }
    };

    GTreeIndex(const Graph& g, std::uint32_t fanout, std::uint32_t tau);

    const Graph& graph() const { return *graph_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::uint32_t root() const { return 0; }
    std::uint32_t leaf_of(Vertex v) const { return leaf_of_[v]; }
    std::uint32_t leaf_row(Vertex v) const { return leaf_row_[v]; }
    std::uint32_t fanout() const { return fanout_; }
    std::uint32_t tau() const { return tau_; }
    std::size_t byte_size() const;

    Distance leaf_matrix_entry(std::uint32_t leaf, std::uint32_t row, std::uint32_t col) const {
        const Node& n = nodes_[leaf];
        return n.matrix[static_cast<std::size_t>(row) * n.borders.size() + col];
    }

    void save(std::ostream& out) const;
    static GTreeIndex load(std::istream& in, const Graph& g);

private:
    GTreeIndex(const Graph& g) : graph_(&g) {}

    const Graph* graph_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> leaf_of_;
    std::vector<std::uint32_t> leaf_row_;
    std::uint32_t fanout_ = 0;
    std::uint32_t tau_ = 0;
};

// Per-query assembly walk with materialization: source-to-border rows are
// cached per node, so revisited tree paths cost no new matrix sweeps.
class GTreeAssembly {
public:
    explicit GTreeAssembly(const GTreeIndex& idx);

    void reset_source(Vertex s);
    Vertex source() const { return source_; }

    // Exact network distance.
    Distance distance_to(Vertex t);
    // min over d(source, b) for the node's own borders; the node must not
    // contain the source.
    Distance distance_to_node(std::uint32_t node);
    // d(source, b) for every own border of `node` (computed on demand).
    std::span<const Distance> node_border_distances(std::uint32_t node);

    std::size_t sweeps() const { return sweeps_; }        // node rows materialized
    std::size_t path_cost() const { return path_cost_; }  // border-to-border additions

private:
    std::span<const Distance> union_row(std::uint32_t node);
    bool contains_source(std::uint32_t node) const;
    const std::vector<Distance>& leaf_local_distances();

    const GTreeIndex* idx_;
    Vertex source_ = kNoVertex;
    std::vector<std::vector<Distance>> to_union_;    // per node, indexed by union border pos
    std::vector<std::vector<Distance>> to_borders_;  // per node, indexed by own border pos
    std::vector<std::uint8_t> have_union_, have_borders_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint8_t> in_path_;
    std::vector<std::uint32_t> path_;  // leaf(source) up to the root
    std::vector<Distance> leaf_local_;  // within-leaf Dijkstra from the source
    bool have_leaf_local_ = false;
    std::size_t sweeps_ = 0;
    std::size_t path_cost_ = 0;
    DijkstraScratch leaf_scratch_;
};

// DistanceOracle adapter over GTreeAssembly (the materialized G-tree oracle).
class MGtreeOracle : public DistanceOracle {
public:
    explicit MGtreeOracle(const GTreeIndex& idx) : assembly_(idx) {}
    bool supports_materialization() const override { return true; }
    void reset_source(Vertex s) override { assembly_.reset_source(s); }
    Distance distance_to(Vertex t) override { return assembly_.distance_to(t); }
    const GTreeAssembly& assembly() const { return assembly_; }

private:
    GTreeAssembly assembly_;
};

// Children containing at least one object, per node; object lists per leaf.
struct OccurrenceList {
    std::vector<std::vector<std::uint32_t>> occupied_children;
    std::vector<std::vector<Vertex>> leaf_objects;  // ascending, empty for non-leaves
    std::vector<std::uint8_t> occupied;
    std::size_t total_objects = 0;

    std::size_t byte_size() const;
};

OccurrenceList build_occurrence_list(const GTreeIndex& idx, const ObjectSet& objects);

struct GtreeStats {
    std::size_t leaf_settled = 0;
    std::size_t path_cost = 0;
    std::size_t sweeps = 0;
};

// Hierarchy traversal kNN. With improved_leaf_search the occupied source
// leaf is searched by a Dijkstra that stops after the first k objects,
// jumping between borders through the leaf matrix; otherwise every leaf
// object is resolved by the exhaustive border-minimum scan.
KnnResult knn_gtree(Vertex q, std::size_t k, const GTreeIndex& idx, const OccurrenceList& ol,
                    GtreeStats* stats = nullptr, bool improved_leaf_search = true);

}  // namespace rnk

#endif  // RNK_GTREE_H_

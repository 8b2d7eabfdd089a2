#ifndef RNK_ROAD_H_
#define RNK_ROAD_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rnk/graph.h"
#include "rnk/knn.h"
#include "rnk/object_set.h"

namespace rnk {

// Rnet hierarchy plus Route Overlay. The graph's edges are recursively
// partitioned into f Rnets per level for l levels (the root Rnet is the
// whole graph at level 0); an edge whose endpoints fall in different sibling
// Rnets is duplicated into both. Shortcuts between all border pairs of an
// Rnet carry within-Rnet shortest distances and live in one global weight
// array, row-major per (Rnet, border). Per vertex, the Route Overlay stores
// its shortcut tree: the Rnets it belongs to, nested by level, with leaf
// nodes carrying the vertex's plain edges of that leaf Rnet.
class RoadIndex {
public:
    struct Rnet {
        std::int32_t parent = -1;
        std::vector<std::uint32_t> children;
        std::uint32_t level = 0;
        std::vector<Vertex> vertices;  // V_R, ascending
        std::vector<Vertex> borders;   // B_R, ascending
        std::uint64_t sc_offset = 0;   // |B_R|^2 block in the shortcut array
    };
    struct TreeNode {
        std::uint32_t rnet = 0;
        std::uint32_t first_child = 0;  // into the global tree-node array
        std::uint32_t child_count = 0;
        std::int32_t border_row = -1;  // row of the vertex in the Rnet's shortcut block
        std::uint32_t edge_offset = 0;  // leaf nodes: vertex's edges in this Rnet
        std::uint32_t edge_count = 0;
    };

    // bottom_up computes non-leaf shortcuts from child shortcuts over a
    // reduced border graph; the direct variant runs a within-Rnet Dijkstra
    // per border at every level. Both produce identical weights.
    RoadIndex(const Graph& g, std::uint32_t fanout, std::uint32_t levels, bool bottom_up = true);

    const Graph& graph() const { return *graph_; }
    const std::vector<Rnet>& rnets() const { return rnets_; }
    std::uint32_t root() const { return 0; }
    std::uint32_t fanout() const { return fanout_; }
    std::uint32_t levels() const { return levels_; }
    const std::vector<Distance>& shortcut_weights() const { return shortcut_weights_; }
    Distance shortcut(std::uint32_t rnet, std::uint32_t row, std::uint32_t col) const {
        return shortcut_weights_[rnets_[rnet].sc_offset + static_cast<std::uint64_t>(row) * rnets_[rnet].borders.size() + col];
    }
    // top-level shortcut tree nodes of a vertex
    std::span<const TreeNode> tree_roots(Vertex v) const {
        return {tree_nodes_.data() + tree_first_[v], tree_count_[v]};
    }
    std::span<const TreeNode> tree_children(const TreeNode& n) const {
        return {tree_nodes_.data() + n.first_child, n.child_count};
    }
    std::span<const Vertex> leaf_edge_targets(const TreeNode& n) const {
        return {edge_targets_.data() + n.edge_offset, n.edge_count};
    }
    std::span<const Weight> leaf_edge_weights(const TreeNode& n) const {
        return {edge_weights_.data() + n.edge_offset, n.edge_count};
    }
    std::size_t byte_size() const;

    void save(std::ostream& out) const;
    static RoadIndex load(std::istream& in, const Graph& g);

private:
    explicit RoadIndex(const Graph& g) : graph_(&g) {}

    const Graph* graph_;
    std::uint32_t fanout_ = 0;
    std::uint32_t levels_ = 0;
    std::vector<Rnet> rnets_;
    std::vector<Distance> shortcut_weights_;
    std::vector<TreeNode> tree_nodes_;
    std::vector<std::uint32_t> tree_first_;
    std::vector<std::uint32_t> tree_count_;
    std::vector<Vertex> edge_targets_;
    std::vector<Weight> edge_weights_;
};

// Occupancy bits per Rnet and per vertex.
struct AssociationDirectory {
    std::vector<std::uint8_t> rnet_has_object;
    std::vector<std::uint8_t> vertex_is_object;
    std::size_t object_count = 0;

    std::size_t byte_size() const { return rnet_has_object.size() + vertex_is_object.size(); }
};

AssociationDirectory build_association_directory(const RoadIndex& idx, const ObjectSet& objects);

struct RoadStats {
    std::size_t settled = 0;
    std::size_t queue_inserts = 0;
    std::size_t vertices_bypassed = 0;   // sum of |V_R| - |B_R| over bypassed Rnets
    std::vector<Vertex> settled_order;   // every settled vertex, in settle order
};

// INE-style expansion where settling a vertex relaxes its shortcut tree:
// object-free Rnets are bypassed through their shortcuts, occupied ones are
// descended, leaves relax plain edges. visited_pruning skips shortcut
// targets that are already settled before enqueueing them.
KnnResult knn_road(Vertex q, std::size_t k, const RoadIndex& idx, const AssociationDirectory& ad,
                   RoadStats* stats = nullptr, bool visited_pruning = true);

}  // namespace rnk

#endif  // RNK_ROAD_H_

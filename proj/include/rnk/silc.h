#ifndef RNK_SILC_H_
#define RNK_SILC_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "rnk/graph.h"
#include "rnk/knn.h"
#include "rnk/object_set.h"
#include "rnk/rtree.h"

namespace rnk {

// Maximal same-color quadrant of one vertex's coloring, addressed by its
// first Morton cell and quadrant level (4^level cells) over a 2^16 x 2^16
// grid snapped to the coordinate bounding box. `color` is the first hop of
// every shortest path from the owner into the block (lowest-id hop under
// ties); lam_min/lam_max bound the ratio of network to Euclidean distance
// for the covered vertices, rounded outward so float precision can never
// violate the sandwich.
struct SilcBlock {
    std::uint32_t lo = 0;        // first cell of the quadrant
    Vertex color = kNoVertex;
    float lam_min = 0.0f;
    float lam_max = 0.0f;
    std::uint8_t level = 0;      // quadrant spans 4^level cells

    std::uint64_t begin() const { return lo; }
    std::uint64_t end() const { return static_cast<std::uint64_t>(lo) + (std::uint64_t{1} << (2 * level)); }
};

// Vertices a quadtree cannot separate (grid-cell collisions of differently
// colored vertices, or zero Euclidean distance): exact answers per vertex.
struct SilcException {
    Vertex vertex = kNoVertex;
    Vertex first_hop = kNoVertex;
    Distance distance = kInfDistance;
};

struct SilcBuildOptions {
    unsigned workers = 1;
    std::size_t memory_budget = std::size_t{8} << 30;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

// One colored quadtree per vertex (first hops plus lambda intervals) and a
// chain table for degree <= 2 vertices. Construction runs one full Dijkstra
// per vertex; per-vertex work is independent, so it fans out over `workers`
// threads with byte-identical output for any worker count.
class SilcIndex {
public:
    static constexpr std::uint32_t kNoChain = 0xffffffffu;
    struct ChainEntry {
        Vertex end[2] = {kNoVertex, kNoVertex};       // junction past each side
        Vertex toward[2] = {kNoVertex, kNoVertex};    // adjacent vertex per side
        Distance dist[2] = {0, 0};                    // accumulated weight to end
    };
    struct Lookup {
        bool exact = false;
        Distance distance = kInfDistance;  // set for exceptions
        Vertex first_hop = kNoVertex;
        double lam_min = 0.0;
        double lam_max = 0.0;
    };

    SilcIndex(const Graph& g, const CoordinateTable& coords, const SilcBuildOptions& options = {});

    const Graph& graph() const { return *graph_; }
    const CoordinateTable& coords() const { return *coords_; }
    std::span<const SilcBlock> blocks(Vertex s) const {
        return {blocks_.data() + block_first_[s], blocks_.data() + block_first_[s + 1]};
    }
    std::span<const SilcException> exceptions(Vertex s) const {
        return {exceptions_.data() + exception_first_[s], exceptions_.data() + exception_first_[s + 1]};
    }
    std::uint64_t morton_of(Vertex v) const { return morton_[v]; }
    // world-coordinate extent of a block's cell range
    Rect block_rect(const SilcBlock& b) const;
    // smallest lam_min over s's blocks and exception ratios; d_E * min_lambda
    // is an O(1) network distance lower bound from s
    double min_lambda(Vertex s) const { return min_lambda_[s]; }

    // resolves t in s's quadtree (s != t)
    Lookup lookup(Vertex s, Vertex t) const;
    Vertex next_hop(Vertex s, Vertex t) const { return lookup(s, t).first_hop; }

    std::uint32_t chain_of(Vertex v) const { return chain_id_[v]; }
    const ChainEntry& chain_entry(Vertex v) const { return chains_[v]; }

    std::size_t byte_size() const;
    void save(std::ostream& out) const;
    static SilcIndex load(std::istream& in, const Graph& g, const CoordinateTable& coords);

private:
    struct Unbuilt {};
    SilcIndex(const Graph& g, const CoordinateTable& coords, Unbuilt) : graph_(&g), coords_(&coords) {}

    void build_chains();

    const Graph* graph_;
    const CoordinateTable* coords_;
    double grid_min_x_ = 0.0, grid_min_y_ = 0.0, grid_cell_w_ = 1.0, grid_cell_h_ = 1.0;
    std::vector<std::uint64_t> morton_;
    std::vector<SilcBlock> blocks_;
    std::vector<std::uint64_t> block_first_;
    std::vector<SilcException> exceptions_;
    std::vector<std::uint64_t> exception_first_;
    std::vector<double> min_lambda_;
    std::vector<std::uint32_t> chain_id_;
    std::vector<ChainEntry> chains_;
};

// Progressively tightened bounds on d(source, target). v_n is the next
// intermediate shortest-path vertex whose quadtree the following refinement
// consults; d is the exact distance from the source to v_n.
struct DistanceInterval {
    Vertex target = kNoVertex;
    Vertex v_n = kNoVertex;
    Vertex prev = kNoVertex;
    Distance d = 0;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    Distance exact = kInfDistance;

    bool refined() const { return v_n == target; }
};

DistanceInterval make_interval(Vertex source, Vertex target);

// One refinement step: a single Morton-list lookup tightens the bounds and
// advances v_n one hop. Bounds never loosen; when v_n reaches the target the
// interval collapses to the exact distance.
void refine(const SilcIndex& idx, DistanceInterval& iv, std::size_t* lookups = nullptr);

// Same result, but hops along degree <= 2 chains are derived without
// lookups, and a chain not containing the target is jumped in one step.
void refine_with_chain(const SilcIndex& idx, DistanceInterval& iv, std::size_t* lookups = nullptr);

struct DisbrwStats {
    std::size_t refinements = 0;
    std::size_t lookups = 0;
    std::size_t node_intervals = 0;
    std::size_t cursor_pulls = 0;
};

// Best-first browse of the Object Hierarchy: node intervals from the
// intersecting source blocks, candidate objects interval-refined until the
// kth exact upper bound proves every remaining lower bound too large.
KnnResult knn_disbrw(Vertex q, std::size_t k, const SilcIndex& idx, const ObjectHierarchy& oh,
                     DisbrwStats* stats = nullptr, bool chain_refine = true);

// Object Hierarchy replaced by a suspended Euclidean NN cursor: candidates
// arrive in Euclidean order and the cursor front, scaled by the minimum
// lambda, bounds everything not yet seen.
KnnResult knn_db_enn(Vertex q, std::size_t k, const SilcIndex& idx, const RTree& rtree,
                     DisbrwStats* stats = nullptr, bool chain_refine = true);

}  // namespace rnk

#endif  // RNK_SILC_H_

#ifndef RNK_IER_H_
#define RNK_IER_H_

#include <memory>
#include <vector>

#include "rnk/graph.h"
#include "rnk/knn.h"
#include "rnk/object_set.h"
#include "rnk/rtree.h"

namespace rnk {

// Exact network-distance oracle with a materializable source: the framework
// calls reset_source(q) once, then distance_to(t) per candidate.
class DistanceOracle {
public:
    virtual ~DistanceOracle() = default;
    virtual bool supports_materialization() const { return false; }
    virtual void reset_source(Vertex s) = 0;
    virtual Distance distance_to(Vertex t) = 0;
};

// Deliberately naive baseline: a fresh point-to-point Dijkstra per call.
class DijkstraOracle : public DistanceOracle {
public:
    explicit DijkstraOracle(const Graph& g) : g_(g) {}
    void reset_source(Vertex s) override { source_ = s; }
    Distance distance_to(Vertex t) override { return dijkstra_distance(source_, t, g_, scratch_); }

private:
    const Graph& g_;
    Vertex source_ = 0;
    DijkstraScratch scratch_;
};

struct IerStats {
    std::size_t oracle_calls = 0;
    std::size_t false_hits = 0;  // oracle calls whose object missed the final result
};

// Incremental Euclidean restriction: pull Euclidean NN candidates from the
// R-tree, resolve network distances through the oracle, stop when the scaled
// Euclidean bound of the next candidate exceeds the kth candidate distance.
// lb_scale is 1 for distance-weighted graphs and 1/max_speed for travel-time
// graphs, so that lb_scale * d_E never exceeds the network distance.
KnnResult knn_ier(Vertex q, std::size_t k, DistanceOracle& oracle, const RTree& rtree,
                  const CoordinateTable& coords, double lb_scale, IerStats* stats = nullptr);

}  // namespace rnk

#endif  // RNK_IER_H_

#include "rnk/ier.h"

#include <algorithm>

namespace rnk {

KnnResult knn_ier(Vertex q, std::size_t k, DistanceOracle& oracle, const RTree& rtree,
                  const CoordinateTable& coords, double lb_scale, IerStats* stats) {
    oracle.reset_source(q);
    NNCursor cursor(rtree, {coords.x[q], coords.y[q]});
    CandidateHeap heap(std::min<std::size_t>(k, rtree.object_count()));
    std::vector<Vertex> called;
    Vertex object;
    double d_e;
    while (cursor.next(object, d_e)) {
        const double bound = d_e * lb_scale;
        // a bound equal to D_k can still hide an id tie at distance D_k
        if (heap.full() && bound > static_cast<double>(heap.d_k())) break;
        const Distance d = oracle.distance_to(object);
        called.push_back(object);
        heap.offer({object, d});
    }
    KnnResult result = heap.finalize();
    if (stats) {
        stats->oracle_calls = called.size();
        stats->false_hits = 0;
        for (Vertex v : called) {
            const bool kept = std::any_of(result.begin(), result.end(),
                                          [v](const KnnEntry& e) { return e.vertex == v; });
            if (!kept) ++stats->false_hits;
        }
    }
    return result;
}

}  // namespace rnk

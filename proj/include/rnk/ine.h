#ifndef RNK_INE_H_
#define RNK_INE_H_

#include "rnk/graph.h"
#include "rnk/knn.h"
#include "rnk/object_set.h"

namespace rnk {

struct IneStats {
    std::size_t settled = 0;
};

// Incremental network expansion: Dijkstra from q, collecting settled objects,
// stopping once no unsettled vertex can still reach the kth distance.
KnnResult knn_ine(Vertex q, std::size_t k, const Graph& g, const ObjectSet& objects,
                  DijkstraScratch& scratch, IneStats* stats = nullptr);

}  // namespace rnk

#endif  // RNK_INE_H_

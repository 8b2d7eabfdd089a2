#include "rnk/ine.h"

namespace rnk {

KnnResult knn_ine(Vertex q, std::size_t k, const Graph& g, const ObjectSet& objects,
                  DijkstraScratch& scratch, IneStats* stats) {
    const std::size_t n = g.vertex_count();
    const std::size_t want = std::min(k, objects.size());
    scratch.prepare(n);
    scratch.settled.reset();
    scratch.queue.push(0, q);
    std::vector<Vertex> touched{q};
    scratch.dist[q] = 0;

    std::vector<KnnEntry> candidates;
    Distance d_k = kInfDistance;
    std::size_t settled = 0;
    while (!scratch.queue.empty()) {
        const auto [d, id] = scratch.queue.pop_min();
        // once k objects are settled, only distance ties can still matter
        if (candidates.size() >= want && d > d_k) break;
        const Vertex v = static_cast<Vertex>(id);
        if (scratch.settled.query(v)) continue;
        scratch.settled.mark(v);
        ++settled;
        if (objects.contains(v)) {
            candidates.push_back({v, d});
            if (candidates.size() == want) d_k = d;
        }
        const auto nbrs = g.neighbors(v);
        const auto ws = g.weights(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const Vertex u = nbrs[i];
            const Distance nd = d + ws[i];
            if (nd < scratch.dist[u]) {
                if (scratch.dist[u] == kInfDistance) touched.push_back(u);
                scratch.dist[u] = nd;
                scratch.queue.push(nd, u);
            }
        }
    }
    for (Vertex v : touched) scratch.dist[v] = kInfDistance;
    scratch.queue.clear();
    if (stats) stats->settled = settled;
    return finalize_candidates(candidates, k);
}

}  // namespace rnk

#ifndef RNK_SYNTH_H_
#define RNK_SYNTH_H_

#include <cstdint>

#include "rnk/graph.h"

namespace rnk {

// Road-network-shaped synthetic instance: a jittered grid with the exact
// requested vertex and undirected edge counts, extra edges drawn as random
// diagonals. Distance weights are rounded scaled Euclidean lengths; time
// weights divide each edge's length by one of a few speed classes, so both
// graphs share the topology and every Euclidean lower bound stays valid.
struct SyntheticNetwork {
    Graph distance_graph;
    Graph time_graph;
    CoordinateTable coords;
};

SyntheticNetwork make_synthetic_network(std::size_t vertices, std::size_t edges, std::uint64_t seed);

}  // namespace rnk

#endif  // RNK_SYNTH_H_

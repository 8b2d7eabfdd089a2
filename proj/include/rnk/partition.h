#ifndef RNK_PARTITION_H_
#define RNK_PARTITION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rnk/graph.h"
#include "rnk/types.h"

namespace rnk {

// Splits the induced subgraph over `vertices` into `parts` balanced groups
// with a small edge cut, by recursive multilevel bisection (heavy-edge
// matching, greedy growth at the coarsest level, boundary refinement by
// gain). Returns one group id in [0, parts) per input vertex, in input
// order. Deterministic. Every group is nonempty whenever
// |vertices| >= parts. `parts` must be a power of two.
std::vector<std::uint32_t> partition_vertices(const Graph& g, std::span<const Vertex> vertices,
                                              std::uint32_t parts);

}  // namespace rnk

#endif  // RNK_PARTITION_H_

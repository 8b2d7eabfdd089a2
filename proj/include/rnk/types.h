#ifndef RNK_TYPES_H_
#define RNK_TYPES_H_

#include <cstdint>
#include <limits>

namespace rnk {

using Vertex = std::uint32_t;
using Weight = std::uint64_t;
using Distance = std::uint64_t;

constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();
constexpr Distance kInfDistance = std::numeric_limits<Distance>::max();

enum class WeightKind : std::uint8_t { kDistance = 0, kTime = 1 };

struct KnnEntry {
    Vertex vertex;
    Distance distance;

    friend bool operator==(const KnnEntry&, const KnnEntry&) = default;
};

}  // namespace rnk

#endif  // RNK_TYPES_H_

#ifndef RNK_RNG_H_
#define RNK_RNG_H_

#include <cstdint>
#include <limits>
#include <random>

namespace rnk {

// Uniform integer in [lo, hi] by rejection, so generated streams depend only
// on the mt19937_64 engine and stay identical across standard libraries.
inline std::uint64_t rand_range(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / span * span;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return lo + r % span;
}

// Uniform double in [0, 1).
inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rnk

#endif  // RNK_RNG_H_

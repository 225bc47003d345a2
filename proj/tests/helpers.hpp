#pragma once

#include <cstdint>
#include <random>

namespace testutil {

// Platform-independent uniform [0, 1) draw; std::uniform_real_distribution is
// implementation-defined, which would make failures non-reproducible.
inline double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform(rng) * (hi - lo + 1));
}

}  // namespace testutil

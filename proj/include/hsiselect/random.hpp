#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hsi {

// All randomness in the project flows through these three helpers on top of
// std::mt19937_64, whose output stream is pinned by the standard. The
// distribution adapters from <random> are implementation-defined and would
// break byte-identical outputs across toolchains, so we avoid them.

inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    // rejection sampling: discard the biased low region of the 2^64 range
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded_rand(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

inline double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
}

} // namespace hsi

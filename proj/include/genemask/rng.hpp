#pragma once

#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

#include "genemask/error.hpp"

namespace genemask {

// 64-bit FNV-1a. Used for seed derivation and count-table digests, so the
// exact constants are load-bearing: changing them invalidates saved artifacts.
// The raw-buffer form carries its own name: were it an fnv1a64 overload, a
// call like fnv1a64(text, state) would bind the state to the size parameter.
inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t size,
                                   std::uint64_t state = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = state;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t state = 0xcbf29ce484222325ull) {
    return fnv1a64_bytes(s.data(), s.size(), state);
}

// SplitMix64. Chosen over <random> engines because its output is fixed by
// the algorithm, not by the standard library, so artifacts are byte-identical
// across compilers and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased draw from [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw IndexError("below(0) is empty");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Inclusive range draw.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        if (lo > hi) throw IndexError("range(lo, hi) with lo > hi");
        return lo + below(hi - lo + 1);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Stable per-item seed: hash the root seed's little-endian bytes, then the
// item id. Every parallel worker that handles the same item gets the same
// stream, which is what makes worker count invisible in the output.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view id) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(root >> (8 * i));
    return fnv1a64(id, fnv1a64_bytes(bytes, 8));
}

// First m positions of a uniformly random permutation of [0, n), via partial
// Fisher-Yates. Order of the result is the draw order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m,
                                                           SplitMix64& rng) {
    if (m > n) throw IndexError("cannot sample " + std::to_string(m) + " of " +
                                std::to_string(n) + " without replacement");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
}

} // namespace genemask

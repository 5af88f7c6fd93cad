#pragma once

#include "klab/prng.hpp"
#include "klab/ratio.hpp"

#include <cstdint>

namespace klab::test {

// Seeded generators for property tests. Every test owns its own stream.
inline Prng gen(std::uint64_t test_id) { return Prng::derive(0x5EEDULL, test_id); }

// Uniform p/q with 1 <= q <= max_den and |p/q| <= bound.
inline Ratio random_ratio(Prng& rng, std::int64_t max_den, std::int64_t bound = 1) {
    const std::int64_t q = rng.range(1, max_den);
    return Ratio(BigInt(static_cast<long>(rng.range(-bound * q, bound * q))), BigInt(static_cast<long>(q)));
}

// Uniform p/q in [0, 1).
inline Ratio random_unit(Prng& rng, std::int64_t max_den) {
    const std::int64_t q = rng.range(1, max_den);
    return Ratio(BigInt(static_cast<long>(rng.range(0, q - 1))), BigInt(static_cast<long>(q)));
}

inline Vec2Q random_unit_vec(Prng& rng, std::int64_t max_den) { return {random_unit(rng, max_den), random_unit(rng, max_den)}; }

inline Ratio R(long p, long q = 1) { return Ratio(BigInt(p), BigInt(q)); }

} // namespace klab::test

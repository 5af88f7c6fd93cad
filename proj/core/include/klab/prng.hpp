#pragma once

#include <cstdint>
#include <vector>

namespace klab {

// SplitMix64. State update: s += 0x9E3779B97F4A7C15. Output: the standard
// SplitMix64 finalizer applied to the new state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31)
// Pure 64-bit integer arithmetic, so streams are identical on every platform.
class Prng {
public:
    explicit Prng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    // Uniform on [0, n), n >= 1, by rejection of the low 2^64 mod n values.
    std::uint64_t below(std::uint64_t n);
    // Uniform on [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi);

    std::uint64_t state() const { return state_; }

    // Independent stream for (seed, stream): seeds a fresh generator with
    // mix(seed) ^ mix(stream + 0x632BE59BD9B4E019), mix = SplitMix64 finalizer.
    static Prng derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::uint64_t state_;
};

std::uint64_t splitmix_mix(std::uint64_t z);

// `count` distinct integers from [lo, hi] (Floyd's algorithm), ascending.
std::vector<std::int64_t> sample_without_replacement(std::int64_t lo, std::int64_t hi,
                                                     std::int64_t count, Prng& rng);

} // namespace klab

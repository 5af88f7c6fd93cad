#include "klab/prng.hpp"

#include "klab/errors.hpp"

#include <algorithm>
#include <set>

namespace klab {

std::uint64_t splitmix_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t Prng::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix_mix(state_);
}

std::uint64_t Prng::below(std::uint64_t n) {
    if (n == 0) throw ValidityError("Prng::below(0)");
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t x = next();
        if (x >= threshold) return x % n;
    }
}

std::int64_t Prng::range(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw ValidityError("Prng::range: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    return lo + static_cast<std::int64_t>(below(span));
}

Prng Prng::derive(std::uint64_t seed, std::uint64_t stream) {
    return Prng(splitmix_mix(seed) ^ splitmix_mix(stream + 0x632BE59BD9B4E019ULL));
}

std::vector<std::int64_t> sample_without_replacement(std::int64_t lo, std::int64_t hi,
                                                     std::int64_t count, Prng& rng) {
    std::int64_t n = hi - lo + 1;
    if (count < 0 || count > n) throw ValidityError("sample_without_replacement: bad count");
    std::set<std::int64_t> chosen;
    for (std::int64_t j = n - count; j < n; ++j) {
        std::int64_t t = rng.range(0, j);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::int64_t> out;
    out.reserve(chosen.size());
    for (auto v : chosen) out.push_back(lo + v);
    return out;
}

} // namespace klab

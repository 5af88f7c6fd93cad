#pragma once

#include "klab/ratio.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace klab {

// Exact rational stand-in for an irrational shift gamma in R^2.
//
// Contract: every consumer rejects denominators, indices and moduli above
// `validity`. Each constructor guarantees den(gamma_i) > validity^4.
// `exact` marks a deliberately rational parameter (e.g. gamma = 0) that is
// not standing in for anything; the V^4 rule does not apply to it.
struct IrrationalSurrogate {
    Vec2Q value;
    std::int64_t validity = 0;
    std::string description;
    std::string family;
    bool exact = false;

    // Throws ValidityError naming `what` when n exceeds the validity bound.
    void require_within(std::string_view what, std::int64_t n) const;
    void require_within(std::string_view what, const BigInt& n) const;
    bool diagonal() const { return value.x == value.y; }
};

// Coefficients [a0; a1, ..., an] with a1..an repeated periodically.
std::vector<std::int64_t> expand_cf(const std::vector<std::int64_t>& cf, std::size_t length);

// Smallest depth whose convergent denominator exceeds validity^4.
int min_quadratic_depth(const std::vector<std::int64_t>& cf, std::int64_t validity);

// depth-th convergent (depth 0 is a0/1) used for both coordinates.
IrrationalSurrogate surrogate_quadratic(const std::vector<std::int64_t>& cf, int depth,
                                        std::int64_t validity);
// Two different quadratic irrationals, each at its minimal valid depth.
IrrationalSurrogate surrogate_quadratic_pair(const std::vector<std::int64_t>& cf_x,
                                             const std::vector<std::int64_t>& cf_y,
                                             std::int64_t validity);

// Component i = sum_{n=1..terms} base^(-n! - offsets[i]).
IrrationalSurrogate surrogate_liouville(std::int64_t base, int terms,
                                        std::array<std::int64_t, 2> offsets,
                                        std::int64_t validity);

// Exact rational parameter, exempt from the V^4 rule.
IrrationalSurrogate surrogate_rational(const Vec2Q& value, std::string label);

// Named configurations used by the harness:
//   quad-sqrt2      (sqrt2-1, sqrt2-1)
//   quad-pair       (sqrt2-1, golden-1)
//   golden          (golden-1, golden-1)
//   liouville       base 2, 6 terms, offsets (0,1)
//   liouville-diag  base 2, 6 terms, offsets (0,0)
//   zero            exact (0,0)
//   rational:x,y    exact (x,y) with x, y written p/q
inline constexpr std::int64_t kDefaultValidity = std::int64_t{1} << 40;
IrrationalSurrogate surrogate_preset(std::string_view name, std::int64_t validity = kDefaultValidity);
std::vector<std::string> surrogate_family_names();

} // namespace klab

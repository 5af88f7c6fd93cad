#pragma once

#include "klab/approx.hpp"
#include "klab/measure.hpp"
#include "klab/ratio.hpp"
#include "klab/surrogate.hpp"

#include <cstdint>
#include <optional>

namespace klab {

struct BohrQuery {
    IrrationalSurrogate gamma;
    std::int64_t N = 0;
    Ratio eps;
    Vec2Q beta{};
};

// #{1 <= h <= N : ||h gamma + beta|| < eps}.
std::int64_t bohr_count(const BohrQuery& qy);
// Same over lo <= h <= hi.
std::int64_t bohr_count_range(const IrrationalSurrogate& gamma, const Vec2Q& beta, std::int64_t lo,
                              std::int64_t hi, const Ratio& eps);
// Reference: one exact rational evaluation per h.
std::int64_t bohr_count_exact(const BohrQuery& qy);

// sum_{0 <= h < b} 1[||h a/b + beta|| < eps]; asserts <= 8 eps b + 1.
std::int64_t rational_orbit_count(const IVec2& a, std::int64_t b, const Vec2Q& beta, const Ratio& eps);
// sum_{1 <= h <= N} 1[||h a/b|| < eps]; asserts (8 eps b + 1) 2N/b for N >= b and
// min(N, 8 eps b) for N < b.
std::int64_t partial_orbit_count(const IVec2& a, std::int64_t b, std::int64_t N, const Ratio& eps);
Ratio partial_orbit_bound(std::int64_t b, std::int64_t N, const Ratio& eps);

// sum_{1 <= m < 1/||alpha||} 1[||m alpha + beta|| < eps]; asserts <= 2 eps/||alpha|| + 1.
std::int64_t once_around_count(const Vec2Q& alpha, const Vec2Q& beta, const Ratio& eps);

// sigma, tau, rho, omega with the constants attached to the ">>" indicators.
struct BohrParams {
    Ratio sigma{2, 3};
    Ratio tau{5, 6};
    Ratio rho{1, 6};
    Ratio omega{1, 6};
    Ratio C1{1};
    Ratio C2{1};

    // sigma in (0,1), sigma < tau < 1, 0 < rho < sigma/2, omega > 0.
    void validate() const;
};

struct CaseContext {
    long level = 0;
    std::int64_t B = 1;
    std::optional<std::int64_t> b;
    BohrParams params;
    Ratio D;
    Ratio Dhat;
    std::int64_t h = 1;
    Ratio norm_bgamma;  // ||b gamma||, used only when b is present
};

// The two-branch indicator 1_C evaluated exactly.
bool indicator_C(const CaseContext& ctx);

struct AdhocInstance {
    Bullet bullet = Bullet::K;
    long level = 0;
    std::int64_t N = 1;
    Ratio D;          // < 1
    Ratio R_over_Q{1};
};

struct AdhocResult {
    AdhocInstance inst;
    std::int64_t B = 1;
    std::int64_t b = 0;        // 0 when the level has no Dirichlet approximation
    bool case_one = true;      // B <= max(2^level D, 2^(sigma level))
    std::int64_t h_start = 0;  // 1_C(h) = 1 exactly for h >= h_start; 0 means never
    std::int64_t hits = 0;
    Ratio lhs;
    Ratio D_omega_lower;       // D^omega lies in [lower, lower + 2^-63)
    bool ind_k = false;        // 1[D^omega >= C1 R/Q] 1[bullet = k]
    bool ind_l = false;        // 1[D >= C2] 1[bullet = l]
    Ratio bound_lower;         // lower enclosure of D^omega + indicators
    Ratio ratio_upper;         // lhs / bound_lower, an upper enclosure of lhs / bound
};

// (1/N) sum_{h <= N} 1[||h gamma|| < D] 1_C(h) and the bound terms.
AdhocResult adhoc_bound_eval(const IrrationalSurrogate& gamma, const ApproxTable& table,
                             const AdhocInstance& inst, const BohrParams& params);

// Evaluates the same sum with indicator_C per h (reference for the threshold form).
std::int64_t adhoc_hits_reference(const IrrationalSurrogate& gamma, const ApproxTable& table,
                                  const AdhocInstance& inst, const BohrParams& params);

// sum over m, s of 1[mb + s <= N] 1[||m (b gamma) + s (a/b) + s (gamma - a/b)|| < eps],
// 0 <= m <= N/b, 1 <= s <= b.
std::int64_t decomposed_count(const IrrationalSurrogate& gamma, std::int64_t b, const IVec2& a,
                              std::int64_t N, const Ratio& eps);

struct TriangleReport {
    std::int64_t checked = 0;
    std::int64_t violations = 0;
};

// Every h <= N with ||h gamma|| < D and Dhat(h) <= D^tau must satisfy ||h A/B|| < 2 D^tau.
TriangleReport triangle_transfer(const IrrationalSurrogate& gamma, const FirstKindApprox& fk,
                                 std::int64_t N, const Ratio& D, const Ratio& tau);

} // namespace klab

#pragma once

#include "klab/approx.hpp"
#include "klab/ratio.hpp"
#include "klab/shiftred.hpp"
#include "klab/surrogate.hpp"

#include <cstdint>
#include <vector>

namespace klab {

enum class Bullet { K, L };

const char* bullet_name(Bullet b);

// Quantities attached to a pair r < q.
struct PairGeometry {
    std::int64_t q = 0, r = 0, g = 0, qp = 0, rp = 0, h = 0;
    Ratio psi_q, psi_r;
    Ratio Delta;  // max(2 psi(q)/q, 2 psi(r)/r)
    Ratio delta;  // min of the same
    Ratio D;      // Delta * q r / g
    Bullet bullet = Bullet::L;
    long level_k = 0;  // dyadic level of psi(q)
    long level_l = 0;  // dyadic level of psi(r)
    long bullet_level = 0;
    std::int64_t B_bullet = 1;
    IVec2 A_bullet{0, 0};
    Ratio Dhat;  // max(D, h |gamma - A/B|) at the bullet level

    bool divides() const { return q % r == 0; }
};

PairGeometry pair_geometry(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const ApproxTable& table);
PairGeometry pair_geometry(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const Ratio& sigma);

struct OverlapResult {
    Ratio measure;
    std::int64_t pair_count = -1;   // center pairs at max-norm torus distance < Delta; -1 if not computed
    std::int64_t value_count = -1;  // distinct center offsets among those pairs; -1 if not computed
    PairGeometry geometry;
};

// |centers| (2 radius)^2.
Ratio measure_single(const SquareFamily& fam);
// 4 (psi(q)/q)^2 |S_q| (primed) or 4 psi(q)^2 (unprimed), without building the family.
Ratio measure_single(std::int64_t q, const ApproxFunction& psi, const ApproxTable& table, bool primed);

// Pairwise sweep over per-axis integer tables. Delta is taken from the two radii.
OverlapResult overlap_bruteforce(const SquareFamily& a, const SquareFamily& b);
OverlapResult overlap_bruteforce(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                                 const IrrationalSurrogate& gamma, const ApproxTable& table, bool primed);

// SmallD computes the counts only when D < 1.
enum class Detail { Full, MeasureOnly, SmallD };

// Closed form: Moebius inversion over d | pi_q, e | pi_r and arithmetic
// progression sums of the per-axis overlap profile along hgamma + Z.
OverlapResult overlap_fast(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const ApproxTable& table, bool primed,
                           Detail detail = Detail::Full);
OverlapResult overlap_fast(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const Ratio& sigma, bool primed,
                           Detail detail = Detail::Full);

// Unprimed only: product over axes of the 1-D measure of the intersection
// of the two interval unions, each computed by sorting and merging.
Ratio overlap_product_1d(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                         const IrrationalSurrogate& gamma);

inline constexpr std::int64_t kUnionBudget = 5'000'000;

// Exact area of the union on the torus by an x-sweep with a y segment tree.
Ratio union_measure(const std::vector<SquareFamily>& fams, std::int64_t budget = kUnionBudget);

} // namespace klab

#pragma once

#include "klab/approx.hpp"
#include "klab/prng.hpp"
#include "klab/ratio.hpp"
#include "klab/surrogate.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace klab {

// Finitely supported psi with exact values in (0, 1/2].
class ApproxFunction {
public:
    void set(std::int64_t q, const Ratio& value);
    bool contains(std::int64_t q) const { return values_.count(q) != 0; }
    const Ratio& at(std::int64_t q) const;
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    // Supported q in (lo, hi], ascending.
    std::vector<std::int64_t> in_range(std::int64_t lo, std::int64_t hi) const;
    std::vector<std::int64_t> support() const;
    std::int64_t max_q() const;
    const std::map<std::int64_t, Ratio>& values() const { return values_; }

private:
    std::map<std::int64_t, Ratio> values_;
};

// The k >= 2 with 2^-k < psi <= 2^(-k+1).
long dyadic_level(const Ratio& psi);

// floor(2^P q^-s) / 2^P, capped at 1/2. s = num/den >= 0.
Ratio power_law_value(std::int64_t q, const Ratio& s, long precision_bits = 20);

ApproxFunction psi_constant(const std::vector<std::int64_t>& support, const Ratio& value);
ApproxFunction psi_power_law(const std::vector<std::int64_t>& support, const Ratio& s,
                             long precision_bits = 20);
// For q in (2^a, 2^(a+1)]: psi = (2^8 + t) / 2^(8+k), t uniform in [1, 256],
// k uniform in [2, a + 8].
ApproxFunction psi_sparse_levels(const std::vector<std::int64_t>& support, Prng& rng);

// Block (2^a, 2^(a+1)]: `count` uniform distinct points plus the lattice
// points c * 2^(a-3), c = 9..16 (for a >= 3).
std::vector<std::int64_t> block_support(long a, std::int64_t count, Prng& rng);

// Product of primes dividing q but not M.
std::int64_t pi_q(std::int64_t q, std::int64_t M);
std::int64_t pi_q(std::int64_t q, const ShiftContext& ctx);

// S_q = {u in [0,q)^2 : gcd(M u1 + m1, M u2 + m2, M q) = 1}, by enumeration.
struct ResidueSet {
    std::int64_t q = 1;
    std::int64_t M = 1;
    IVec2 m{0, 0};
    long k = 0;
    Branch branch = Branch::FirstKind;
    std::vector<std::uint8_t> member;  // row-major, index u1 * q + u2
    std::int64_t count = 0;

    bool contains(std::int64_t u1, std::int64_t u2) const {
        return member[static_cast<std::size_t>(u1 * q + u2)] != 0;
    }
    std::vector<IVec2> members() const;
};

ResidueSet residue_set(std::int64_t q, std::int64_t M, const IVec2& m);
ResidueSet residue_set(std::int64_t q, const ShiftContext& ctx);

// q^2 prod_{p | pi_q} (1 - p^-2).
BigInt cardinality_formula(std::int64_t q, std::int64_t M);
BigInt cardinality_formula(std::int64_t q, const ShiftContext& ctx);

// q^2 prod_{p <= q prime} (1 - p^-2), a lower bound for every |S_q|.
Ratio density_floor(std::int64_t q);

// #{u in S_q : u_i <= q y_i}, y in [0,1]^2, by enumeration.
std::int64_t box_count(const ResidueSet& rs, const Vec2Q& y);
// Same count by Moebius inversion over d | pi_q and arithmetic progressions.
std::int64_t box_count_mobius(std::int64_t q, std::int64_t M, const IVec2& m, const Vec2Q& y);
// Counts at y = (i/n, j/n), 0 <= i, j <= n, from a 2-D prefix sum; entry [i][j].
std::vector<std::vector<std::int64_t>> box_count_grid(const ResidueSet& rs, std::int64_t n);

struct SquareFamily {
    std::int64_t q = 1;
    Ratio radius;
    bool primed = false;
    std::vector<IVec2> residues;
    std::vector<Vec2Q> centers;  // (u + gamma)/q mod 1
};

SquareFamily square_family(std::int64_t q, const ApproxFunction& psi, const IrrationalSurrogate& gamma,
                           const ApproxTable& table, bool primed);
SquareFamily square_family(std::int64_t q, const ApproxFunction& psi, const IrrationalSurrogate& gamma,
                           const Ratio& sigma, bool primed);

} // namespace klab

#include "klab/approx.hpp"
#include "klab/arith.hpp"
#include "klab/errors.hpp"
#include "klab/measure.hpp"
#include "klab/shiftred.hpp"
#include "klab/surrogate.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <set>

using namespace klab;
using klab::test::R;

namespace {

// Jordan totient J_2 restricted to primes not dividing M, computed from the factorization.
BigInt j2_restricted(std::int64_t q, std::int64_t M) {
    BigInt num = BigInt(static_cast<long>(q)) * q, den = 1;
    for (std::int64_t p = 2; p <= q; ++p) {
        bool prime = true;
        for (std::int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) { prime = false; break; }
        if (!prime || q % p != 0 || M % p == 0) continue;
        num *= p * p - 1;
        den *= p * p;
    }
    return num / den;
}

} // namespace

TEST(DyadicLevel, Examples) {
    EXPECT_EQ(dyadic_level(R(3, 10)), 2);
    EXPECT_EQ(dyadic_level(R(1, 2)), 2);
    // 2^-11 < 2^-10 <= 2^-10 puts 1/1024 at level 11
    EXPECT_EQ(dyadic_level(R(1, 1024)), 11);
    EXPECT_THROW(dyadic_level(R(0)), ValidityError);
    EXPECT_THROW(dyadic_level(R(3, 5)), ValidityError);
}

TEST(DyadicLevel, DefiningInequality) {
    Prng rng = klab::test::gen(20);
    for (int i = 0; i < 3000; ++i) {
        Ratio psi = Ratio(BigInt(static_cast<long>(rng.range(1, 1'000'000))), BigInt(static_cast<long>(rng.range(2'000'000, 1'000'000'000))));
        long k = dyadic_level(psi);
        EXPECT_GE(k, 2);
        EXPECT_LT(pow2(-k), psi);
        EXPECT_LE(psi, pow2(-k + 1));
    }
}

TEST(PiQ, Examples) {
    EXPECT_EQ(pi_q(12, 2), 3);
    EXPECT_EQ(pi_q(7, 1), 7);
    EXPECT_EQ(pi_q(1, 5), 1);
    EXPECT_EQ(pi_q(360, 1), 30);
}

TEST(ResidueSet, Examples) {
    ResidueSet s6 = residue_set(6, 1, {0, 0});
    EXPECT_EQ(s6.count, 24);
    EXPECT_EQ(cardinality_formula(6, 1), 24);
    ResidueSet s1 = residue_set(1, 7, {3, 5});
    EXPECT_EQ(s1.members(), (std::vector<IVec2>{{0, 0}}));
    ResidueSet s4 = residue_set(4, 2, {1, 1});
    EXPECT_EQ(s4.count, 16);
    EXPECT_EQ(cardinality_formula(4, 2), 16);
    EXPECT_EQ(cardinality_formula(7, 1), 48);
    EXPECT_THROW(residue_set(0, 1, {0, 0}), ValidityError);
}

TEST(ResidueSet, MembershipDefinition) {
    Prng rng = klab::test::gen(21);
    for (int t = 0; t < 60; ++t) {
        const std::int64_t q = rng.range(1, 40), M = rng.range(1, 60);
        IVec2 m{rng.range(0, M - 1), rng.range(0, M - 1)};
        if (std::gcd(std::gcd(m[0], m[1]), M) != 1) continue;
        ResidueSet rs = residue_set(q, M, m);
        std::int64_t count = 0;
        for (std::int64_t u1 = 0; u1 < q; ++u1)
            for (std::int64_t u2 = 0; u2 < q; ++u2) {
                const bool in = std::gcd(std::gcd(M * u1 + m[0], M * u2 + m[1]), M * q) == 1;
                EXPECT_EQ(rs.contains(u1, u2), in);
                count += in;
            }
        EXPECT_EQ(rs.count, count);
    }
}

// Two routes to |S_q|: enumeration against the product formula and an independent Jordan totient.
TEST(Cardinality, FormulaMatchesEnumerationAndJordan) {
    for (const auto& name : {"quad-sqrt2", "quad-pair", "liouville"}) {
        ApproxTable t(surrogate_preset(name), R(2, 3));
        t.warm(16);
        std::set<std::pair<std::int64_t, IVec2>> seen;
        for (long k = 2; k <= 16; ++k) {
            const ShiftContext& c = t.at(k);
            if (!seen.insert({c.modulus(), c.shift()}).second) continue;
            for (std::int64_t q = 1; q <= 120; ++q) {
                ResidueSet rs = residue_set(q, c);
                EXPECT_EQ(cardinality_formula(q, c), rs.count) << name << " k=" << k << " q=" << q;
                EXPECT_EQ(j2_restricted(q, c.modulus()), rs.count);
                EXPECT_GE(5 * rs.count, 3 * q * q);
                EXPECT_GE(Ratio(rs.count), density_floor(q));
            }
        }
    }
}

TEST(BoxCount, Examples) {
    ResidueSet s6 = residue_set(6, 1, {0, 0});
    EXPECT_EQ(box_count(s6, {R(1), R(1)}), s6.count);
    EXPECT_EQ(box_count(s6, {R(0), R(0)}), 0);
    EXPECT_EQ(box_count(s6, {R(1, 2), R(1, 2)}), 9);
}

// Enumeration and Moebius inversion are independent routes to the same count.
TEST(BoxCount, EnumerationMatchesMobius) {
    Prng rng = klab::test::gen(22);
    for (int t = 0; t < 400; ++t) {
        const std::int64_t q = rng.range(1, 90), M = rng.range(1, 40);
        IVec2 m{rng.range(0, M - 1), rng.range(0, M - 1)};
        if (std::gcd(std::gcd(m[0], m[1]), M) != 1) continue;
        ResidueSet rs = residue_set(q, M, m);
        Vec2Q y = klab::test::random_unit_vec(rng, 50);
        EXPECT_EQ(box_count(rs, y), box_count_mobius(q, M, m, y)) << q << " " << M << " " << y.x << "," << y.y;
    }
}

TEST(BoxCount, GridMatchesPointQueries) {
    ResidueSet rs = residue_set(30, 12, {5, 7});
    auto grid = box_count_grid(rs, 8);
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j)
            EXPECT_EQ(grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], box_count(rs, {R(i, 8), R(j, 8)}));
}

TEST(SquareFamily, Examples) {
    IrrationalSurrogate zero = surrogate_preset("zero");
    ApproxFunction psi;
    psi.set(1, R(1, 2));
    psi.set(5, R(1, 5));
    psi.set(6, R(1, 2));
    SquareFamily f1 = square_family(1, psi, zero, R(2, 3), false);
    ASSERT_EQ(f1.centers.size(), 1u);
    EXPECT_EQ(f1.radius, R(1, 2));
    EXPECT_EQ(measure_single(f1), R(1));
    SquareFamily f5 = square_family(5, psi, zero, R(2, 3), false);
    EXPECT_EQ(f5.centers.size(), 25u);
    EXPECT_EQ(measure_single(f5), R(4, 25));
    EXPECT_EQ(union_measure({f5}), R(4, 25));  // disjoint squares
    SquareFamily f6 = square_family(6, psi, zero, R(2, 3), true);
    EXPECT_EQ(f6.centers.size(), 24u);
    EXPECT_EQ(measure_single(f6), R(2, 3));
    EXPECT_THROW(square_family(7, psi, zero, R(2, 3), false), ValidityError);
}

TEST(SquareFamily, CentersAreShiftedResidues) {
    IrrationalSurrogate g = surrogate_preset("quad-pair");
    ApproxFunction psi;
    psi.set(9, R(1, 16));
    SquareFamily f = square_family(9, psi, g, R(2, 3), true);
    for (std::size_t i = 0; i < f.centers.size(); ++i) {
        const Vec2Q c = f.centers[i];
        EXPECT_EQ(mod1({R(9) * c.x - g.value.x, R(9) * c.y - g.value.y}), (Vec2Q{R(0), R(0)}));
    }
}

TEST(Psi, Generators) {
    Prng rng = klab::test::gen(23);
    auto pts = block_support(6, 20, rng);
    EXPECT_GE(pts.size(), 20u);
    EXPECT_LE(pts.size(), 28u);  // lattice points c 2^3, c = 9..16, merged with the sample
    for (auto q : pts) {
        EXPECT_GT(q, 64);
        EXPECT_LE(q, 128);
    }
    ApproxFunction p = psi_power_law({2, 3, 100}, R(1, 2));
    EXPECT_LE(p.at(100), R(1, 10));
    EXPECT_GT(p.at(100), R(1, 10) - pow2(-20));
    ApproxFunction s = psi_sparse_levels(pts, rng);
    for (auto q : pts) {
        EXPECT_GT(s.at(q), R(0));
        EXPECT_LE(s.at(q), R(1, 2));
    }
    EXPECT_EQ(power_law_value(4, R(1, 2)), R(1, 2));
}

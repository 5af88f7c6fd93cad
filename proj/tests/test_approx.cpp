#include "klab/approx.hpp"
#include "klab/arith.hpp"
#include "klab/errors.hpp"
#include "klab/surrogate.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace klab;
using klab::test::R;

namespace {

// Brute force: smallest B with some integer A having |gamma_i - A_i/B| < r on both axes.
std::int64_t brute_first_kind(const IrrationalSurrogate& g, const Ratio& r, std::int64_t limit) {
    for (std::int64_t B = 1; B <= limit; ++B) {
        bool ok = true;
        for (int i = 0; i < 2 && ok; ++i) {
            const Ratio x = g.value[i] * Ratio(B);
            const Ratio dist = min(x - Ratio(x.floor()), Ratio(x.ceil()) - x);
            ok = dist < r * Ratio(B);
        }
        if (ok) return B;
    }
    return -1;
}

std::int64_t brute_dirichlet(const IrrationalSurrogate& g, std::int64_t B) {
    for (std::int64_t b = 1; b < B; ++b) {
        const Ratio n = norm_multiple(g, b);
        if (n * n * Ratio(B) <= Ratio(1)) return b;
    }
    return -1;
}

} // namespace

TEST(FirstKind, Examples) {
    IrrationalSurrogate g = surrogate_preset("quad-sqrt2");
    FirstKindApprox f0 = first_kind(g, 0);
    EXPECT_EQ(f0.B, 1);
    EXPECT_EQ(f0.A, (IVec2{0, 0}));
    FirstKindApprox f2 = first_kind(g, 2);
    EXPECT_EQ(f2.B, 2);
    EXPECT_EQ(f2.A, (IVec2{1, 1}));
    EXPECT_EQ(std::gcd(std::gcd(f2.A[0], f2.A[1]), f2.B), 1);
    EXPECT_THROW(first_kind(g, -1), ValidityError);
}

TEST(FirstKind, MatchesBruteForceOnEveryFamily) {
    for (const auto& name : {"quad-sqrt2", "quad-pair", "golden", "liouville", "liouville-diag"}) {
        IrrationalSurrogate g = surrogate_preset(name);
        std::int64_t prev = 1;
        for (long k = 0; k <= 14; ++k) {
            FirstKindApprox f = first_kind(g, k);
            EXPECT_EQ(f.B, brute_first_kind(g, pow2(-k), 1 << 16)) << name << " k=" << k;
            EXPECT_LT(first_kind_error(g, f.B, f.A), pow2(-k));
            EXPECT_GE(f.B, prev) << "B_k must be nondecreasing";
            EXPECT_EQ(std::gcd(std::gcd(f.A[0], f.A[1]), f.B), 1);
            prev = f.B;
        }
    }
}

TEST(FirstKind, WithinRadiusSquared) {
    IrrationalSurrogate g = surrogate_preset("quad-pair");
    for (long M : {4L, 16L, 64L, 256L, 1024L}) {
        // |gamma - A/B| < M^-1/2, decided on squares
        FirstKindApprox f = first_kind_within_sq(g, R(1, M));
        for (std::int64_t B = 1; B < f.B; ++B) {
            Ratio e = first_kind_error(g, B, {to_i64(nearest_integer(g.value.x * Ratio(B))),
                                              to_i64(nearest_integer(g.value.y * Ratio(B)))});
            EXPECT_GE(e * e, R(1, M));
        }
        Ratio e = first_kind_error(g, f.B, f.A);
        EXPECT_LT(e * e, R(1, M));
    }
}

TEST(Dirichlet, Examples) {
    IrrationalSurrogate g = surrogate_preset("quad-sqrt2");
    FirstKindApprox fk{2, 2, {1, 1}};
    DirichletApprox d = dirichlet(g, fk);
    EXPECT_EQ(d.b, 1);
    EXPECT_EQ(d.a, (IVec2{0, 0}));
    EXPECT_THROW(dirichlet(g, FirstKindApprox{0, 1, {0, 0}}), ValidityError);
}

// Minimal b against a brute-force scan; the stated "previous Liouville denominator" is not minimal in general.
TEST(Dirichlet, LiouvilleBase10MatchesBruteForce) {
    IrrationalSurrogate g = surrogate_liouville(10, 4, {0, 1}, 10'000);
    long checked = 0;
    for (long k = 2; k <= 28; ++k) {
        FirstKindApprox fk;
        try {
            fk = first_kind(g, k);
        } catch (const ValidityError&) {
            break;  // B_k passed the validity bound
        }
        if (fk.B < 2) continue;
        ++checked;
        DirichletApprox d = dirichlet(g, fk);
        EXPECT_EQ(d.b, brute_dirichlet(g, fk.B)) << "k=" << k;
        EXPECT_LT(d.b, fk.B);
    }
    EXPECT_GE(checked, 5);
}

TEST(Dirichlet, MinimalOnAllFamilies) {
    for (const auto& name : {"quad-sqrt2", "quad-pair", "liouville"}) {
        IrrationalSurrogate g = surrogate_preset(name);
        for (long k = 2; k <= 20; ++k) {
            FirstKindApprox fk = first_kind(g, k);
            if (fk.B < 2) continue;
            DirichletApprox d = dirichlet(g, fk);
            EXPECT_EQ(d.b, brute_dirichlet(g, fk.B)) << name << " k=" << k;
            // pigeonhole in dimension two: b^2 B <= 4^k
            EXPECT_LE(BigInt(static_cast<long>(d.b * d.b)) * fk.B, ipow(BigInt(4), static_cast<unsigned long>(k)));
        }
    }
}

TEST(ShiftContext, Branches) {
    IrrationalSurrogate g = surrogate_preset("quad-sqrt2");
    EXPECT_EQ(shift_context(g, 0, R(2, 3)).branch, Branch::FirstKind);
    ShiftContext c6 = shift_context(g, 6, R(2, 3));
    EXPECT_EQ(c6.first_kind.B, 5);
    EXPECT_EQ(c6.branch, Branch::FirstKind);  // 5^3 = 125 <= 2^12
    EXPECT_EQ(c6.modulus(), 5);
    EXPECT_EQ(c6.shift(), (IVec2{2, 2}));
    // B = 17 at k = 6 would fail 17^3 <= 2^12
    EXPECT_FALSE(le_pow2_sigma(BigInt(17), 6, R(2, 3)));
    EXPECT_THROW(shift_context(g, 3, R(1)), ValidityError);
}

TEST(ShiftContext, BranchRuleOnAllLevels) {
    for (const auto& name : {"quad-sqrt2", "quad-pair", "liouville"}) {
        IrrationalSurrogate g = surrogate_preset(name);
        ApproxTable t(g, R(2, 3));
        t.warm(24);
        for (long k = 0; k <= 24; ++k) {
            const ShiftContext& c = t.at(k);
            const bool small = ipow(BigInt(static_cast<long>(c.first_kind.B)), 3) <= ipow(BigInt(2), static_cast<unsigned long>(2 * k));
            EXPECT_EQ(c.branch == Branch::FirstKind, small) << name << " k=" << k;
            EXPECT_EQ(c.dirichlet.has_value(), !small);
            // the table agrees with a fresh computation
            ShiftContext fresh = shift_context(g, k, R(2, 3));
            EXPECT_EQ(fresh.first_kind.B, c.first_kind.B);
            EXPECT_EQ(fresh.modulus(), c.modulus());
        }
    }
}

TEST(ApproxTable, RequiresWarm) {
    ApproxTable t(surrogate_preset("golden"), R(2, 3));
    EXPECT_THROW(t.at(3), ValidityError);
    t.warm(5);
    EXPECT_NO_THROW(t.at(5));
    EXPECT_THROW(t.at(6), ValidityError);
    EXPECT_EQ(t.warmed_to(), 5);
}

TEST(Convergents, Examples) {
    using P = std::pair<BigInt, BigInt>;
    auto c = convergents_1d({0, 2, 2, 2}, 3);
    EXPECT_EQ(c, (std::vector<P>{{0, 1}, {1, 2}, {2, 5}}));
    EXPECT_EQ(convergents_1d({0}, 1), (std::vector<P>{{0, 1}}));
    auto f = convergents_1d({1, 1, 1, 1, 1}, 5);
    EXPECT_EQ(f, (std::vector<P>{{1, 1}, {2, 1}, {3, 2}, {5, 3}, {8, 5}}));
}

TEST(Convergents, DeterminantIdentity) {
    auto c = convergents_1d({3, 7, 15, 1, 292, 1, 1, 1, 2}, 9);
    for (std::size_t i = 1; i < c.size(); ++i) {
        BigInt det = c[i].first * c[i - 1].second - c[i - 1].first * c[i].second;
        EXPECT_EQ(det, (i % 2 == 1) ? 1 : -1);
    }
    EXPECT_EQ(c[3], (std::pair<BigInt, BigInt>{355, 113}));
}

TEST(NearestInteger, TiesToEven) {
    EXPECT_EQ(nearest_integer(R(1, 2)), 0);
    EXPECT_EQ(nearest_integer(R(3, 2)), 2);
    EXPECT_EQ(nearest_integer(R(-1, 2)), 0);
    EXPECT_EQ(nearest_integer(R(7, 3)), 2);
}

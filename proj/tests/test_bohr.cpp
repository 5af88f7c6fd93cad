#include "klab/approx.hpp"
#include "klab/arith.hpp"
#include "klab/bohr.hpp"
#include "klab/errors.hpp"
#include "klab/surrogate.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace klab;
using klab::test::R;

namespace {

std::int64_t naive_orbit(const IVec2& a, std::int64_t b, const Vec2Q& beta, const Ratio& eps, std::int64_t lo,
                         std::int64_t hi) {
    std::int64_t c = 0;
    for (std::int64_t h = lo; h <= hi; ++h) {
        Vec2Q p{Ratio(h * a[0]) / Ratio(b) + beta.x, Ratio(h * a[1]) / Ratio(b) + beta.y};
        if (torus_norm(p) < eps) ++c;
    }
    return c;
}

IVec2 random_coprime(Prng& rng, std::int64_t b) {
    IVec2 a;
    do {
        a = {rng.range(0, b - 1), rng.range(0, b - 1)};
    } while (std::gcd(std::gcd(a[0], a[1]), b) != 1);
    return a;
}

} // namespace

TEST(BohrCount, Examples) {
    IrrationalSurrogate third = surrogate_rational({R(1, 3), R(2, 3)}, "thirds");
    EXPECT_EQ(bohr_count({third, 3, R(1, 5), {}}), 1);
    EXPECT_EQ(bohr_count({third, 0, R(1, 5), {}}), 0);
    IrrationalSurrogate g = surrogate_preset("quad-sqrt2");
    EXPECT_EQ(bohr_count({g, 500, R(3, 5), {}}), 500);
    EXPECT_EQ(bohr_count({g, 500, R(0), {}}), 0);
    EXPECT_THROW(bohr_count({g, -1, R(1, 5), {}}), ValidityError);
}

// Certified fixed-point filter against one exact evaluation per h.
TEST(BohrCount, FastMatchesExact) {
    Prng rng = klab::test::gen(40);
    for (const auto& name : {"quad-sqrt2", "quad-pair", "liouville", "liouville-diag", "zero"}) {
        IrrationalSurrogate g = surrogate_preset(name);
        for (int i = 0; i < 40; ++i) {
            BohrQuery q{g, rng.range(0, 3000), Ratio(rng.range(1, 600), 1000), klab::test::random_unit_vec(rng, 64)};
            EXPECT_EQ(bohr_count(q), bohr_count_exact(q)) << name << " N=" << q.N << " eps=" << q.eps;
        }
        // epsilon on the orbit itself: boundary points must be excluded
        Ratio on = torus_norm(Ratio(17) * g.value);
        BohrQuery q{g, 40, on, {}};
        EXPECT_EQ(bohr_count(q), bohr_count_exact(q)) << name;
    }
}

TEST(BohrCount, RangeIsAdditive) {
    IrrationalSurrogate g = surrogate_preset("quad-pair");
    for (std::int64_t split : {1, 7, 250, 999}) {
        EXPECT_EQ(bohr_count_range(g, {}, 1, split, R(1, 20)) + bohr_count_range(g, {}, split + 1, 1000, R(1, 20)),
                  bohr_count({g, 1000, R(1, 20), {}}));
    }
}

TEST(RationalOrbit, Examples) {
    EXPECT_EQ(rational_orbit_count({1, 2}, 3, {}, R(1, 5)), 1);
    EXPECT_EQ(rational_orbit_count({0, 0}, 1, {R(1, 10), R(0)}, R(1, 5)), 1);
    EXPECT_EQ(rational_orbit_count({0, 0}, 1, {R(3, 10), R(0)}, R(1, 5)), 0);
    for (std::int64_t b : {2, 5, 9, 31}) EXPECT_LE(rational_orbit_count({1, 1}, b, {}, R(1, 2)), b);
    EXPECT_THROW(rational_orbit_count({2, 4}, 6, {}, R(1, 5)), ValidityError);
}

TEST(RationalOrbit, MatchesNaiveAndBound) {
    Prng rng = klab::test::gen(41);
    for (int i = 0; i < 400; ++i) {
        const std::int64_t b = rng.range(1, 300);
        IVec2 a = random_coprime(rng, b);
        Vec2Q beta = klab::test::random_unit_vec(rng, 40);
        Ratio eps = pow2(-rng.range(0, 9));
        const std::int64_t c = rational_orbit_count(a, b, beta, eps);
        EXPECT_EQ(c, naive_orbit(a, b, beta, eps, 0, b - 1));
        EXPECT_LE(Ratio(c), Ratio(8) * eps * Ratio(b) + Ratio(1));
    }
}

TEST(PartialOrbit, Examples) {
    EXPECT_EQ(partial_orbit_count({1, 1}, 5, 4, R(1, 10)), 0);
    // N = b adds the origin at h = b to the h = 1..b-1 points
    EXPECT_EQ(partial_orbit_count({1, 2}, 3, 3, R(1, 5)), rational_orbit_count({1, 2}, 3, {}, R(1, 5)));
    EXPECT_EQ(partial_orbit_count({1, 2}, 7, 14, R(1, 2)), 14);
    EXPECT_LE(Ratio(14), partial_orbit_bound(7, 14, R(1, 2)));
}

TEST(PartialOrbit, MatchesNaive) {
    Prng rng = klab::test::gen(42);
    for (int i = 0; i < 300; ++i) {
        const std::int64_t b = rng.range(1, 120), N = rng.range(1, 600);
        IVec2 a = random_coprime(rng, b);
        Ratio eps = pow2(-rng.range(0, 8));
        const std::int64_t c = partial_orbit_count(a, b, N, eps);
        EXPECT_EQ(c, naive_orbit(a, b, {}, eps, 1, N));
        EXPECT_LE(Ratio(c), partial_orbit_bound(b, N, eps));
    }
}

TEST(OnceAround, Examples) {
    // max norm: ||alpha|| = 9/20, m in {1, 2}, bound 2(1/20)/(9/20) + 1 = 11/9
    EXPECT_EQ(once_around_count({R(3, 10), R(9, 20)}, {}, R(1, 20)), 0);
    Vec2Q alpha{R(1, 7), R(2, 9)};
    EXPECT_GE(once_around_count(alpha, {-alpha.x, -alpha.y}, R(1, 1000)), 1);
    // eps > 1/2 counts every m < 1/||alpha||
    const Ratio na = torus_norm(alpha);
    const std::int64_t full = to_i64((Ratio(1) / na).ceil()) - 1;
    EXPECT_EQ(once_around_count(alpha, {}, R(3, 5)), full);
    EXPECT_THROW(once_around_count({R(0), R(1)}, {}, R(1, 5)), ValidityError);
}

TEST(OnceAround, BoundProperty) {
    Prng rng = klab::test::gen(43);
    for (int i = 0; i < 2000; ++i) {
        Vec2Q alpha = klab::test::random_unit_vec(rng, 500);
        if (torus_norm(alpha).is_zero()) continue;
        Vec2Q beta = klab::test::random_unit_vec(rng, 500);
        Ratio eps = pow2(-rng.range(1, 9));
        const std::int64_t c = once_around_count(alpha, beta, eps);
        EXPECT_LE(Ratio(c), Ratio(2) * eps / torus_norm(alpha) + Ratio(1));
    }
}

TEST(IndicatorC, Examples) {
    CaseContext a;
    a.level = 4;
    a.B = 1;
    a.D = R(1, 4);
    a.Dhat = R(1, 2);
    EXPECT_TRUE(indicator_C(a));

    CaseContext b;
    b.level = 6;
    b.B = 40;  // > 2^6 (1/4) = 16 and > 2^4
    b.D = R(1, 4);
    b.Dhat = R(1, 4);
    b.b = 3;
    b.h = 3;
    b.norm_bgamma = R(1, 5);  // h ||b gamma|| = 3/5 > 1/2
    EXPECT_TRUE(indicator_C(b));
    b.h = 1;
    b.D = R(1, 100);
    EXPECT_FALSE(indicator_C(b));
    b.b.reset();
    EXPECT_THROW(indicator_C(b), ValidityError);

    CaseContext c;
    c.level = 6;
    c.B = 10;  // 10^3 <= 2^12
    c.D = R(1, 100);
    c.Dhat = R(1, 100);
    EXPECT_FALSE(indicator_C(c));
}

// Threshold form of 1_C against the per-h definition.
TEST(Adhoc, ThresholdMatchesPerH) {
    BohrParams params;
    for (const auto& name : {"quad-sqrt2", "quad-pair", "liouville", "liouville-diag", "golden"}) {
        IrrationalSurrogate g = surrogate_preset(name);
        ApproxTable t(g, params.sigma);
        t.warm(14);
        for (long k = 2; k <= 14; ++k)
            for (long j = 2; j <= 6; ++j) {
                AdhocInstance inst{Bullet::K, k, std::int64_t{1} << std::min(12L, k - j + 8), pow2(-j + 1), R(1, 4)};
                AdhocResult r = adhoc_bound_eval(g, t, inst, params);
                EXPECT_EQ(r.hits, adhoc_hits_reference(g, t, inst, params)) << name << " k=" << k << " j=" << j;
                EXPECT_EQ(r.lhs, Ratio(r.hits) / Ratio(inst.N));
                EXPECT_LE(r.D_omega_lower, R(1));
                EXPECT_TRUE(le_power(r.D_omega_lower, inst.D, params.omega));
                EXPECT_FALSE(le_power(r.D_omega_lower + pow2(-63), inst.D, params.omega));
            }
    }
}

TEST(Adhoc, DegenerateCases) {
    BohrParams params;
    IrrationalSurrogate g = surrogate_preset("quad-sqrt2");
    ApproxTable t(g, params.sigma);
    t.warm(10);
    // N = 1 and ||gamma|| >= D
    AdhocResult r = adhoc_bound_eval(g, t, {Bullet::L, 3, 1, R(1, 8), R(1)}, params);
    EXPECT_EQ(r.lhs, R(0));
    EXPECT_THROW(adhoc_bound_eval(g, t, {Bullet::L, 3, 1, R(1), R(1)}, params), ValidityError);
    // exact rational gamma = 0: 1_C is never switched on when ||h gamma|| stays 0 and 2D < 1/B fails never
    IrrationalSurrogate z = surrogate_preset("zero");
    ApproxTable tz(z, params.sigma);
    tz.warm(6);
    AdhocResult rz = adhoc_bound_eval(z, tz, {Bullet::K, 6, 50, R(1, 4), R(1, 2)}, params);
    EXPECT_EQ(rz.hits, adhoc_hits_reference(z, tz, {Bullet::K, 6, 50, R(1, 4), R(1, 2)}, params));
}

TEST(BohrParams, Validation) {
    BohrParams p;
    EXPECT_NO_THROW(p.validate());
    p.rho = R(1, 3);
    EXPECT_THROW(p.validate(), ValidityError);
    p = BohrParams{};
    p.tau = R(1, 2);
    EXPECT_THROW(p.validate(), ValidityError);
}

// The split h = m b + s is a second route to the Bohr count.
TEST(Decomposed, MatchesDirectCount) {
    for (const auto& name : {"quad-sqrt2", "quad-pair", "liouville"}) {
        IrrationalSurrogate g = surrogate_preset(name);
        ApproxTable t(g, R(2, 3));
        t.warm(16);
        for (long k : {6L, 10L, 14L, 16L}) {
            const ShiftContext& c = t.at(k);
            const std::int64_t b = c.first_kind.B;
            for (std::int64_t N : {std::int64_t{1}, b, 3 * b + 2, std::int64_t{700}})
                for (long j : {2L, 4L, 7L})
                    EXPECT_EQ(decomposed_count(g, b, c.first_kind.A, N, pow2(-j)), bohr_count({g, N, pow2(-j), {}}))
                        << name << " k=" << k << " N=" << N;
        }
    }
}

TEST(Triangle, TransferHolds) {
    const Ratio tau(5, 6);
    for (const auto& name : {"quad-sqrt2", "quad-pair", "liouville"}) {
        IrrationalSurrogate g = surrogate_preset(name);
        for (long k = 4; k <= 16; k += 3) {
            FirstKindApprox fk = first_kind(g, k);
            for (long j = 2; j <= 6; ++j) {
                TriangleReport rep = triangle_transfer(g, fk, 2000, pow2(-j), tau);
                EXPECT_EQ(rep.violations, 0) << name << " k=" << k << " j=" << j;
            }
        }
    }
}

#include "klab/arith.hpp"
#include "klab/errors.hpp"
#include "klab/prng.hpp"
#include "klab/ratio.hpp"
#include "klab/surrogate.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace klab;
using klab::test::R;

TEST(Ratio, ParseAndPrint) {
    EXPECT_EQ(Ratio::parse("3/6"), R(1, 2));
    EXPECT_EQ(Ratio::parse(" -4/8 "), R(-1, 2));
    EXPECT_EQ(Ratio::parse("7"), R(7));
    EXPECT_EQ(R(7).to_string(), "7/1");
    EXPECT_EQ(R(-2, 4).to_string(), "-1/2");
    EXPECT_THROW(Ratio::parse("1/0"), ValidityError);
    EXPECT_THROW(Ratio::parse("x"), ValidityError);
    EXPECT_THROW(Ratio::parse(""), ValidityError);
}

TEST(Ratio, FloorCeilFrac) {
    EXPECT_EQ(R(-7, 3).floor(), -3);
    EXPECT_EQ(R(-7, 3).ceil(), -2);
    EXPECT_EQ(R(7, 3).frac(), R(1, 3));
    EXPECT_EQ(R(-7, 3).frac(), R(2, 3));
    EXPECT_EQ(R(4).floor(), 4);
}

TEST(Ratio, RoundTripProperty) {
    Prng rng = klab::test::gen(1);
    for (int i = 0; i < 2000; ++i) {
        Ratio x = klab::test::random_ratio(rng, 1'000'000'000, 1000);
        EXPECT_EQ(Ratio::parse(x.to_string()), x);
    }
}

TEST(Ratio, DecimalExamples) {
    EXPECT_EQ(R(1, 3).to_decimal(), "0.333333333333");
    EXPECT_EQ(R(2, 3).to_decimal(), "0.666666666667");
    EXPECT_EQ(R(0).to_decimal(), "0");
    EXPECT_EQ(R(29, 5).to_decimal(), "5.8");
    EXPECT_EQ(R(-1, 8).to_decimal(), "-0.125");
    EXPECT_EQ(R(1, 100000).to_decimal(), "1e-05");
    // exact ties round to even
    EXPECT_EQ(Ratio::parse("1000000000005/1000000000000").to_decimal(), "1");
    EXPECT_EQ(Ratio::parse("1000000000015/1000000000000").to_decimal(), "1.00000000002");
    EXPECT_EQ(R(5, 2).to_decimal(1), "2");
    EXPECT_EQ(R(7, 2).to_decimal(1), "4");
}

namespace {
bool only_2_and_5(BigInt d) {
    while (d % 2 == 0) d /= 2;
    while (d % 5 == 0) d /= 5;
    return d == 1;
}
} // namespace

// Independent oracle: MPFR at 512 bits printed with %.12Rg.
TEST(Ratio, DecimalMatchesMpfr) {
    Prng rng = klab::test::gen(2);
    mpfr_t x;
    mpfr_init2(x, 512);
    int compared = 0;
    for (int i = 0; i < 3000; ++i) {
        Ratio r = klab::test::random_ratio(rng, 10'000'000, 100000);
        if (r.is_zero() || only_2_and_5(r.den())) continue;  // terminating decimals may sit on a tie
        mpfr_set_q(x, r.raw().get_mpq_t(), MPFR_RNDN);
        char buf[128];
        mpfr_snprintf(buf, sizeof buf, "%.12Rg", x);
        EXPECT_EQ(r.to_decimal(12), std::string(buf)) << r;
        ++compared;
    }
    mpfr_clear(x);
    EXPECT_GT(compared, 2500);
}

TEST(Torus, DistExamples) {
    EXPECT_EQ(torus_dist(R(0)), R(0));
    EXPECT_EQ(torus_dist(R(9, 10)), R(1, 10));
    EXPECT_EQ(torus_dist(R(7, 3)), R(1, 3));
    EXPECT_EQ(torus_dist(R(-7, 3)), R(1, 3));
    EXPECT_EQ(torus_dist(R(1, 2)), R(1, 2));
}

TEST(Torus, NormExamples) {
    EXPECT_EQ(torus_norm({R(0), R(0)}), R(0));
    EXPECT_EQ(torus_norm({R(9, 10), R(1, 5)}), R(1, 5));
    EXPECT_EQ(torus_norm({R(1, 2), R(1, 4)}), R(1, 2));
}

TEST(Torus, DistProperties) {
    Prng rng = klab::test::gen(3);
    for (int i = 0; i < 2000; ++i) {
        Ratio x = klab::test::random_ratio(rng, 100000, 50);
        Ratio d = torus_dist(x);
        EXPECT_GE(d, R(0));
        EXPECT_LE(d, R(1, 2));
        EXPECT_EQ(torus_dist(x + R(rng.range(-9, 9))), d);
        EXPECT_EQ(torus_dist(-x), d);
        // d is the distance to floor or ceil
        EXPECT_TRUE(d == x - Ratio(x.floor()) || d == Ratio(x.ceil()) - x);
        // triangle inequality on the circle
        Ratio y = klab::test::random_ratio(rng, 1000, 5);
        EXPECT_LE(torus_dist(x + y), d + torus_dist(y));
    }
}

TEST(Torus, ModAndMaxAbs) {
    Vec2Q v = mod1({R(-1, 3), R(7, 2)});
    EXPECT_EQ(v.x, R(2, 3));
    EXPECT_EQ(v.y, R(1, 2));
    EXPECT_EQ(max_abs({R(-3, 2), R(1, 4)}), R(3, 2));
}

TEST(Arith, SmallHelpers) {
    EXPECT_EQ(prime_factors(360), (std::vector<std::int64_t>{2, 3, 5}));
    EXPECT_EQ(prime_factors(1), std::vector<std::int64_t>{});
    EXPECT_EQ(prime_factors(97), std::vector<std::int64_t>{97});
    EXPECT_EQ(floor_mod(-7, 3), 2);
    EXPECT_EQ(mod_inverse(3, 7), 5);
    EXPECT_EQ(isqrt(BigInt(99)), 9);
    EXPECT_EQ(isqrt(BigInt(100)), 10);
    EXPECT_EQ(bit_length(BigInt(1)), 1);
    EXPECT_EQ(bit_length(BigInt(1024)), 11);
    EXPECT_EQ(pow2(-3), R(1, 8));
    EXPECT_EQ(pow2(5), R(32));
}

TEST(Arith, ExtGcdProperty) {
    Prng rng = klab::test::gen(4);
    for (int i = 0; i < 1000; ++i) {
        std::int64_t a = rng.range(0, 1'000'000), b = rng.range(0, 1'000'000), g, x, y;
        ext_gcd(a, b, g, x, y);
        EXPECT_EQ(g, std::gcd(a, b));
        EXPECT_EQ(static_cast<__int128>(a) * x + static_cast<__int128>(b) * y, g);
    }
}

TEST(Arith, SquarefreeDivisors) {
    auto sd = squarefree_divisors({2, 3, 5});
    ASSERT_EQ(sd.value.size(), 8u);
    std::set<std::int64_t> vals(sd.value.begin(), sd.value.end());
    EXPECT_EQ(vals, (std::set<std::int64_t>{1, 2, 3, 5, 6, 10, 15, 30}));
    int mu_sum = 0;
    for (int m : sd.mu) mu_sum += m;
    EXPECT_EQ(mu_sum, 0);  // sum over d | n of mu(d) = 0 for n > 1
}

TEST(Arith, PowerComparisonsAgainstLongDouble) {
    Prng rng = klab::test::gen(5);
    for (int i = 0; i < 3000; ++i) {
        Ratio x = klab::test::random_unit(rng, 1000) * R(4);
        Ratio base = klab::test::random_unit(rng, 1000) * R(4);
        Ratio e(BigInt(static_cast<long>(rng.range(0, 12))), BigInt(static_cast<long>(rng.range(1, 12))));
        long double rhs = std::pow(static_cast<long double>(base.to_double()), static_cast<long double>(e.to_double()));
        long double lhs = static_cast<long double>(x.to_double());
        if (std::fabs(lhs - rhs) < 1e-12L * (1 + rhs)) continue;  // too close for the float oracle
        EXPECT_EQ(le_power(x, base, e), lhs <= rhs) << x << " " << base << " " << e;
        EXPECT_EQ(lt_power(x, base, e), lhs < rhs);
    }
    EXPECT_TRUE(le_power(R(2), R(4), R(1, 2)));
    EXPECT_FALSE(lt_power(R(2), R(4), R(1, 2)));
}

TEST(Arith, PowerLowerBrackets) {
    Prng rng = klab::test::gen(6);
    for (int i = 0; i < 300; ++i) {
        Ratio base = klab::test::random_unit(rng, 500);
        Ratio e(BigInt(static_cast<long>(rng.range(1, 7))), BigInt(static_cast<long>(rng.range(1, 7))));
        Ratio L = power_lower(base, e, 64);
        EXPECT_TRUE(le_power(L, base, e));                 // L <= base^e
        EXPECT_FALSE(le_power(L + pow2(-64), base, e));    // base^e < L + 2^-64
    }
}

TEST(Arith, LePow2Sigma) {
    // 5^3 = 125 <= 2^12 and 17^3 = 4913 > 2^12
    EXPECT_TRUE(le_pow2_sigma(BigInt(5), 6, R(2, 3)));
    EXPECT_FALSE(le_pow2_sigma(BigInt(17), 6, R(2, 3)));
    EXPECT_TRUE(le_pow2_sigma(BigInt(16), 6, R(2, 3)));
    EXPECT_TRUE(le_pow2_sigma(BigInt(1), 0, R(2, 3)));
}

TEST(Prng, SplitMixReferenceVector) {
    // Published SplitMix64 outputs for seed 0.
    Prng p(0);
    EXPECT_EQ(p.next(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(p.next(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(p.next(), 0x06C45D188009454FULL);
}

TEST(Prng, RangeAndSampling) {
    Prng rng = klab::test::gen(7);
    std::vector<int> hist(6, 0);
    for (int i = 0; i < 60000; ++i) {
        std::int64_t v = rng.range(-2, 3);
        ASSERT_GE(v, -2);
        ASSERT_LE(v, 3);
        ++hist[static_cast<std::size_t>(v + 2)];
    }
    for (int h : hist) EXPECT_NEAR(h, 10000, 600);
    auto s = sample_without_replacement(10, 30, 21, rng);
    ASSERT_EQ(s.size(), 21u);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], static_cast<std::int64_t>(10 + i));
    auto t = sample_without_replacement(1, 1'000'000, 50, rng);
    EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
    EXPECT_EQ(std::set<std::int64_t>(t.begin(), t.end()).size(), 50u);
}

TEST(Prng, DerivedStreamsDiffer) {
    Prng a = Prng::derive(7, 1), b = Prng::derive(7, 2), c = Prng::derive(7, 1);
    const auto x = a.next();
    EXPECT_NE(x, b.next());
    EXPECT_EQ(x, c.next());
}

TEST(Surrogate, QuadraticDepthRule) {
    // q_40 of sqrt2 - 1 is about 1.7e15 < (10^6)^4, so depth 40 is rejected.
    try {
        surrogate_quadratic({0, 2}, 40, 1'000'000);
        FAIL() << "expected rejection";
    } catch (const ValidityError& e) {
        EXPECT_NE(std::string(e.what()).find("minimum depth is 63"), std::string::npos) << e.what();
    }
    EXPECT_THROW(surrogate_quadratic({0, 2}, 62, 1'000'000), ValidityError);
    IrrationalSurrogate s = surrogate_quadratic({0, 2}, 63, 1'000'000);
    EXPECT_GT(s.value.x.den(), BigInt("1000000000000000000000000"));
    EXPECT_TRUE(s.diagonal());
    EXPECT_LT((s.value.x - R(41421356237, 100000000000)).abs(), R(1, 100000000000));
    EXPECT_THROW(surrogate_quadratic({0, 1}, 3, 1'000'000), ValidityError);
    IrrationalSurrogate half = surrogate_quadratic({0, 2}, 1, 1);
    EXPECT_EQ(half.value.x, R(1, 2));
}

TEST(Surrogate, ConvergentDenominatorsByRecurrence) {
    // q_n = 2 q_{n-1} + q_{n-2} for [0; 2, 2, ...]
    auto cf = expand_cf({0, 2}, 6);
    EXPECT_EQ(cf, (std::vector<std::int64_t>{0, 2, 2, 2, 2, 2}));
    BigInt q0 = 1, q1 = 2;
    for (int n = 2; n < 30; ++n) {
        BigInt q2 = 2 * q1 + q0;
        q0 = q1;
        q1 = q2;
    }
    // depth 29 convergent denominator
    IrrationalSurrogate s = surrogate_quadratic({0, 2}, 29, 30);
    EXPECT_EQ(s.value.x.den(), q1);
}

TEST(Surrogate, Liouville) {
    IrrationalSurrogate s = surrogate_liouville(10, 4, {0, 1}, 10'000);
    Ratio x, y;
    long f = 1;
    for (int n = 1; n <= 4; ++n) {
        f *= n;
        x += Ratio(BigInt(1), ipow(BigInt(10), static_cast<unsigned long>(f)));
        y += Ratio(BigInt(1), ipow(BigInt(10), static_cast<unsigned long>(f + 1)));
    }
    EXPECT_EQ(s.value.x, x);
    EXPECT_EQ(s.value.y, y);
    EXPECT_THROW(surrogate_liouville(10, 2, {0, 1}, 1'000'000'000), ValidityError);
    EXPECT_TRUE(surrogate_liouville(2, 4, {0, 0}, 16).diagonal());
}

TEST(Surrogate, PresetsRespectValidityRule) {
    for (const auto& name : {"quad-sqrt2", "quad-pair", "golden", "liouville", "liouville-diag"}) {
        IrrationalSurrogate s = surrogate_preset(name);
        const BigInt v4 = ipow(BigInt(static_cast<long>(s.validity)), 4);
        EXPECT_GT(s.value.x.den(), v4) << name;
        EXPECT_GT(s.value.y.den(), v4) << name;
        EXPECT_FALSE(s.exact);
        EXPECT_THROW(s.require_within("q", s.validity + 1), ValidityError);
        EXPECT_NO_THROW(s.require_within("q", s.validity));
    }
    IrrationalSurrogate z = surrogate_preset("zero");
    EXPECT_TRUE(z.exact);
    EXPECT_EQ(z.value, (Vec2Q{R(0), R(0)}));
    EXPECT_EQ(surrogate_preset("rational:1/3,2/3").value, (Vec2Q{R(1, 3), R(2, 3)}));
    EXPECT_THROW(surrogate_preset("nope"), ValidityError);
    EXPECT_FALSE(surrogate_preset("quad-pair").diagonal());
}

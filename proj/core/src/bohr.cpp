#include "klab/bohr.hpp"

#include "klab/arith.hpp"
#include "klab/errors.hpp"

#include <numeric>

namespace klab {

namespace {

// floor(frac(x) * 2^64)
std::uint64_t frac64(const Ratio& x) {
    BigInt n;
    mpz_fdiv_r(n.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
    n <<= 64;
    BigInt v = n / x.den();
    return static_cast<std::uint64_t>(mpz_getlimbn(v.get_mpz_t(), 0));
}

bool exact_inside(const Vec2Q& gamma, const Vec2Q& beta, std::int64_t h, const Ratio& eps) {
    Ratio hh(static_cast<long>(h));
    return torus_norm(Vec2Q{hh * gamma.x + beta.x, hh * gamma.y + beta.y}) < eps;
}

void check_orbit_args(const IVec2& a, std::int64_t b) {
    if (b < 1) throw ValidityError("orbit count: b must be positive");
    if (std::gcd(std::gcd(a[0], a[1]), b) != 1) throw ValidityError("orbit count: gcd(a1, a2, b) must be 1");
}

// ||h a/b + beta|| < eps for 0 <= h < b, with integer arithmetic when the
// denominators are small.
class OrbitKernel {
public:
    OrbitKernel(const IVec2& a, std::int64_t b, const Vec2Q& beta, const Ratio& eps)
        : a_(a), b_(b), beta_(beta), eps_(eps) {
        const BigInt lim = BigInt(1) << 31;
        fast_ = eps.num() < lim && eps.den() < lim && b < (std::int64_t{1} << 31);
        for (int i = 0; i < 2 && fast_; ++i) {
            if (!(beta[i].den() < lim)) { fast_ = false; break; }
            std::int64_t d = beta[i].den().get_si();
            std::int64_t n = floor_mod(beta[i].num().get_si() % d, d);
            W_[i] = static_cast<__int128>(b) * d;
            d_[i] = d;
            nb_[i] = static_cast<__int128>(n) * b;
        }
        if (fast_) {
            en_ = eps.num().get_si();
            ed_ = eps.den().get_si();
        }
    }

    bool inside(std::int64_t h) const {
        if (!fast_) {
            Vec2Q p{Ratio(static_cast<long>(floor_mod(static_cast<std::int64_t>(static_cast<__int128>(h) * a_[0] % b_), b_)),
                          static_cast<long>(b_)),
                    Ratio(static_cast<long>(floor_mod(static_cast<std::int64_t>(static_cast<__int128>(h) * a_[1] % b_), b_)),
                          static_cast<long>(b_))};
            return torus_norm(p + beta_) < eps_;
        }
        for (int i = 0; i < 2; ++i) {
            __int128 u = floor_mod(static_cast<std::int64_t>(static_cast<__int128>(h) * a_[static_cast<std::size_t>(i)] % b_), b_);
            __int128 X = (u * d_[i] + nb_[i]) % W_[i];
            __int128 dist = X < W_[i] - X ? X : W_[i] - X;
            if (!(dist * ed_ < static_cast<__int128>(en_) * W_[i])) return false;
        }
        return true;
    }

private:
    IVec2 a_;
    std::int64_t b_;
    Vec2Q beta_;
    Ratio eps_;
    bool fast_ = false;
    __int128 W_[2]{}, nb_[2]{};
    std::int64_t d_[2]{};
    std::int64_t en_ = 0, ed_ = 1;
};

constexpr std::int64_t kOnceAroundCap = 10'000'000;

} // namespace

std::int64_t bohr_count_range(const IrrationalSurrogate& gamma, const Vec2Q& beta, std::int64_t lo,
                              std::int64_t hi, const Ratio& eps) {
    if (lo < 1) lo = 1;
    if (hi < lo) return 0;
    gamma.require_within("N", hi);
    if (eps.sign() <= 0) return 0;
    if (eps * Ratio(2) > Ratio(1)) return hi - lo + 1;
    // Fixed point: P = h G + Bt approximates frac(h gamma + beta) 2^64 from
    // below with error < h + 1 units, so only a band of width 2(h+1) around
    // the threshold needs the exact test.
    const std::uint64_t G0 = frac64(gamma.value.x), G1 = frac64(gamma.value.y);
    const std::uint64_t B0 = frac64(beta.x), B1 = frac64(beta.y);
    BigInt Eb = (eps * Ratio(BigInt(BigInt(1) << 64))).floor();
    const auto E = static_cast<unsigned __int128>(mpz_get_ui(Eb.get_mpz_t()));  // eps <= 1/2
    std::uint64_t P0 = static_cast<std::uint64_t>(lo) * G0 + B0;
    std::uint64_t P1 = static_cast<std::uint64_t>(lo) * G1 + B1;
    std::int64_t count = 0;
    for (std::int64_t h = lo; h <= hi; ++h, P0 += G0, P1 += G1) {
        const std::uint64_t d0 = P0 < -P0 ? P0 : -P0;
        const std::uint64_t d1 = P1 < -P1 ? P1 : -P1;
        const auto err = static_cast<unsigned __int128>(h) + 1;
        const unsigned __int128 m = d0 > d1 ? d0 : d1;
        if (m + err < E) {
            ++count;
        } else if (m < E + 1 + err) {
            if (exact_inside(gamma.value, beta, h, eps)) ++count;
        }
    }
    return count;
}

std::int64_t bohr_count(const BohrQuery& qy) {
    if (qy.N < 0) throw ValidityError("bohr_count: N must be nonnegative");
    return bohr_count_range(qy.gamma, qy.beta, 1, qy.N, qy.eps);
}

std::int64_t bohr_count_exact(const BohrQuery& qy) {
    if (qy.N < 0) throw ValidityError("bohr_count: N must be nonnegative");
    std::int64_t count = 0;
    for (std::int64_t h = 1; h <= qy.N; ++h)
        if (exact_inside(qy.gamma.value, qy.beta, h, qy.eps)) ++count;
    return count;
}

std::int64_t rational_orbit_count(const IVec2& a, std::int64_t b, const Vec2Q& beta, const Ratio& eps) {
    check_orbit_args(a, b);
    OrbitKernel k(a, b, beta, eps);
    std::int64_t count = 0;
    for (std::int64_t h = 0; h < b; ++h)
        if (k.inside(h)) ++count;
    Ratio bound = Ratio(8) * eps * Ratio(static_cast<long>(b)) + Ratio(1);
    if (Ratio(static_cast<long>(count)) > bound)
        throw InvariantViolation("rational_orbit_count: count " + std::to_string(count) + " > 8 eps b + 1 = " +
                                 bound.to_string() + " at a = (" + std::to_string(a[0]) + "," + std::to_string(a[1]) +
                                 "), b = " + std::to_string(b) + ", eps = " + eps.to_string());
    return count;
}

Ratio partial_orbit_bound(std::int64_t b, std::int64_t N, const Ratio& eps) {
    Ratio eb = Ratio(8) * eps * Ratio(static_cast<long>(b));
    if (N >= b) return (eb + Ratio(1)) * Ratio(2 * N) / Ratio(static_cast<long>(b));
    return min(Ratio(static_cast<long>(N)), eb);
}

std::int64_t partial_orbit_count(const IVec2& a, std::int64_t b, std::int64_t N, const Ratio& eps) {
    check_orbit_args(a, b);
    if (N < 1) throw ValidityError("partial_orbit_count: N must be positive");
    OrbitKernel k(a, b, Vec2Q{}, eps);
    // h and h + b give the same point
    std::int64_t period = 0, rem = 0;
    const std::int64_t full = N / b, tail = N % b;
    for (std::int64_t h = 1; h <= b; ++h) {
        if (!k.inside(h)) continue;
        ++period;
        if (h <= tail) ++rem;
    }
    std::int64_t count = full * period + rem;
    Ratio bound = partial_orbit_bound(b, N, eps);
    if (Ratio(static_cast<long>(count)) > bound)
        throw InvariantViolation("partial_orbit_count: count " + std::to_string(count) + " exceeds " +
                                 bound.to_string() + " at b = " + std::to_string(b) + ", N = " + std::to_string(N));
    return count;
}

std::int64_t once_around_count(const Vec2Q& alpha, const Vec2Q& beta, const Ratio& eps) {
    Ratio na = torus_norm(alpha);
    if (na.is_zero()) throw ValidityError("once_around_count: ||alpha|| must be positive");
    std::int64_t count = 0;
    for (std::int64_t m = 1; Ratio(static_cast<long>(m)) * na < Ratio(1); ++m) {
        if (m > kOnceAroundCap) throw BudgetExceeded("once_around_count: 1/||alpha|| too large");
        if (exact_inside(alpha, beta, m, eps)) ++count;
    }
    Ratio bound = Ratio(2) * eps / na + Ratio(1);
    if (Ratio(static_cast<long>(count)) > bound)
        throw InvariantViolation("once_around_count: count " + std::to_string(count) + " > 2 eps/||alpha|| + 1 = " +
                                 bound.to_string());
    return count;
}

void BohrParams::validate() const {
    if (sigma.sign() <= 0 || sigma >= Ratio(1)) throw ValidityError("sigma must lie in (0,1)");
    if (!(sigma < tau) || tau >= Ratio(1)) throw ValidityError("tau must satisfy sigma < tau < 1");
    if (rho.sign() <= 0 || !(rho < sigma / Ratio(2))) throw ValidityError("rho must satisfy 0 < rho < sigma/2");
    if (omega.sign() <= 0) throw ValidityError("omega must be positive");
    if (C1.sign() <= 0 || C2.sign() <= 0) throw ValidityError("indicator constants must be positive");
}

bool indicator_C(const CaseContext& ctx) {
    ctx.params.validate();
    const BigInt Bz = static_cast<long>(ctx.B);
    const bool below_sigma = le_pow2_sigma(Bz, ctx.level, ctx.params.sigma);
    const bool below_D = Ratio(static_cast<long>(ctx.B)) <= pow2(ctx.level) * ctx.D;
    if (below_D || below_sigma) {
        if (!below_sigma) return true;
        return Ratio(2) * ctx.Dhat >= Ratio(1) / Ratio(static_cast<long>(ctx.B));
    }
    if (!ctx.b) throw ValidityError("indicator_C: b is required when B > max(2^k D, 2^(sigma k))");
    const Ratio hb = Ratio(static_cast<long>(ctx.h)) * ctx.norm_bgamma;
    if (hb > Ratio(1, 2)) return true;
    return Ratio(2) * ctx.D >= Ratio(1) / Ratio(static_cast<long>(*ctx.b));
}

AdhocResult adhoc_bound_eval(const IrrationalSurrogate& gamma, const ApproxTable& table,
                             const AdhocInstance& inst, const BohrParams& params) {
    params.validate();
    if (inst.D.sign() <= 0 || inst.D >= Ratio(1)) throw ValidityError("adhoc_bound_eval: requires 0 < D < 1");
    if (inst.N < 1) throw ValidityError("adhoc_bound_eval: N must be positive");
    gamma.require_within("N", inst.N);
    const ShiftContext& ctx = table.at(inst.level);
    AdhocResult res;
    res.inst = inst;
    res.B = ctx.first_kind.B;
    const Ratio Br(static_cast<long>(res.B));
    const bool below_sigma = le_pow2_sigma(BigInt(static_cast<long>(res.B)), inst.level, params.sigma);
    res.case_one = below_sigma || Br <= pow2(inst.level) * inst.D;
    const Ratio N(static_cast<long>(inst.N));
    // 1_C(h) is a threshold in h: find the first h where it holds.
    Ratio start;  // zero means never
    if (res.case_one) {
        if (!below_sigma || Ratio(2) * inst.D >= Ratio(1) / Br) {
            start = Ratio(1);
        } else {
            Ratio err = first_kind_error(gamma, ctx.first_kind.B, ctx.first_kind.A);
            if (!err.is_zero()) start = max(Ratio(1), Ratio((Ratio(1) / (Ratio(2) * Br * err)).ceil()));
        }
    } else {
        if (!ctx.dirichlet) throw InvariantViolation("adhoc_bound_eval: missing Dirichlet approximation");
        res.b = ctx.dirichlet->b;
        if (Ratio(2) * inst.D >= Ratio(1) / Ratio(static_cast<long>(res.b))) {
            start = Ratio(1);
        } else {
            Ratio nb = norm_multiple(gamma, res.b);
            if (!nb.is_zero()) start = Ratio(BigInt((Ratio(1) / (Ratio(2) * nb)).floor() + 1));
        }
    }
    if (!start.is_zero() && start <= N) {
        res.h_start = to_i64(start.num());
        res.hits = bohr_count_range(gamma, Vec2Q{}, res.h_start, inst.N, inst.D);
    } else {
        res.h_start = start.is_zero() ? 0 : inst.N + 1;
    }
    if (res.case_one && res.b == 0 && ctx.dirichlet) res.b = ctx.dirichlet->b;
    res.lhs = Ratio(static_cast<long>(res.hits)) / N;
    res.D_omega_lower = power_lower(inst.D, params.omega, 64);
    res.ind_k = inst.bullet == Bullet::K && le_power(params.C1 * inst.R_over_Q, inst.D, params.omega);
    res.ind_l = inst.bullet == Bullet::L && inst.D >= params.C2;
    res.bound_lower = res.D_omega_lower + Ratio(res.ind_k ? 1 : 0) + Ratio(res.ind_l ? 1 : 0);
    res.ratio_upper = res.lhs / res.bound_lower;
    return res;
}

std::int64_t adhoc_hits_reference(const IrrationalSurrogate& gamma, const ApproxTable& table,
                                  const AdhocInstance& inst, const BohrParams& params) {
    const ShiftContext& ctx = table.at(inst.level);
    CaseContext cc;
    cc.level = inst.level;
    cc.B = ctx.first_kind.B;
    cc.params = params;
    cc.D = inst.D;
    if (ctx.dirichlet) {
        cc.b = ctx.dirichlet->b;
        cc.norm_bgamma = norm_multiple(gamma, ctx.dirichlet->b);
    }
    Ratio err = first_kind_error(gamma, ctx.first_kind.B, ctx.first_kind.A);
    std::int64_t hits = 0;
    for (std::int64_t h = 1; h <= inst.N; ++h) {
        if (!exact_inside(gamma.value, Vec2Q{}, h, inst.D)) continue;
        cc.h = h;
        cc.Dhat = max(inst.D, Ratio(static_cast<long>(h)) * err);
        if (indicator_C(cc)) ++hits;
    }
    return hits;
}

std::int64_t decomposed_count(const IrrationalSurrogate& gamma, std::int64_t b, const IVec2& a,
                              std::int64_t N, const Ratio& eps) {
    if (b < 1) throw ValidityError("decomposed_count: b must be positive");
    const Ratio br(static_cast<long>(b));
    const Vec2Q bg = br * gamma.value;
    const Vec2Q ab{Ratio(static_cast<long>(a[0])) / br, Ratio(static_cast<long>(a[1])) / br};
    const Vec2Q diff = gamma.value - ab;
    std::int64_t count = 0;
    for (std::int64_t m = 0; m <= N / b; ++m) {
        for (std::int64_t s = 1; s <= b && m * b + s <= N; ++s) {
            const Ratio mr(static_cast<long>(m)), sr(static_cast<long>(s));
            Vec2Q p = mr * bg + sr * ab + sr * diff;
            if (torus_norm(p) < eps) ++count;
        }
    }
    return count;
}

TriangleReport triangle_transfer(const IrrationalSurrogate& gamma, const FirstKindApprox& fk,
                                 std::int64_t N, const Ratio& D, const Ratio& tau) {
    TriangleReport rep;
    const Ratio err = first_kind_error(gamma, fk.B, fk.A);
    const Ratio Br(static_cast<long>(fk.B));
    const Vec2Q AB{Ratio(static_cast<long>(fk.A[0])) / Br, Ratio(static_cast<long>(fk.A[1])) / Br};
    for (std::int64_t h = 1; h <= N; ++h) {
        const Ratio hr(static_cast<long>(h));
        if (!(torus_norm(hr * gamma.value) < D)) continue;
        Ratio Dhat = max(D, hr * err);
        if (!le_power(Dhat, D, tau)) continue;
        ++rep.checked;
        Ratio x = torus_norm(hr * AB);
        if (!lt_power(x / Ratio(2), D, tau)) ++rep.violations;
    }
    return rep;
}

} // namespace klab

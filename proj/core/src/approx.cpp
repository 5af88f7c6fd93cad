#include "klab/approx.hpp"

#include "klab/arith.hpp"
#include "klab/errors.hpp"

#include <numeric>

namespace klab {

namespace {

// Tracks B*gamma_i mod 1 as an integer residue r/d while B advances by one.
struct AxisScan {
    BigInt n, d, r, dist;

    AxisScan(const Ratio& g, std::int64_t start) : d(g.den()) {
        mpz_fdiv_r(n.get_mpz_t(), g.num().get_mpz_t(), d.get_mpz_t());
        r = n * BigInt(static_cast<long>(start));
        mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), d.get_mpz_t());
        update_dist();
    }
    void step() {
        r += n;
        if (r >= d) r -= d;
        update_dist();
    }
    void update_dist() {
        dist = d - r;
        if (r < dist) dist = r;
    }
};

IVec2 nearest_vector(const IrrationalSurrogate& gamma, std::int64_t n) {
    IVec2 out{};
    for (int i = 0; i < 2; ++i)
        out[static_cast<std::size_t>(i)] = to_i64(nearest_integer(Ratio(static_cast<long>(n)) * gamma.value[i]));
    return out;
}

void check_coprime(const char* what, std::int64_t b, const IVec2& a) {
    std::int64_t g = std::gcd(std::gcd(a[0], a[1]), b);
    if (g != 1)
        throw InvariantViolation(std::string(what) + ": gcd(a1, a2, b) = " + std::to_string(g) +
                                 " for b = " + std::to_string(b));
}

template <class Pred>
std::int64_t scan(const IrrationalSurrogate& gamma, std::int64_t start, Pred&& ok, const std::string& what) {
    if (start < 1) start = 1;
    AxisScan ax(gamma.value.x, start), ay(gamma.value.y, start);
    BigInt scratch;
    for (std::int64_t B = start, iter = 0;; ++B, ++iter) {
        if (B > gamma.validity)
            throw ValidityError(what + ": search passed the surrogate validity bound " +
                                std::to_string(gamma.validity));
        if (iter >= kScanBudget)
            throw BudgetExceeded(what + ": scan budget of " + std::to_string(kScanBudget) + " steps exhausted");
        if (ok(B, ax, ay, scratch)) return B;
        ax.step();
        ay.step();
    }
}

} // namespace

const char* branch_name(Branch b) {
    return b == Branch::FirstKind ? "FirstKind" : "Dirichlet";
}

std::int64_t ShiftContext::modulus() const {
    return branch == Branch::FirstKind ? first_kind.B : dirichlet->b;
}

IVec2 ShiftContext::shift() const {
    return branch == Branch::FirstKind ? first_kind.A : dirichlet->a;
}

BigInt nearest_integer(const Ratio& x) {
    BigInt f = x.floor();
    Ratio twice = (x - Ratio(f)) * Ratio(2);
    if (twice > Ratio(1)) return f + 1;
    if (twice < Ratio(1)) return f;
    return mpz_even_p(f.get_mpz_t()) ? f : BigInt(f + 1);
}

FirstKindApprox first_kind(const IrrationalSurrogate& gamma, long k, std::int64_t start) {
    if (k < 0) throw ValidityError("first_kind: level must be nonnegative");
    auto ok = [k](std::int64_t B, const AxisScan& ax, const AxisScan& ay, BigInt& s) {
        for (const AxisScan* a : {&ax, &ay}) {
            // 2^k * dist < B * d
            mpz_mul_ui(s.get_mpz_t(), a->d.get_mpz_t(), static_cast<unsigned long>(B));
            BigInt lhs;
            mpz_mul_2exp(lhs.get_mpz_t(), a->dist.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
            if (!(lhs < s)) return false;
        }
        return true;
    };
    FirstKindApprox out;
    out.k = k;
    out.B = scan(gamma, start, ok, "first_kind at level k = " + std::to_string(k));
    out.A = nearest_vector(gamma, out.B);
    check_coprime("first_kind", out.B, out.A);
    return out;
}

FirstKindApprox first_kind_within_sq(const IrrationalSurrogate& gamma, const Ratio& radius_sq) {
    if (radius_sq.sign() <= 0) throw ValidityError("first_kind_within_sq: radius must be positive");
    const BigInt& p = radius_sq.num();
    const BigInt& q = radius_sq.den();
    auto ok = [&](std::int64_t B, const AxisScan& ax, const AxisScan& ay, BigInt& s) {
        for (const AxisScan* a : {&ax, &ay}) {
            // dist^2 * q < p * B^2 * d^2
            BigInt lhs = a->dist * a->dist * q;
            s = a->d * BigInt(static_cast<long>(B));
            s = s * s * p;
            if (!(lhs < s)) return false;
        }
        return true;
    };
    FirstKindApprox out;
    out.k = -1;
    out.B = scan(gamma, 1, ok, "first_kind within radius^2 " + radius_sq.to_string());
    out.A = nearest_vector(gamma, out.B);
    check_coprime("first_kind_within_sq", out.B, out.A);
    return out;
}

DirichletApprox dirichlet(const IrrationalSurrogate& gamma, const FirstKindApprox& fk) {
    if (fk.B < 2) throw ValidityError("dirichlet: requires B >= 2");
    const BigInt Bk = static_cast<long>(fk.B);
    AxisScan ax(gamma.value.x, 1), ay(gamma.value.y, 1);
    std::int64_t found = 0;
    for (std::int64_t b = 1; b < fk.B; ++b) {
        bool ok = true;
        for (const AxisScan* a : {&ax, &ay}) {
            // dist^2 * B <= d^2
            if (!(a->dist * a->dist * Bk <= a->d * a->d)) { ok = false; break; }
        }
        if (ok) { found = b; break; }
        ax.step();
        ay.step();
    }
    if (found == 0)
        throw InvariantViolation("dirichlet: no b < B = " + std::to_string(fk.B) +
                                 " with ||b gamma|| <= B^-1/2 (surrogate validity breach)");
    DirichletApprox out;
    out.k = fk.k;
    out.b = found;
    out.a = nearest_vector(gamma, found);
    check_coprime("dirichlet", out.b, out.a);
    if (fk.k >= 0) {
        BigInt lhs = BigInt(static_cast<long>(found)) * BigInt(static_cast<long>(found)) * Bk;
        BigInt rhs;
        mpz_ui_pow_ui(rhs.get_mpz_t(), 4, static_cast<unsigned long>(fk.k));
        if (lhs > rhs)
            throw InvariantViolation("dirichlet: b^2 B <= 4^k fails at k = " + std::to_string(fk.k) +
                                     " (b = " + std::to_string(found) + ", B = " + std::to_string(fk.B) + ")");
    }
    return out;
}

static ShiftContext assemble_context(const IrrationalSurrogate& gamma, long k, const Ratio& sigma,
                                     std::int64_t start) {
    ShiftContext ctx;
    ctx.k = k;
    ctx.sigma = sigma;
    ctx.first_kind = first_kind(gamma, k, start);
    if (le_pow2_sigma(BigInt(static_cast<long>(ctx.first_kind.B)), k, sigma)) {
        ctx.branch = Branch::FirstKind;
    } else {
        ctx.branch = Branch::Dirichlet;
        ctx.dirichlet = dirichlet(gamma, ctx.first_kind);
    }
    return ctx;
}

ShiftContext shift_context(const IrrationalSurrogate& gamma, long k, const Ratio& sigma) {
    if (sigma.sign() <= 0 || sigma >= Ratio(1)) throw ValidityError("shift_context: sigma must lie in (0,1)");
    return assemble_context(gamma, k, sigma, 1);
}

std::vector<std::pair<BigInt, BigInt>> convergents_1d(const std::vector<std::int64_t>& cf, int n) {
    if (n < 0) throw ValidityError("convergents_1d: n must be nonnegative");
    auto a = expand_cf(cf, static_cast<std::size_t>(n));
    std::vector<std::pair<BigInt, BigInt>> out;
    BigInt pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
    for (auto ai : a) {
        BigInt A = static_cast<long>(ai);
        BigInt p = A * pm1 + pm2;
        BigInt q = A * qm1 + qm2;
        out.emplace_back(p, q);
        pm2 = pm1; pm1 = p;
        qm2 = qm1; qm1 = q;
    }
    return out;
}

Ratio first_kind_error(const IrrationalSurrogate& gamma, std::int64_t B, const IVec2& A) {
    Ratio b(static_cast<long>(B));
    Vec2Q approx{Ratio(static_cast<long>(A[0])) / b, Ratio(static_cast<long>(A[1])) / b};
    return max_abs(gamma.value - approx);
}

Ratio norm_multiple(const IrrationalSurrogate& gamma, std::int64_t n) {
    return torus_norm(Ratio(static_cast<long>(n)) * gamma.value);
}

ApproxTable::ApproxTable(IrrationalSurrogate gamma, Ratio sigma)
    : gamma_(std::move(gamma)), sigma_(std::move(sigma)) {
    if (sigma_.sign() <= 0 || sigma_ >= Ratio(1)) throw ValidityError("ApproxTable: sigma must lie in (0,1)");
}

void ApproxTable::warm(long k_max) {
    while (warmed_to() < k_max) {
        long k = warmed_to() + 1;
        std::int64_t start = levels_.empty() ? 1 : levels_.back().first_kind.B;
        ShiftContext ctx = assemble_context(gamma_, k, sigma_, start);
        levels_.push_back(std::move(ctx));
    }
}

const ShiftContext& ApproxTable::at(long k) const {
    if (k < 0 || k > warmed_to())
        throw ValidityError("ApproxTable: level " + std::to_string(k) + " not warmed (warmed to " +
                            std::to_string(warmed_to()) + ")");
    return levels_[static_cast<std::size_t>(k)];
}

} // namespace klab

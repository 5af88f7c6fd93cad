#include "klab/shiftred.hpp"

#include "klab/arith.hpp"
#include "klab/errors.hpp"

#include <algorithm>
#include <numeric>

namespace klab {

void ApproxFunction::set(std::int64_t q, const Ratio& value) {
    if (q < 1) throw ValidityError("ApproxFunction: q must be positive");
    if (value.sign() <= 0 || value > Ratio(1, 2))
        throw ValidityError("ApproxFunction: psi(" + std::to_string(q) + ") = " + value.to_string() +
                            " outside (0, 1/2]");
    values_[q] = value;
}

const Ratio& ApproxFunction::at(std::int64_t q) const {
    auto it = values_.find(q);
    if (it == values_.end()) throw ValidityError("q = " + std::to_string(q) + " is not in the support of psi");
    return it->second;
}

std::vector<std::int64_t> ApproxFunction::in_range(std::int64_t lo, std::int64_t hi) const {
    std::vector<std::int64_t> out;
    for (auto it = values_.upper_bound(lo); it != values_.end() && it->first <= hi; ++it) out.push_back(it->first);
    return out;
}

std::vector<std::int64_t> ApproxFunction::support() const {
    std::vector<std::int64_t> out;
    out.reserve(values_.size());
    for (const auto& kv : values_) out.push_back(kv.first);
    return out;
}

std::int64_t ApproxFunction::max_q() const {
    return values_.empty() ? 0 : values_.rbegin()->first;
}

long dyadic_level(const Ratio& psi) {
    if (psi.sign() <= 0 || psi > Ratio(1, 2))
        throw ValidityError("dyadic_level: psi = " + psi.to_string() + " outside (0, 1/2]");
    // 2^(k-1) <= 1/psi < 2^k, so k = bit_length(floor(1/psi)).
    Ratio inv = Ratio(1) / psi;
    return bit_length(inv.floor());
}

Ratio power_law_value(std::int64_t q, const Ratio& s, long precision_bits) {
    if (q < 1) throw ValidityError("power_law_value: q must be positive");
    if (s.sign() < 0) throw ValidityError("power_law_value: exponent must be nonnegative");
    unsigned long p = s.num().get_ui();
    unsigned long d = s.den().get_ui();
    // n = largest integer with n^d q^p <= 2^(P d)
    BigInt top;
    mpz_ui_pow_ui(top.get_mpz_t(), 2, static_cast<unsigned long>(precision_bits) * d);
    BigInt qp = ipow(BigInt(static_cast<long>(q)), p);
    BigInt x = top / qp;
    BigInt n;
    mpz_root(n.get_mpz_t(), x.get_mpz_t(), d);
    if (n == 0)
        throw ValidityError("power_law_value: q^-s below the precision 2^-" + std::to_string(precision_bits));
    Ratio v = Ratio(n) * pow2(-precision_bits);
    return min(v, Ratio(1, 2));
}

ApproxFunction psi_constant(const std::vector<std::int64_t>& support, const Ratio& value) {
    ApproxFunction f;
    for (auto q : support) f.set(q, value);
    return f;
}

ApproxFunction psi_power_law(const std::vector<std::int64_t>& support, const Ratio& s, long precision_bits) {
    ApproxFunction f;
    for (auto q : support) f.set(q, power_law_value(q, s, precision_bits));
    return f;
}

ApproxFunction psi_sparse_levels(const std::vector<std::int64_t>& support, Prng& rng) {
    ApproxFunction f;
    for (auto q : support) {
        long a = bit_length(BigInt(static_cast<long>(q - 1)));  // q in (2^a, 2^(a+1)]
        if (q == 1) a = 0;
        std::int64_t t = rng.range(1, 256);
        long k = static_cast<long>(rng.range(2, a + 8));
        f.set(q, Ratio(256 + t) * pow2(-(8 + k)));
    }
    return f;
}

std::vector<std::int64_t> block_support(long a, std::int64_t count, Prng& rng) {
    if (a < 0 || a > 40) throw ValidityError("block_support: block exponent out of range");
    std::int64_t lo = (std::int64_t{1} << a) + 1;
    std::int64_t hi = std::int64_t{1} << (a + 1);
    count = std::min(count, hi - lo + 1);
    auto pts = sample_without_replacement(lo, hi, count, rng);
    if (a >= 3)
        for (std::int64_t c = 9; c <= 16; ++c) pts.push_back(c << (a - 3));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::int64_t pi_q(std::int64_t q, std::int64_t M) {
    if (q < 1) throw ValidityError("pi_q: q must be positive");
    std::int64_t out = 1;
    for (auto p : prime_factors(q))
        if (M % p != 0) out *= p;
    return out;
}

std::int64_t pi_q(std::int64_t q, const ShiftContext& ctx) {
    return pi_q(q, ctx.modulus());
}

std::vector<IVec2> ResidueSet::members() const {
    std::vector<IVec2> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t u1 = 0; u1 < q; ++u1)
        for (std::int64_t u2 = 0; u2 < q; ++u2)
            if (contains(u1, u2)) out.push_back({u1, u2});
    return out;
}

ResidueSet residue_set(std::int64_t q, std::int64_t M, const IVec2& m) {
    if (q < 1) throw ValidityError("residue_set: q must be positive");
    if (M < 1) throw ValidityError("residue_set: modulus must be positive");
    if (q > (std::int64_t{1} << 15)) throw ValidityError("residue_set: q too large for enumeration");
    __int128 Mq128 = static_cast<__int128>(M) * q;
    if (Mq128 > (static_cast<__int128>(1) << 62)) throw ValidityError("residue_set: M q exceeds 2^62");
    const std::int64_t Mq = static_cast<std::int64_t>(Mq128);
    auto reduce = [&](std::int64_t u, std::int64_t shift) {
        __int128 v = static_cast<__int128>(M) * u + shift;
        v %= Mq;
        if (v < 0) v += Mq;
        return static_cast<std::int64_t>(v);
    };
    ResidueSet rs;
    rs.q = q;
    rs.M = M;
    rs.m = m;
    rs.member.assign(static_cast<std::size_t>(q * q), 0);
    // second coordinate residues are shared by every row
    std::vector<std::int64_t> col(static_cast<std::size_t>(q));
    for (std::int64_t u2 = 0; u2 < q; ++u2) col[static_cast<std::size_t>(u2)] = reduce(u2, m[1]);
    for (std::int64_t u1 = 0; u1 < q; ++u1) {
        std::int64_t g1 = std::gcd(reduce(u1, m[0]), Mq);
        std::uint8_t* row = rs.member.data() + u1 * q;
        if (g1 == 1) {
            std::fill(row, row + q, std::uint8_t{1});
            rs.count += q;
            continue;
        }
        for (std::int64_t u2 = 0; u2 < q; ++u2) {
            if (std::gcd(g1, col[static_cast<std::size_t>(u2)]) == 1) {
                row[u2] = 1;
                ++rs.count;
            }
        }
    }
    return rs;
}

ResidueSet residue_set(std::int64_t q, const ShiftContext& ctx) {
    ResidueSet rs = residue_set(q, ctx.modulus(), ctx.shift());
    rs.k = ctx.k;
    rs.branch = ctx.branch;
    return rs;
}

BigInt cardinality_formula(std::int64_t q, std::int64_t M) {
    BigInt out = BigInt(static_cast<long>(q)) * BigInt(static_cast<long>(q));
    for (auto p : prime_factors(pi_q(q, M))) {
        BigInt p2 = BigInt(static_cast<long>(p)) * BigInt(static_cast<long>(p));
        out = out / p2 * (p2 - 1);
    }
    return out;
}

BigInt cardinality_formula(std::int64_t q, const ShiftContext& ctx) {
    return cardinality_formula(q, ctx.modulus());
}

Ratio density_floor(std::int64_t q) {
    Ratio out = Ratio(static_cast<long>(q)) * Ratio(static_cast<long>(q));
    if (q < 2) return out;
    std::vector<std::uint8_t> composite(static_cast<std::size_t>(q + 1), 0);
    for (std::int64_t p = 2; p <= q; ++p) {
        if (composite[static_cast<std::size_t>(p)]) continue;
        for (std::int64_t m = p * p; m <= q; m += p) composite[static_cast<std::size_t>(m)] = 1;
        Ratio p2 = Ratio(static_cast<long>(p)) * Ratio(static_cast<long>(p));
        out *= (p2 - Ratio(1)) / p2;
    }
    return out;
}

namespace {

void check_box(const Vec2Q& y) {
    for (int i = 0; i < 2; ++i)
        if (y[i].sign() < 0 || y[i] > Ratio(1)) throw ValidityError("box_count: y must lie in [0,1]^2");
}

// Largest admissible coordinate: min(q - 1, floor(q y)).
std::int64_t box_limit(std::int64_t q, const Ratio& y) {
    BigInt f = (Ratio(static_cast<long>(q)) * y).floor();
    return std::min<std::int64_t>(q - 1, to_i64(f));
}

} // namespace

std::int64_t box_count(const ResidueSet& rs, const Vec2Q& y) {
    check_box(y);
    std::int64_t X1 = box_limit(rs.q, y.x), X2 = box_limit(rs.q, y.y);
    std::int64_t n = 0;
    for (std::int64_t u1 = 0; u1 <= X1; ++u1)
        for (std::int64_t u2 = 0; u2 <= X2; ++u2)
            if (rs.contains(u1, u2)) ++n;
    return n;
}

std::int64_t box_count_mobius(std::int64_t q, std::int64_t M, const IVec2& m, const Vec2Q& y) {
    check_box(y);
    std::int64_t X[2] = {box_limit(q, y.x), box_limit(q, y.y)};
    auto divs = squarefree_divisors(prime_factors(pi_q(q, M)));
    std::int64_t total = 0;
    for (std::size_t i = 0; i < divs.value.size(); ++i) {
        std::int64_t d = divs.value[i];
        std::int64_t minv = mod_inverse(floor_mod(M, d), d);
        std::int64_t prod = 1;
        for (int ax = 0; ax < 2; ++ax) {
            // #{0 <= u <= X : M u + m = 0 mod d}, u = alpha mod d
            std::int64_t alpha = static_cast<std::int64_t>(
                (static_cast<__int128>(floor_mod(-m[static_cast<std::size_t>(ax)], d)) * minv) % d);
            std::int64_t c = X[ax] >= alpha ? (X[ax] - alpha) / d + 1 : 0;
            prod *= c;
        }
        total += divs.mu[i] * prod;
    }
    return total;
}

std::vector<std::vector<std::int64_t>> box_count_grid(const ResidueSet& rs, std::int64_t n) {
    const std::int64_t q = rs.q;
    // prefix[a][b] = #{u in S_q : u1 < a, u2 < b}
    std::vector<std::vector<std::int64_t>> prefix(static_cast<std::size_t>(q + 1),
                                                  std::vector<std::int64_t>(static_cast<std::size_t>(q + 1), 0));
    for (std::int64_t a = 1; a <= q; ++a)
        for (std::int64_t b = 1; b <= q; ++b)
            prefix[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                prefix[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b)] +
                prefix[static_cast<std::size_t>(a)][static_cast<std::size_t>(b - 1)] -
                prefix[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] +
                (rs.contains(a - 1, b - 1) ? 1 : 0);
    std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(n + 1),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(n + 1), 0));
    for (std::int64_t i = 0; i <= n; ++i)
        for (std::int64_t j = 0; j <= n; ++j) {
            std::int64_t X1 = box_limit(q, Ratio(static_cast<long>(i), static_cast<long>(n)));
            std::int64_t X2 = box_limit(q, Ratio(static_cast<long>(j), static_cast<long>(n)));
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                prefix[static_cast<std::size_t>(X1 + 1)][static_cast<std::size_t>(X2 + 1)];
        }
    return out;
}

SquareFamily square_family(std::int64_t q, const ApproxFunction& psi, const IrrationalSurrogate& gamma,
                           const ApproxTable& table, bool primed) {
    const Ratio& v = psi.at(q);
    gamma.require_within("q", q);
    SquareFamily fam;
    fam.q = q;
    fam.radius = v / Ratio(static_cast<long>(q));
    fam.primed = primed;
    const Ratio qq(static_cast<long>(q));
    auto push = [&](std::int64_t u1, std::int64_t u2) {
        fam.residues.push_back({u1, u2});
        Vec2Q c{(Ratio(static_cast<long>(u1)) + gamma.value.x) / qq, (Ratio(static_cast<long>(u2)) + gamma.value.y) / qq};
        fam.centers.push_back(mod1(c));
    };
    if (primed) {
        ResidueSet rs = residue_set(q, table.at(dyadic_level(v)));
        for (std::int64_t u1 = 0; u1 < q; ++u1)
            for (std::int64_t u2 = 0; u2 < q; ++u2)
                if (rs.contains(u1, u2)) push(u1, u2);
    } else {
        for (std::int64_t u1 = 0; u1 < q; ++u1)
            for (std::int64_t u2 = 0; u2 < q; ++u2) push(u1, u2);
    }
    return fam;
}

SquareFamily square_family(std::int64_t q, const ApproxFunction& psi, const IrrationalSurrogate& gamma,
                           const Ratio& sigma, bool primed) {
    ApproxTable table(gamma, sigma);
    table.warm(dyadic_level(psi.at(q)));
    return square_family(q, psi, gamma, table, primed);
}

} // namespace klab

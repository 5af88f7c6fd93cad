#include "klab/measure.hpp"

#include "klab/arith.hpp"
#include "klab/errors.hpp"

#include <algorithm>
#include <numeric>

namespace klab {

const char* bullet_name(Bullet b) {
    return b == Bullet::K ? "k" : "l";
}

PairGeometry pair_geometry(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const ApproxTable& table) {
    if (r < 1 || r >= q) throw ValidityError("pair_geometry: requires 1 <= r < q");
    gamma.require_within("q", q);
    PairGeometry G;
    G.q = q;
    G.r = r;
    G.psi_q = psi.at(q);
    G.psi_r = psi.at(r);
    G.g = std::gcd(q, r);
    G.qp = q / G.g;
    G.rp = r / G.g;
    G.h = G.qp - G.rp;
    Ratio rq = G.psi_q / Ratio(static_cast<long>(q));
    Ratio rr = G.psi_r / Ratio(static_cast<long>(r));
    G.Delta = Ratio(2) * max(rq, rr);
    G.delta = Ratio(2) * min(rq, rr);
    G.D = G.Delta * Ratio(static_cast<long>(q)) * Ratio(static_cast<long>(r)) / Ratio(static_cast<long>(G.g));
    G.bullet = rq > rr ? Bullet::K : Bullet::L;
    G.level_k = dyadic_level(G.psi_q);
    G.level_l = dyadic_level(G.psi_r);
    G.bullet_level = G.bullet == Bullet::K ? G.level_k : G.level_l;
    const FirstKindApprox& fk = table.at(G.bullet_level).first_kind;
    G.B_bullet = fk.B;
    G.A_bullet = fk.A;
    G.Dhat = max(G.D, Ratio(static_cast<long>(G.h)) * first_kind_error(gamma, fk.B, fk.A));
    return G;
}

PairGeometry pair_geometry(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const Ratio& sigma) {
    ApproxTable table(gamma, sigma);
    table.warm(std::max(dyadic_level(psi.at(q)), dyadic_level(psi.at(r))));
    return pair_geometry(q, r, psi, gamma, table);
}

Ratio measure_single(const SquareFamily& fam) {
    Ratio side = Ratio(2) * fam.radius;
    return Ratio(static_cast<long>(fam.centers.size())) * side * side;
}

Ratio measure_single(std::int64_t q, const ApproxFunction& psi, const ApproxTable& table, bool primed) {
    const Ratio& v = psi.at(q);
    if (!primed) return Ratio(4) * v * v;
    Ratio rad = v / Ratio(static_cast<long>(q));
    BigInt card = cardinality_formula(q, table.at(dyadic_level(v)));
    return Ratio(4) * rad * rad * Ratio(card);
}

// ---------------------------------------------------------------------------
// Brute force

namespace {

struct AxisEntry {
    std::int64_t u, v;
    BigInt x;    // signed offset, scaled by W, in [-W/2, W/2)
    BigInt len;  // overlap length, scaled by W
};

std::vector<AxisEntry> axis_entries(const SquareFamily& a, const SquareFamily& b, int axis, BigInt& W) {
    // coordinate of each residue value along this axis
    auto coords = [axis](const SquareFamily& f) {
        std::vector<std::pair<bool, Ratio>> c(static_cast<std::size_t>(f.q));
        for (std::size_t i = 0; i < f.residues.size(); ++i) {
            auto u = f.residues[i][static_cast<std::size_t>(axis)];
            c[static_cast<std::size_t>(u)] = {true, f.centers[i][axis]};
        }
        return c;
    };
    auto ca = coords(a), cb = coords(b);
    W = 1;
    auto fold = [&W](const Ratio& x) { mpz_lcm(W.get_mpz_t(), W.get_mpz_t(), x.den().get_mpz_t()); };
    for (const auto& c : ca) if (c.first) fold(c.second);
    for (const auto& c : cb) if (c.first) fold(c.second);
    fold(a.radius);
    fold(b.radius);
    const Ratio Wr(W);
    auto scaled = [&](const Ratio& x) { return (x * Wr).num(); };
    BigInt RA = scaled(a.radius), RB = scaled(b.radius);
    BigInt DW = scaled(Ratio(2) * max(a.radius, b.radius));
    std::vector<BigInt> XA(ca.size()), XB(cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) if (ca[i].first) XA[i] = scaled(ca[i].second);
    for (std::size_t i = 0; i < cb.size(); ++i) if (cb[i].first) XB[i] = scaled(cb[i].second);

    std::vector<AxisEntry> out;
    BigInt x, y, hi, lo, acc, twice;
    for (std::size_t u = 0; u < ca.size(); ++u) {
        if (!ca[u].first) continue;
        for (std::size_t v = 0; v < cb.size(); ++v) {
            if (!cb[v].first) continue;
            x = XB[v] - XA[u];
            twice = 2 * x;
            if (twice >= W) x -= W;
            else if (twice < -W) x += W;
            if (!(abs(x) < DW)) continue;
            acc = 0;
            for (int n = -1; n <= 1; ++n) {
                y = x + n * W;
                hi = y + RB;
                if (RA < hi) hi = RA;
                lo = y - RB;
                if (lo < -RA) lo = -RA;
                if (hi > lo) acc += hi - lo;
            }
            out.push_back({static_cast<std::int64_t>(u), static_cast<std::int64_t>(v), x, acc});
        }
    }
    return out;
}

std::vector<std::uint8_t> membership(const SquareFamily& f) {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(f.q * f.q), 0);
    for (const auto& u : f.residues) m[static_cast<std::size_t>(u[0] * f.q + u[1])] = 1;
    return m;
}

} // namespace

OverlapResult overlap_bruteforce(const SquareFamily& a, const SquareFamily& b) {
    BigInt W1, W2;
    auto e1 = axis_entries(a, b, 0, W1);
    auto e2 = axis_entries(a, b, 1, W2);
    auto ma = membership(a), mb = membership(b);
    BigInt num = 0;
    std::int64_t pairs = 0;
    std::vector<std::pair<const BigInt*, const BigInt*>> offsets;
    for (const auto& p : e1) {
        for (const auto& s : e2) {
            if (!ma[static_cast<std::size_t>(p.u * a.q + s.u)]) continue;
            if (!mb[static_cast<std::size_t>(p.v * b.q + s.v)]) continue;
            ++pairs;
            num += p.len * s.len;
            offsets.emplace_back(&p.x, &s.x);
        }
    }
    auto less = [](const auto& l, const auto& r) {
        int c = cmp(*l.first, *r.first);
        return c != 0 ? c < 0 : cmp(*l.second, *r.second) < 0;
    };
    auto same = [](const auto& l, const auto& r) { return *l.first == *r.first && *l.second == *r.second; };
    std::sort(offsets.begin(), offsets.end(), less);
    auto values = std::unique(offsets.begin(), offsets.end(), same) - offsets.begin();
    OverlapResult res;
    res.measure = Ratio(num, W1 * W2);
    res.pair_count = pairs;
    res.value_count = static_cast<std::int64_t>(values);
    return res;
}

OverlapResult overlap_bruteforce(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                                 const IrrationalSurrogate& gamma, const ApproxTable& table, bool primed) {
    auto fa = square_family(q, psi, gamma, table, primed);
    auto fb = square_family(r, psi, gamma, table, primed);
    OverlapResult res = overlap_bruteforce(fa, fb);
    res.geometry = pair_geometry(q, r, psi, gamma, table);
    return res;
}

// ---------------------------------------------------------------------------
// Closed form

namespace {

BigInt from_i128(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    BigInt hi = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
    BigInt lo = static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    BigInt out = (hi << 64) + lo;
    return neg ? BigInt(-out) : out;
}

struct APStat {
    std::int64_t n = 0;
    __int128 sum = 0;
};

// Members m = rho (mod G) of [lo, hi].
APStat ap_stat(std::int64_t rho, std::int64_t G, std::int64_t lo, std::int64_t hi) {
    APStat s;
    if (lo > hi) return s;
    std::int64_t first = lo + floor_mod(rho - lo, G);
    if (first > hi) return s;
    s.n = (hi - first) / G + 1;
    s.sum = static_cast<__int128>(s.n) * first + static_cast<__int128>(G) * s.n * (s.n - 1) / 2;
    return s;
}

// Integers m with |m + xf| < C, for xf in [0,1): [lo, hi].
struct MRange {
    std::int64_t lo = 1, hi = 0;
};

MRange strict_window(const Ratio& C, const Ratio& xf) {
    MRange w;
    w.hi = to_i64((C - xf).ceil()) - 1;
    w.lo = to_i64((-C - xf).floor()) + 1;
    return w;
}

struct TentStat {
    std::int64_t N = 0;  // terms with positive profile
    __int128 I = 0;      // sum over m < 0 of m minus sum over m >= 0 of m
    std::int64_t J = 0;  // #(m < 0) - #(m >= 0)
};

// sum over m = rho (G) in w of (C - |m + xf|) = N C + I + J xf
TentStat tent(std::int64_t rho, std::int64_t G, const MRange& w) {
    TentStat t;
    if (w.lo > w.hi) return t;
    APStat neg = ap_stat(rho, G, w.lo, std::min<std::int64_t>(w.hi, -1));
    APStat pos = ap_stat(rho, G, std::max<std::int64_t>(w.lo, 0), w.hi);
    t.N = neg.n + pos.n;
    t.I = neg.sum - pos.sum;
    t.J = neg.n - pos.n;
    return t;
}

struct AxisData {
    std::int64_t X = 0;  // floor(h gamma_i)
    Ratio xf;            // frac(h gamma_i)
    MRange plus, minus;
};

struct ModulusData {
    std::vector<std::int64_t> primes;
    SquarefreeDivisors divs;
    // alpha[axis][i]: residue of u mod divs.value[i] with divs.value[i] | M u + m
    std::vector<std::int64_t> alpha[2];
    // alpha for each prime, per axis
    std::vector<std::int64_t> prime_alpha[2];
};

ModulusData modulus_data(std::int64_t q, const ShiftContext* ctx) {
    ModulusData md;
    if (ctx) {
        md.primes = prime_factors(pi_q(q, ctx->modulus()));
    }
    md.divs = squarefree_divisors(md.primes);
    std::int64_t M = ctx ? ctx->modulus() : 1;
    IVec2 m = ctx ? ctx->shift() : IVec2{0, 0};
    for (int ax = 0; ax < 2; ++ax) {
        for (auto d : md.divs.value) {
            std::int64_t inv = mod_inverse(floor_mod(M, d), d);
            md.alpha[ax].push_back(static_cast<std::int64_t>(
                static_cast<__int128>(floor_mod(-m[static_cast<std::size_t>(ax)], d)) * inv % d));
        }
        for (auto p : md.primes) {
            std::int64_t inv = mod_inverse(floor_mod(M, p), p);
            md.prime_alpha[ax].push_back(static_cast<std::int64_t>(
                static_cast<__int128>(floor_mod(-m[static_cast<std::size_t>(ax)], p)) * inv % p));
        }
    }
    return md;
}

std::uint32_t prime_mask(const ModulusData& md, int axis, std::int64_t u) {
    std::uint32_t mask = 0;
    for (std::size_t j = 0; j < md.primes.size(); ++j)
        if (floor_mod(u - md.prime_alpha[axis][j], md.primes[j]) == 0) mask |= (1u << j);
    return mask;
}

constexpr std::int64_t kClassCap = 1 << 14;
constexpr std::int64_t kWalkCap = std::int64_t{1} << 22;
constexpr std::int64_t kPairCap = std::int64_t{1} << 24;

void count_values(OverlapResult& res, const std::array<AxisData, 2>& axes, const ModulusData& mq,
                  const ModulusData& mr, bool primed, const Ratio& D) {
    const PairGeometry& G = res.geometry;
    const std::int64_t L = G.g * G.qp * G.rp;
    std::vector<std::int64_t> classes[2];
    for (int ax = 0; ax < 2; ++ax) {
        MRange w = strict_window(D, axes[static_cast<std::size_t>(ax)].xf);
        if (w.hi - w.lo + 1 > kClassCap) return;
        auto& cl = classes[ax];
        for (std::int64_t m = w.lo; m <= w.hi; ++m) cl.push_back(floor_mod(m - axes[static_cast<std::size_t>(ax)].X, L));
        std::sort(cl.begin(), cl.end());
        cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
    }
    const auto n1 = static_cast<std::int64_t>(classes[0].size());
    const auto n2 = static_cast<std::int64_t>(classes[1].size());
    if (!primed) {
        res.value_count = n1 * n2;
        res.pair_count = G.g * G.g * n1 * n2;
        return;
    }
    if ((n1 + n2) * G.g > kWalkCap) return;
    // x0 q' - y0 r' = 1
    std::int64_t gg, x, y;
    ext_gcd(G.qp, G.rp, gg, x, y);
    const std::int64_t x0 = floor_mod(x, G.r), y0 = floor_mod(-y, G.q);
    const auto shift = static_cast<unsigned>(mq.primes.size());
    using Hist = std::vector<std::pair<std::uint32_t, std::int64_t>>;
    std::vector<Hist> hist[2];
    for (int ax = 0; ax < 2; ++ax) {
        for (auto t : classes[ax]) {
            std::vector<std::uint32_t> masks;
            masks.reserve(static_cast<std::size_t>(G.g));
            for (std::int64_t s = 0; s < G.g; ++s) {
                auto u = static_cast<std::int64_t>((static_cast<__int128>(t) * y0 + static_cast<__int128>(G.qp) * s) % G.q);
                auto v = static_cast<std::int64_t>((static_cast<__int128>(t) * x0 + static_cast<__int128>(G.rp) * s) % G.r);
                masks.push_back(prime_mask(mq, ax, u) | (prime_mask(mr, ax, v) << shift));
            }
            std::sort(masks.begin(), masks.end());
            Hist h;
            for (auto c : masks) {
                if (!h.empty() && h.back().first == c) ++h.back().second;
                else h.push_back({c, 1});
            }
            hist[ax].push_back(std::move(h));
        }
    }
    std::int64_t work = 0;
    for (const auto& a : hist[0])
        for (const auto& b : hist[1]) work += static_cast<std::int64_t>(a.size() * b.size());
    if (work > kPairCap) return;
    std::int64_t values = 0, pairs = 0;
    for (const auto& a : hist[0]) {
        for (const auto& b : hist[1]) {
            std::int64_t p = 0;
            for (const auto& [c1, h1] : a)
                for (const auto& [c2, h2] : b)
                    if ((c1 & c2) == 0) p += h1 * h2;
            if (p > 0) {
                ++values;
                pairs += p;
            }
        }
    }
    res.value_count = values;
    res.pair_count = pairs;
}

} // namespace

OverlapResult overlap_fast(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const ApproxTable& table, bool primed,
                           Detail detail) {
    OverlapResult res;
    res.geometry = pair_geometry(q, r, psi, gamma, table);
    const PairGeometry& G = res.geometry;
    const std::int64_t L = G.g * G.qp * G.rp;
    const Ratio Lr(static_cast<long>(L));

    const Ratio a = G.psi_q / Ratio(static_cast<long>(q));
    const Ratio b = G.psi_r / Ratio(static_cast<long>(r));
    const Ratio Cp = (a + b) * Lr;
    const Ratio Cm = (a - b).abs() * Lr;
    BigInt Wc;
    mpz_lcm(Wc.get_mpz_t(), Cp.den().get_mpz_t(), Cm.den().get_mpz_t());
    const BigInt CpN = (Cp * Ratio(Wc)).num();
    const BigInt CmN = (Cm * Ratio(Wc)).num();

    std::array<AxisData, 2> axes;
    for (int ax = 0; ax < 2; ++ax) {
        Ratio hg = Ratio(static_cast<long>(G.h)) * gamma.value[ax];
        auto& d = axes[static_cast<std::size_t>(ax)];
        d.X = to_i64(hg.floor());
        d.xf = hg - Ratio(static_cast<long>(d.X));
        d.plus = strict_window(Cp, d.xf);
        d.minus = strict_window(Cm, d.xf);
    }

    const ShiftContext* cq = primed ? &table.at(G.level_k) : nullptr;
    const ShiftContext* cr = primed ? &table.at(G.level_l) : nullptr;
    ModulusData mq = modulus_data(q, cq), mr = modulus_data(r, cr);

    BigInt acc0 = 0, acc1 = 0, acc2 = 0, acc3 = 0;
    BigInt P[2], Qc[2], s, t;
    for (std::size_t i = 0; i < mq.divs.value.size(); ++i) {
        const std::int64_t d = mq.divs.value[i];
        for (std::size_t j = 0; j < mr.divs.value.size(); ++j) {
            const std::int64_t e = mr.divs.value[j];
            const std::int64_t Gd = std::gcd(std::gcd(G.rp * d, G.qp * e), L);
            const std::int64_t K = static_cast<std::int64_t>(static_cast<__int128>(q) * r / d / e * Gd / L);
            bool zero = false;
            for (int ax = 0; ax < 2 && !zero; ++ax) {
                const auto& A = axes[static_cast<std::size_t>(ax)];
                __int128 c0 = static_cast<__int128>(G.qp) * mr.alpha[ax][j] -
                              static_cast<__int128>(G.rp) * mq.alpha[ax][i];
                std::int64_t rho = static_cast<std::int64_t>(((c0 + A.X) % Gd + Gd) % Gd);
                TentStat tp = tent(rho, Gd, A.plus), tm = tent(rho, Gd, A.minus);
                if (tp.N == 0 && tm.N == 0) { zero = true; break; }
                P[ax] = CpN * BigInt(static_cast<long>(tp.N)) - CmN * BigInt(static_cast<long>(tm.N)) +
                        Wc * from_i128(tp.I - tm.I);
                Qc[ax] = Wc * BigInt(static_cast<long>(tp.J - tm.J));
            }
            if (zero) continue;
            s = BigInt(static_cast<long>(mq.divs.mu[i] * mr.divs.mu[j])) * BigInt(static_cast<long>(K)) *
                BigInt(static_cast<long>(K));
            acc0 += s * P[0] * P[1];
            acc1 += s * Qc[0] * P[1];
            acc2 += s * P[0] * Qc[1];
            acc3 += s * Qc[0] * Qc[1];
        }
    }
    const Ratio& x1 = axes[0].xf;
    const Ratio& x2 = axes[1].xf;
    Ratio numer = Ratio(acc0) + Ratio(acc1) * x1 + Ratio(acc2) * x2 + Ratio(acc3) * x1 * x2;
    BigInt scale = BigInt(static_cast<long>(L)) * Wc;
    res.measure = numer / Ratio(BigInt(scale * scale));
    if (res.measure.sign() < 0) throw InvariantViolation("overlap_fast: negative measure");

    if (detail == Detail::Full || (detail == Detail::SmallD && G.D < Ratio(1))) count_values(res, axes, mq, mr, primed, G.D);
    return res;
}

OverlapResult overlap_fast(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                           const IrrationalSurrogate& gamma, const Ratio& sigma, bool primed,
                           Detail detail) {
    ApproxTable table(gamma, sigma);
    table.warm(std::max(dyadic_level(psi.at(q)), dyadic_level(psi.at(r))));
    return overlap_fast(q, r, psi, gamma, table, primed, detail);
}

// ---------------------------------------------------------------------------
// 1-D product route

namespace {

using Interval = std::pair<Ratio, Ratio>;

// Open arcs ((u + g)/q - rad, (u + g)/q + rad) on [0,1), split at 0.
std::vector<Interval> arcs(std::int64_t q, const Ratio& g, const Ratio& rad) {
    std::vector<Interval> out;
    if (rad * Ratio(2) >= Ratio(1)) {
        out.push_back({Ratio(0), Ratio(1)});
        return out;
    }
    const Ratio qq(static_cast<long>(q));
    for (std::int64_t u = 0; u < q; ++u) {
        Ratio c = ((Ratio(static_cast<long>(u)) + g) / qq).frac();
        Ratio lo = c - rad, hi = c + rad;
        if (lo.sign() < 0) {
            out.push_back({lo + Ratio(1), Ratio(1)});
            out.push_back({Ratio(0), hi});
        } else if (hi > Ratio(1)) {
            out.push_back({lo, Ratio(1)});
            out.push_back({Ratio(0), hi - Ratio(1)});
        } else {
            out.push_back({lo, hi});
        }
    }
    std::sort(out.begin(), out.end());
    // merge touching pieces
    std::vector<Interval> merged;
    for (auto& iv : out) {
        if (!merged.empty() && iv.first <= merged.back().second) {
            merged.back().second = max(merged.back().second, iv.second);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

Ratio intersect_length(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    Ratio total;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        Ratio lo = max(a[i].first, b[j].first);
        Ratio hi = min(a[i].second, b[j].second);
        if (hi > lo) total += hi - lo;
        if (a[i].second < b[j].second) ++i;
        else ++j;
    }
    return total;
}

} // namespace

Ratio overlap_product_1d(std::int64_t q, std::int64_t r, const ApproxFunction& psi,
                         const IrrationalSurrogate& gamma) {
    Ratio rq = psi.at(q) / Ratio(static_cast<long>(q));
    Ratio rr = psi.at(r) / Ratio(static_cast<long>(r));
    Ratio out(1);
    for (int ax = 0; ax < 2; ++ax) out *= intersect_length(arcs(q, gamma.value[ax], rq), arcs(r, gamma.value[ax], rr));
    return out;
}

// ---------------------------------------------------------------------------
// Union sweep

namespace {

struct Rect {
    Ratio x0, x1, y0, y1;
};

void split_axis(const Ratio& c, const Ratio& rad, std::vector<Interval>& out) {
    out.clear();
    if (rad * Ratio(2) >= Ratio(1)) {
        out.push_back({Ratio(0), Ratio(1)});
        return;
    }
    Ratio lo = c - rad, hi = c + rad;
    if (lo.sign() < 0) {
        out.push_back({lo + Ratio(1), Ratio(1)});
        out.push_back({Ratio(0), hi});
    } else if (hi > Ratio(1)) {
        out.push_back({lo, Ratio(1)});
        out.push_back({Ratio(0), hi - Ratio(1)});
    } else {
        out.push_back({lo, hi});
    }
}

class CoverTree {
public:
    explicit CoverTree(std::vector<Ratio> ys) : ys_(std::move(ys)) {
        std::size_t n = ys_.size() > 1 ? ys_.size() - 1 : 1;
        cover_.assign(4 * n, 0);
        len_.assign(4 * n, Ratio());
        n_ = n;
    }
    void add(std::size_t lo, std::size_t hi, int delta) { update(1, 0, n_, lo, hi, delta); }
    const Ratio& covered() const { return len_[1]; }

private:
    void update(std::size_t node, std::size_t l, std::size_t r, std::size_t lo, std::size_t hi, int delta) {
        if (hi <= l || r <= lo) return;
        if (lo <= l && r <= hi) {
            cover_[node] += delta;
        } else {
            std::size_t mid = (l + r) / 2;
            update(2 * node, l, mid, lo, hi, delta);
            update(2 * node + 1, mid, r, lo, hi, delta);
        }
        if (cover_[node] > 0) len_[node] = ys_[r] - ys_[l];
        else if (r - l == 1) len_[node] = Ratio();
        else len_[node] = len_[2 * node] + len_[2 * node + 1];
    }

    std::vector<Ratio> ys_;
    std::vector<int> cover_;
    std::vector<Ratio> len_;
    std::size_t n_ = 1;
};

} // namespace

Ratio union_measure(const std::vector<SquareFamily>& fams, std::int64_t budget) {
    std::int64_t total = 0;
    for (const auto& f : fams) total += static_cast<std::int64_t>(f.centers.size());
    if (total > budget)
        throw BudgetExceeded("union_measure: " + std::to_string(total) + " squares exceed the budget of " +
                             std::to_string(budget));
    std::vector<Rect> rects;
    std::vector<Interval> xs, ys;
    for (const auto& f : fams) {
        for (const auto& c : f.centers) {
            split_axis(c.x, f.radius, xs);
            split_axis(c.y, f.radius, ys);
            for (const auto& x : xs)
                for (const auto& y : ys) rects.push_back({x.first, x.second, y.first, y.second});
        }
    }
    if (rects.empty()) return Ratio();
    std::vector<Ratio> ycoords;
    ycoords.reserve(2 * rects.size());
    for (const auto& r : rects) {
        ycoords.push_back(r.y0);
        ycoords.push_back(r.y1);
    }
    std::sort(ycoords.begin(), ycoords.end());
    ycoords.erase(std::unique(ycoords.begin(), ycoords.end()), ycoords.end());
    auto yidx = [&](const Ratio& y) {
        return static_cast<std::size_t>(std::lower_bound(ycoords.begin(), ycoords.end(), y) - ycoords.begin());
    };
    struct Event {
        Ratio x;
        int delta;
        std::size_t lo, hi;
    };
    std::vector<Event> events;
    events.reserve(2 * rects.size());
    for (const auto& r : rects) {
        std::size_t lo = yidx(r.y0), hi = yidx(r.y1);
        events.push_back({r.x0, +1, lo, hi});
        events.push_back({r.x1, -1, lo, hi});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.x < b.x; });
    CoverTree tree(ycoords);
    Ratio area;
    for (std::size_t i = 0; i < events.size();) {
        const Ratio x = events[i].x;
        while (i < events.size() && events[i].x == x) {
            tree.add(events[i].lo, events[i].hi, events[i].delta);
            ++i;
        }
        if (i < events.size()) area += tree.covered() * (events[i].x - x);
    }
    return area;
}

} // namespace klab

#include "klab/qia.hpp"

#include "klab/arith.hpp"
#include "klab/errors.hpp"
#include "klab/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

namespace klab {

namespace {

Ratio R64(std::int64_t v) { return Ratio(static_cast<long>(v)); }

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

std::vector<std::int64_t> block_points(const ApproxFunction& psi, std::int64_t base) {
    return psi.in_range(base, 2 * base);
}

long max_level(const ApproxFunction& psi, const std::vector<std::int64_t>& qs) {
    long k = 0;
    for (auto q : qs) k = std::max(k, dyadic_level(psi.at(q)));
    return k;
}

PairRecord make_record(const PairGeometry& G) {
    PairRecord rec;
    rec.q = G.q;
    rec.r = G.r;
    rec.D = G.D;
    rec.stratum = stratum_of(G.q, G.r, G.D);
    rec.bullet = G.bullet;
    rec.bullet_level = G.bullet_level;
    return rec;
}

} // namespace

void BlockSpec::validate() const {
    if (R < 1 || Q < R) throw ValidityError("BlockSpec: requires 1 <= R <= Q");
    if (Q % R != 0 || !is_pow2(Q / R)) throw ValidityError("BlockSpec: Q/R must be a power of two");
    if (sigma.sign() <= 0 || sigma >= Ratio(1)) throw ValidityError("BlockSpec: sigma must lie in (0,1)");
    gamma.require_within("q", 2 * Q);
}

long stratum_of(std::int64_t q, std::int64_t r, const Ratio& D) {
    if (D > Ratio(1)) return 0;
    if (q % r == 0) return kStratumF;
    long j = 1;
    while (D <= pow2(-j)) ++j;
    return j;
}

ApproxTable block_table(const BlockSpec& spec) {
    spec.validate();
    ApproxTable table(spec.gamma, spec.sigma);
    auto qs = block_points(spec.psi, spec.Q);
    auto rs = block_points(spec.psi, spec.R);
    table.warm(std::max(max_level(spec.psi, qs), max_level(spec.psi, rs)));
    return table;
}

Strata stratify(const BlockSpec& spec, const ApproxTable& table) {
    spec.validate();
    Strata s;
    for (auto q : block_points(spec.psi, spec.Q)) {
        for (auto r : block_points(spec.psi, spec.R)) {
            if (r >= q) break;
            PairRecord rec = make_record(pair_geometry(q, r, spec.psi, spec.gamma, table));
            if (rec.stratum == 0)
                ++s.d0;
            else if (rec.stratum == kStratumF)
                ++s.f;
            else
                ++s.dj[rec.stratum];
            s.pairs.push_back(std::move(rec));
        }
    }
    return s;
}

Strata stratify(const BlockSpec& spec) { return stratify(spec, block_table(spec)); }

std::vector<PairRecord> near_pairs_divisor(const BlockSpec& spec, const ApproxTable& table) {
    spec.validate();
    std::vector<PairRecord> out;
    for (auto q : block_points(spec.psi, spec.Q)) {
        // D <= 1 forces 2 psi(q) r/g <= 1, so e = r/g <= 1/(2 psi(q))
        const BigInt e_cap = (Ratio(1) / (Ratio(2) * spec.psi.at(q))).floor();
        std::vector<std::int64_t> divs;
        for (std::int64_t d = 1; d * d <= q; ++d) {
            if (q % d) continue;
            divs.push_back(d);
            if (d != q / d) divs.push_back(q / d);
        }
        for (auto g : divs) {
            std::int64_t e_lo = spec.R / g + 1;
            std::int64_t e_hi = 2 * spec.R / g;
            if (e_cap < BigInt(static_cast<long>(e_hi))) e_hi = to_i64(e_cap);
            for (std::int64_t e = e_lo; e <= e_hi; ++e) {
                const std::int64_t r = e * g;
                if (r >= q || std::gcd(q / g, e) != 1 || !spec.psi.contains(r)) continue;
                PairRecord rec = make_record(pair_geometry(q, r, spec.psi, spec.gamma, table));
                if (rec.stratum != 0) out.push_back(std::move(rec));
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const PairRecord& a, const PairRecord& b) { return a.q != b.q ? a.q < b.q : a.r < b.r; });
    return out;
}

Ratio log_plus(std::int64_t Q, std::int64_t R) {
    if (R < 1 || Q < R || Q % R != 0 || !is_pow2(Q / R)) throw ValidityError("log_plus: Q/R must be a power of two");
    long l = bit_length(BigInt(static_cast<long>(Q / R))) - 1;
    return R64(std::max(1L, l));
}

BlockReport block_sums(const BlockSpec& spec, const ApproxTable& table, int workers) {
    spec.validate();
    BlockReport rep;
    rep.Q = spec.Q;
    rep.R = spec.R;
    for (auto q : block_points(spec.psi, spec.Q)) rep.sum_q += measure_single(q, spec.psi, table, spec.primed);
    for (auto r : block_points(spec.psi, spec.R)) rep.sum_r += measure_single(r, spec.psi, table, spec.primed);
    Strata st = stratify(spec, table);
    rep.pairs = static_cast<std::int64_t>(st.pairs.size());
    rep.d0 = st.d0;
    rep.strata_counts = st.dj;
    rep.f_count = st.f;
    auto measures = parallel_map(st.pairs.size(), workers, [&](std::size_t i) {
        const PairRecord& p = st.pairs[i];
        return overlap_fast(p.q, p.r, spec.psi, spec.gamma, table, spec.primed, Detail::MeasureOnly).measure;
    });
    for (std::size_t i = 0; i < st.pairs.size(); ++i) {
        rep.lhs += measures[i];
        if (st.pairs[i].stratum == kStratumF) rep.f_sum += measures[i];
    }
    const Ratio ratio = R64(spec.Q) / R64(spec.R);
    rep.log_plus = log_plus(spec.Q, spec.R);
    rep.product_term = rep.sum_q * rep.sum_r;
    rep.cross_term = rep.log_plus / ratio * (rep.sum_q + rep.sum_r);
    const Ratio denom = rep.product_term + rep.cross_term;
    if (!denom.is_zero()) rep.empirical_constant = rep.lhs / denom;
    if (!rep.sum_q.is_zero()) rep.f_constant = rep.f_sum / (rep.sum_q / ratio);
    return rep;
}

BlockReport block_sums(const BlockSpec& spec, int workers) { return block_sums(spec, block_table(spec), workers); }

Ratio f_set_sum(const BlockSpec& spec, const ApproxTable& table, const Ratio& c4) {
    Strata st = stratify(spec, table);
    Ratio sum, sum_q;
    for (const auto& p : st.pairs)
        if (p.stratum == kStratumF)
            sum += overlap_fast(p.q, p.r, spec.psi, spec.gamma, table, spec.primed, Detail::MeasureOnly).measure;
    for (auto q : block_points(spec.psi, spec.Q)) sum_q += measure_single(q, spec.psi, table, spec.primed);
    const Ratio bound = c4 * R64(spec.R) / R64(spec.Q) * sum_q;
    if (sum > bound)
        throw InvariantViolation("f_set_sum: " + sum.to_string() + " exceeds C4 (R/Q) sum = " + bound.to_string() +
                                 " at Q = " + std::to_string(spec.Q) + ", R = " + std::to_string(spec.R));
    return sum;
}

Ratio f_set_sum_direct(const BlockSpec& spec, const ApproxTable& table) {
    spec.validate();
    Ratio sum;
    for (auto r : block_points(spec.psi, spec.R)) {
        for (std::int64_t m = 2; m * r <= 2 * spec.Q; ++m) {
            const std::int64_t q = m * r;
            if (q <= spec.Q || !spec.psi.contains(q)) continue;
            PairGeometry G = pair_geometry(q, r, spec.psi, spec.gamma, table);
            if (G.D > Ratio(1)) continue;
            sum += overlap_bruteforce(q, r, spec.psi, spec.gamma, table, spec.primed).measure;
        }
    }
    return sum;
}

std::vector<AdhocInstance> adhoc_instances(const BlockSpec& spec, const Strata& strata) {
    struct Key {
        long j;
        int bullet;
        long level;
        bool operator<(const Key& o) const {
            return std::tie(j, bullet, level) < std::tie(o.j, o.bullet, o.level);
        }
    };
    std::map<Key, AdhocInstance> found;
    const Ratio ratio = R64(spec.Q) / R64(spec.R);
    for (const auto& p : strata.pairs) {
        if (p.stratum < 2) continue;
        Key key{p.stratum, p.bullet == Bullet::K ? 0 : 1, p.bullet_level};
        if (found.count(key)) continue;
        AdhocInstance inst;
        inst.bullet = p.bullet;
        inst.level = p.bullet_level;
        inst.D = pow2(-p.stratum + 1);
        inst.R_over_Q = R64(spec.R) / R64(spec.Q);
        Ratio N = p.bullet == Bullet::K ? ratio * pow2(p.bullet_level - p.stratum + 2)
                                        : pow2(p.bullet_level - p.stratum + 3);
        inst.N = std::max<std::int64_t>(1, to_i64(N.ceil()));
        found.emplace(key, inst);
    }
    std::vector<AdhocInstance> out;
    for (auto& [k, v] : found) out.push_back(v);
    return out;
}

QiaTrace qia_trace(const ApproxFunction& psi, const IrrationalSurrogate& gamma, const Ratio& sigma,
                   long U_max, bool primed, int workers) {
    if (U_max < 1 || U_max > 40) throw ValidityError("qia_trace: U must lie in [1, 40]");
    const std::int64_t top = std::int64_t{1} << U_max;
    gamma.require_within("q", top);
    auto pts = psi.in_range(0, top);
    ApproxTable table(gamma, sigma);
    table.warm(max_level(psi, pts));
    std::vector<Ratio> single(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) single[i] = measure_single(pts[i], psi, table, primed);
    // row i: sum over t < s = pts[i]
    auto rows = parallel_map(pts.size(), workers, [&](std::size_t i) {
        Ratio acc;
        for (std::size_t t = 0; t < i; ++t)
            acc += overlap_fast(pts[i], pts[t], psi, gamma, table, primed, Detail::MeasureOnly).measure;
        return acc;
    });
    QiaTrace tr;
    Ratio sum, square;
    std::size_t i = 0;
    for (long U = 1; U <= U_max; ++U) {
        const std::int64_t lim = std::int64_t{1} << U;
        for (; i < pts.size() && pts[i] <= lim; ++i) {
            sum += single[i];
            square += single[i] + Ratio(2) * rows[i];
        }
        tr.U.push_back(U);
        tr.sum.push_back(sum);
        tr.square.push_back(square);
        tr.defined.push_back(!sum.is_zero());
        tr.ratio.push_back(sum.is_zero() ? Ratio() : square / (sum * sum));
    }
    return tr;
}

std::optional<Ratio> qia_ratio(const ApproxFunction& psi, const IrrationalSurrogate& gamma, const Ratio& sigma,
                               long U, bool primed, int workers) {
    QiaTrace tr = qia_trace(psi, gamma, sigma, U, primed, workers);
    if (!tr.defined.back()) return std::nullopt;
    return tr.ratio.back();
}

// ---------------------------------------------------------------------------
// Model problem

const char* model_variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::Plain: return "plain";
        case ModelVariant::ShiftB: return "shiftB";
        case ModelVariant::Shiftb: return "shiftb";
    }
    return "?";
}

ModelVariant parse_model_variant(const std::string& name) {
    if (name == "plain") return ModelVariant::Plain;
    if (name == "shiftB") return ModelVariant::ShiftB;
    if (name == "shiftb") return ModelVariant::Shiftb;
    throw ValidityError("unknown model variant '" + name + "' (plain, shiftB, shiftb)");
}

const char* support_kind_name(SupportKind k) {
    switch (k) {
        case SupportKind::Random: return "random";
        case SupportKind::Multiples: return "multiples";
        case SupportKind::Clusters: return "clusters";
    }
    return "?";
}

SupportKind parse_support_kind(const std::string& name) {
    if (name == "random") return SupportKind::Random;
    if (name == "multiples") return SupportKind::Multiples;
    if (name == "clusters") return SupportKind::Clusters;
    throw ValidityError("unknown support kind '" + name + "' (random, multiples, clusters)");
}

std::vector<std::int64_t> model_support(const ModelSpec& spec) {
    if (spec.M < 2) throw ValidityError("model: M must be at least 2");
    if (spec.T < spec.M) throw ValidityError("model: T must be at least M");
    spec.gamma.require_within("q", 2 * spec.T);
    Prng rng = Prng::derive(spec.seed, static_cast<std::uint64_t>(spec.M));
    if (spec.support == SupportKind::Random) return sample_without_replacement(spec.T, 2 * spec.T, spec.M, rng);
    if (spec.support == SupportKind::Clusters) {
        long s_max = 1;
        while ((std::int64_t{1} << (2 * (s_max + 2))) * 16 <= spec.M) ++s_max;
        std::set<std::int64_t> pts;
        while (static_cast<std::int64_t>(pts.size()) < spec.M) {
            const std::int64_t N = std::int64_t{1} << rng.range(1, s_max);
            const std::int64_t G_lo = (spec.T + N - 1) / N, G_hi = 2 * spec.T / (2 * N - 1);
            if (G_hi < G_lo) throw ValidityError("model: T too small for cluster scale " + std::to_string(N));
            const std::int64_t G = rng.range(G_lo, G_hi);
            for (std::int64_t n = N; n < 2 * N && static_cast<std::int64_t>(pts.size()) < spec.M; ++n)
                pts.insert(G * n);
        }
        return {pts.begin(), pts.end()};
    }
    if (spec.T % spec.M != 0) throw ValidityError("model: multiples support requires M | T");
    const std::int64_t G = spec.T / spec.M;
    const auto skip = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.M + 1)));
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(spec.M));
    for (std::int64_t i = 0; i <= spec.M; ++i)
        if (i != skip) out.push_back(G * (spec.M + i));
    return out;
}

ModelParams model_params(const ModelSpec& spec) {
    ModelParams mp;
    const FirstKindApprox fk = first_kind_within_sq(spec.gamma, Ratio(1) / R64(spec.M));
    mp.B = fk.B;
    // B > M^(sigma/2)  <=>  B^(2 den) > M^num
    const unsigned long den = spec.sigma.den().get_ui(), num = spec.sigma.num().get_ui();
    mp.large_B = ipow(BigInt(static_cast<long>(mp.B)), 2 * den) > ipow(BigInt(static_cast<long>(spec.M)), num);
    if (spec.variant != ModelVariant::Shiftb || !mp.large_B) return mp;
    const bool diag = spec.gamma.diagonal();
    const Ratio Br = R64(mp.B);
    for (std::int64_t b = 1; b <= mp.B; ++b) {
        Ratio nb = norm_multiple(spec.gamma, b);
        bool ok = diag ? nb * Br <= Ratio(1) : nb * nb * Br <= Ratio(1);
        if (ok) {
            mp.b = b;
            mp.norm_b = nb;
            return mp;
        }
    }
    throw InvariantViolation("model_params: no b <= B = " + std::to_string(mp.B) + " meets the Dirichlet threshold");
}

namespace {

// allowed[j] for j = 1..kMaxJ per variant
constexpr long kMaxJ = 62;

std::vector<bool> model_allowed(const ModelSpec& spec, const ModelParams& mp) {
    std::vector<bool> allowed(kMaxJ + 1, true);
    allowed[0] = false;
    if (spec.variant == ModelVariant::Plain) return allowed;
    const bool split = spec.variant == ModelVariant::Shiftb && mp.large_B;
    for (long j = 1; j <= kMaxJ; ++j) {
        if (!split) {
            allowed[static_cast<std::size_t>(j)] = pow2(j - 1) <= R64(mp.B);
            continue;
        }
        const bool big_b = !le_pow2_sigma(BigInt(static_cast<long>(2 * mp.b)), j, spec.rho);
        const bool spread = pow2(2 * j) < R64(spec.M) * mp.norm_b * mp.norm_b;
        allowed[static_cast<std::size_t>(j)] = big_b || spread;
    }
    return allowed;
}

} // namespace

Ratio model_sum(const ModelSpec& spec, const std::vector<std::int64_t>& support) {
    if (spec.M < 2) throw ValidityError("model: M must be at least 2");
    for (auto q : support) spec.gamma.require_within("q", q);
    const ModelParams mp = model_params(spec);
    const std::vector<bool> allowed = model_allowed(spec, mp);
    std::unordered_map<std::int64_t, long> hj_cache;
    auto hj = [&](std::int64_t h) {
        auto it = hj_cache.find(h);
        if (it != hj_cache.end()) return it->second;
        const Ratio nh = norm_multiple(spec.gamma, h);
        long j = 0;
        while (j < kMaxJ && nh < pow2(-(j + 1))) ++j;
        hj_cache.emplace(h, j);
        return j;
    };
    const auto M128 = static_cast<__int128>(spec.M);
    BigInt total = 0;
    for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            const std::int64_t q = std::max(support[a], support[b]);
            const std::int64_t r = std::min(support[a], support[b]);
            const std::int64_t g = std::gcd(q, r);
            // D <= 2^-j  <=>  4 q^2 4^j <= M g^2
            const __int128 lhs = static_cast<__int128>(4) * q * q;
            const __int128 rhs = M128 * g * g;
            if (lhs * 4 > rhs) continue;
            long J = 1;
            while (J < kMaxJ && (lhs << (2 * (J + 1))) <= rhs) ++J;
            const long top = std::min(J, hj((q - r) / g));
            std::int64_t pair_sum = 0;
            for (long j = 1; j <= top; ++j)
                if (allowed[static_cast<std::size_t>(j)]) pair_sum += std::int64_t{1} << (2 * j);
            total += BigInt(static_cast<long>(pair_sum)) * 2;  // ordered pairs
        }
    }
    return Ratio(total, BigInt(static_cast<long>(spec.M)) * static_cast<long>(spec.M));
}

Ratio model_sum(const ModelSpec& spec) { return model_sum(spec, model_support(spec)); }

Ratio model_sum_reference(const ModelSpec& spec, const std::vector<std::int64_t>& support) {
    const ModelParams mp = model_params(spec);
    const Ratio Mr = R64(spec.M);
    const Ratio psi_sq = Ratio(1) / Mr;
    Ratio total;
    for (auto q : support) {
        for (auto r : support) {
            if (q == r) continue;
            const std::int64_t g = std::gcd(q, r);
            const Ratio X2 = Ratio(4) * R64(std::max(q, r)) * R64(std::max(q, r)) * psi_sq;
            const Ratio D2 = X2 / (R64(g) * R64(g));
            const Ratio h = R64(std::max(q, r) - std::min(q, r)) / R64(g);
            const Ratio nh = torus_norm(h * spec.gamma.value);
            for (long j = 1; pow2(-2 * j) >= D2; ++j) {
                if (!(nh < pow2(-j))) continue;
                bool ind = true;
                if (spec.variant == ModelVariant::ShiftB ||
                    (spec.variant == ModelVariant::Shiftb && !mp.large_B)) {
                    ind = pow2(j - 1) <= R64(mp.B);
                } else if (spec.variant == ModelVariant::Shiftb) {
                    const bool first = lt_power(pow2(j), R64(2 * mp.b), Ratio(1) / spec.rho);  // 2b > 2^(rho j)
                    const bool second = !first && pow2(j) * pow2(j) < Mr * mp.norm_b * mp.norm_b;
                    ind = first || second;
                }
                if (ind) total += pow2(2 * j);
            }
        }
    }
    return total / (Mr * Mr);
}

ApproxFunction psi_three_quarters(std::int64_t lo, std::int64_t hi) {
    if (lo < 1 || hi < lo) throw ValidityError("psi_three_quarters: requires 1 <= lo <= hi");
    std::vector<std::int64_t> support;
    for (std::int64_t q = lo; q <= hi; ++q) support.push_back(q);
    return psi_power_law(support, Ratio(3, 4), 20);
}

TailReport convergence_tail(const ApproxFunction& psi, const IrrationalSurrogate& gamma, std::int64_t Q0,
                            std::int64_t Q1, std::int64_t budget) {
    if (Q0 < 1 || Q1 < Q0) throw ValidityError("convergence_tail: requires 1 <= Q0 <= Q1");
    gamma.require_within("q", Q1);
    std::int64_t squares = 0;
    for (auto q : psi.in_range(Q0 - 1, Q1)) squares += q * q;
    if (squares > budget)
        throw BudgetExceeded("convergence_tail: " + std::to_string(squares) + " squares exceed budget " +
                             std::to_string(budget));
    ApproxTable table(gamma, Ratio(2, 3));
    std::vector<SquareFamily> fams;
    TailReport rep;
    for (auto q : psi.in_range(Q0 - 1, Q1)) {
        const Ratio& v = psi.at(q);
        rep.subadditive += Ratio(4) * v * v;
        table.warm(dyadic_level(v));
        fams.push_back(square_family(q, psi, gamma, table, false));
    }
    rep.union_measure = fams.empty() ? Ratio() : union_measure(fams, budget);
    if (rep.union_measure > rep.subadditive)
        throw InvariantViolation("convergence_tail: union " + rep.union_measure.to_string() +
                                 " exceeds the subadditive bound " + rep.subadditive.to_string());
    return rep;
}

Ratio tail_bound_three_quarters(std::int64_t Q0) {
    if (Q0 < 1) throw ValidityError("tail bound: Q0 must be positive");
    const Ratio s(isqrt(BigInt(static_cast<long>(Q0))));
    return Ratio(4) / (s * s * s) + Ratio(8) / s;
}

} // namespace klab

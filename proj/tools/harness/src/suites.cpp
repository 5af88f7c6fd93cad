#include "klab/harness/suites.hpp"

#include "klab/approx.hpp"
#include "klab/arith.hpp"
#include "klab/bohr.hpp"
#include "klab/errors.hpp"
#include "klab/measure.hpp"
#include "klab/parallel.hpp"
#include "klab/prng.hpp"
#include "klab/qia.hpp"
#include "klab/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

namespace klab::harness {

namespace {

// Stream ids keep every suite independent of the others for one seed.
constexpr std::uint64_t kStreamOverlaps = 1000;
constexpr std::uint64_t kStreamBohr = 2000;
constexpr std::uint64_t kStreamAdhoc = 3000;
constexpr std::uint64_t kStreamBlocks = 4000;
constexpr std::uint64_t kStreamQia = 5000;
constexpr std::uint64_t kStreamModel = 6000;

Ratio R64(std::int64_t v) { return Ratio(static_cast<long>(v)); }

std::string str(std::int64_t v) { return std::to_string(v); }

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string yes(bool b) { return b ? "1" : "0"; }

std::vector<std::string> cols(std::initializer_list<std::string> names) { return names; }

void ratio_col(std::vector<std::string>& c, const std::string& n) { add_ratio_columns(c, n); }

Check make_check(std::string id, std::string what, bool pass, std::string detail) {
    return Check{std::move(id), std::move(what), pass, std::move(detail)};
}

struct Block {
    std::int64_t Q, R;
};

std::vector<Block> block_grid(long a_min, long a_max, long max_log_ratio) {
    std::vector<Block> out;
    for (long aQ = a_min; aQ <= a_max; ++aQ)
        for (long aR = std::max(a_min, aQ - max_log_ratio); aR <= aQ; ++aR)
            out.push_back({std::int64_t{1} << aQ, std::int64_t{1} << aR});
    return out;
}

long psi_max_level(const ApproxFunction& psi) {
    long k = 2;
    for (const auto& [q, v] : psi.values()) k = std::max(k, dyadic_level(v));
    return k;
}

} // namespace

std::uint64_t model_trial_seed(std::uint64_t seed, std::int64_t trial) {
    return splitmix_mix(seed + kStreamModel) ^ (static_cast<std::uint64_t>(trial) * 0x9E3779B97F4A7C15ULL);
}

bool SuiteResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return 0.0;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx == 0 ? 0.0 : sxy / sxx;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

ApproxFunction sparse_psi(long a_min, long a_max, std::int64_t points, std::uint64_t seed) {
    Prng rng = Prng::derive(seed, 1);
    std::vector<std::int64_t> support;
    for (long a = a_min; a <= a_max; ++a) {
        auto pts = block_support(a, points, rng);
        support.insert(support.end(), pts.begin(), pts.end());
    }
    Prng levels = Prng::derive(seed, 2);
    return psi_sparse_levels(support, levels);
}

ApproxFunction power_psi(long a_min, long a_max, std::int64_t points, const Ratio& s, std::uint64_t seed) {
    Prng rng = Prng::derive(seed, 1);
    std::vector<std::int64_t> support;
    for (long a = a_min; a <= a_max; ++a) {
        auto pts = block_support(a, points, rng);
        support.insert(support.end(), pts.begin(), pts.end());
    }
    return psi_power_law(support, s);
}

ApproxFunction make_psi(const std::string& generator, long a_min, long a_max, std::int64_t points,
                        std::uint64_t seed) {
    if (generator == "sparse") return sparse_psi(a_min, a_max, points, seed);
    if (generator.rfind("power:", 0) == 0) return power_psi(a_min, a_max, points, Ratio::parse(generator.substr(6)), seed);
    throw ValidityError("unknown psi generator '" + generator + "' (sparse, power:<s>)");
}

// ---------------------------------------------------------------------------
// residues: cardinality identity, density floor, box-count equidistribution

SuiteResult suite_residues(const ExperimentConfig& cfg, const VerifyThresholds& th) {
    SuiteResult res;
    res.name = "residues";
    Table card{"cardinality", {}, {}}, dens{"density", {}, {}}, equid{"equid", {}, {}};
    card.columns = cols({"family", "k_first", "k_last", "M", "m1", "m2", "branch", "q_max", "checked", "mismatches"});
    dens.columns = cols({"family", "k_first", "M", "m1", "m2"});
    ratio_col(dens.columns, "min_density");
    dens.columns.insert(dens.columns.end(), {"q_at_min", "violations"});
    equid.columns = cols({"family", "k_first", "M", "m1", "m2", "grid"});
    ratio_col(equid.columns, "C_eq_sq");
    equid.columns.insert(equid.columns.end(), {"C_eq_dec", "q_at_max", "C_eq_dec_q_ge_64"});

    std::int64_t mismatches = 0, violations = 0, contexts = 0;
    std::map<std::string, Ratio> ceq_family, tail_family;
    const std::int64_t n = cfg.residues.grid;
    for (const auto& family : cfg.families) {
        const IrrationalSurrogate gamma = surrogate_preset(family, cfg.validity);
        ApproxTable table(gamma, cfg.params.sigma);
        table.warm(cfg.residues.k_max);
        struct Ctx {
            long k_first, k_last;
            std::int64_t M;
            IVec2 m;
            Branch branch;
        };
        std::vector<Ctx> ctxs;
        for (long k = 2; k <= cfg.residues.k_max; ++k) {
            const ShiftContext& c = table.at(k);
            auto it = std::find_if(ctxs.begin(), ctxs.end(),
                                   [&](const Ctx& x) { return x.M == c.modulus() && x.m == c.shift(); });
            if (it != ctxs.end()) {
                it->k_last = k;
                continue;
            }
            ctxs.push_back({k, k, c.modulus(), c.shift(), c.branch});
        }
        Ratio family_ceq;
        for (const auto& c : ctxs) {
            ++contexts;
            struct QOut {
                bool match = true;
                Ratio density, ceq2;
                bool dense = true;
            };
            auto outs = parallel_map(static_cast<std::size_t>(cfg.residues.q_max), cfg.workers, [&](std::size_t i) {
                const std::int64_t q = static_cast<std::int64_t>(i) + 1;
                ResidueSet rs = residue_set(q, c.M, c.m);
                QOut o;
                o.match = BigInt(static_cast<long>(rs.count)) == cardinality_formula(q, c.M);
                o.density = R64(rs.count) / (R64(q) * R64(q));
                o.dense = 5 * rs.count >= 3 * q * q;
                auto grid = box_count_grid(rs, n);
                const Ratio q3 = R64(q) * R64(q) * R64(q);
                for (std::int64_t a = 0; a <= n; ++a)
                    for (std::int64_t b = 0; b <= n; ++b) {
                        Ratio expect = R64(a * b) * R64(rs.count) / R64(n * n);
                        Ratio dev = (R64(grid[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) - expect).abs();
                        o.ceq2 = max(o.ceq2, dev * dev / q3);
                    }
                return o;
            });
            std::int64_t mism = 0, viol = 0, q_min = 1, q_max_ceq = 1;
            Ratio min_d(2), max_c, max_tail;
            for (std::size_t i = 0; i < outs.size(); ++i) {
                if (i + 1 >= 64) max_tail = max(max_tail, outs[i].ceq2);
                if (!outs[i].match) ++mism;
                if (!outs[i].dense) ++viol;
                if (outs[i].density < min_d) {
                    min_d = outs[i].density;
                    q_min = static_cast<std::int64_t>(i) + 1;
                }
                if (outs[i].ceq2 > max_c) {
                    max_c = outs[i].ceq2;
                    q_max_ceq = static_cast<std::int64_t>(i) + 1;
                }
            }
            mismatches += mism;
            violations += viol;
            family_ceq = max(family_ceq, max_c);
            card.add({family, std::to_string(c.k_first), std::to_string(c.k_last), str(c.M), str(c.m[0]), str(c.m[1]),
                      branch_name(c.branch), str(cfg.residues.q_max), str(cfg.residues.q_max), str(mism)});
            std::vector<std::string> drow{family, std::to_string(c.k_first), str(c.M), str(c.m[0]), str(c.m[1])};
            add_ratio_cells(drow, min_d);
            drow.push_back(str(q_min));
            drow.push_back(str(viol));
            dens.add(std::move(drow));
            std::vector<std::string> erow{family, std::to_string(c.k_first), str(c.M), str(c.m[0]), str(c.m[1]), str(n)};
            add_ratio_cells(erow, max_c);
            erow.push_back(fmt12(std::sqrt(max_c.to_double())));
            erow.push_back(str(q_max_ceq));
            erow.push_back(fmt12(std::sqrt(max_tail.to_double())));
            tail_family[family] = max(tail_family[family], max_tail);
            equid.add(std::move(erow));
        }
        ceq_family[family] = family_ceq;
        res.values["equid.C_eq_sq." + family] = family_ceq;
    }
    res.counts["cardinality.contexts"] = contexts;
    res.counts["cardinality.mismatches"] = mismatches;
    res.counts["density.violations"] = violations;
    double lo = 1e300, hi = 0;
    for (const auto& [f, v] : ceq_family) {
        const double c = std::sqrt(v.to_double());
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    const double spread = lo > 0 ? hi / lo : 0.0;
    res.stats["equid.C_eq_max"] = hi;
    res.stats["equid.spread"] = spread;
    for (const auto& [f, v] : tail_family) res.stats["equid.C_eq_q_ge_64." + f] = std::sqrt(v.to_double());
    res.checks.push_back(make_check("C1", "cardinality formula equals |S_q|", mismatches == 0,
                                    str(contexts) + " contexts, " + str(mismatches) + " mismatches"));
    res.checks.push_back(make_check("C2", "5|S_q| >= 3q^2", violations == 0, str(violations) + " violations"));
    res.checks.push_back(make_check("C11", "box-count deviation <= C_eq q^(3/2), C_eq stable across families",
                                    lo > 0 && spread <= th.equid_spread,
                                    "C_eq max " + fmt12(hi) + ", max/min over families " + fmt12(spread)));
    res.tables = {card, dens, equid};
    return res;
}

// ---------------------------------------------------------------------------
// overlaps: oracle equivalence and the overlap lemma

SuiteResult suite_overlaps(const ExperimentConfig& cfg, const VerifyThresholds&) {
    SuiteResult res;
    res.name = "overlaps";
    Table t{"overlaps", {}, {}};
    t.columns = cols({"family", "primed", "q", "r", "psi_q", "psi_r", "g", "h"});
    ratio_col(t.columns, "D");
    t.columns.insert(t.columns.end(), {"bullet", "level"});
    ratio_col(t.columns, "measure");
    t.columns.insert(t.columns.end(), {"pair_count", "value_count", "fast_equal", "bullet1_ok", "indicator",
                                       "empty_ok", "product_ok", "C1_dec"});
    std::int64_t total = 0, mism = 0, b1 = 0, empty_checked = 0, empty_viol = 0, product_bad = 0, mult_bad = 0;
    Ratio c1_max;
    const long kLevelMax = 10;
    for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
        const std::string& family = cfg.families[fi];
        const IrrationalSurrogate gamma = surrogate_preset(family, cfg.validity);
        ApproxTable table(gamma, cfg.params.sigma);
        table.warm(kLevelMax);
        for (int primed = 0; primed <= 1; ++primed) {
            Prng rng = Prng::derive(cfg.seed, kStreamOverlaps + 2 * fi + static_cast<std::uint64_t>(primed));
            struct Case {
                std::int64_t q, r;
                Ratio pq, pr;
            };
            std::vector<Case> cases;
            for (std::int64_t i = 0; i < cfg.overlaps.pairs; ++i) {
                Case c;
                c.q = rng.range(2, cfg.overlaps.q_max);
                c.r = rng.range(1, c.q - 1);
                c.pq = Ratio(256 + rng.range(1, 256)) * pow2(-(8 + rng.range(2, kLevelMax)));
                c.pr = Ratio(256 + rng.range(1, 256)) * pow2(-(8 + rng.range(2, kLevelMax)));
                cases.push_back(c);
            }
            struct Out {
                std::vector<std::string> row;
                bool equal, b1ok, empty_checked, empty_ok, product_ok, mult_ok;
                Ratio c1;
            };
            auto outs = parallel_map(cases.size(), cfg.workers, [&](std::size_t i) {
                const Case& c = cases[i];
                ApproxFunction psi;
                psi.set(c.q, c.pq);
                psi.set(c.r, c.pr);
                const bool pr = primed != 0;
                OverlapResult fast = overlap_fast(c.q, c.r, psi, gamma, table, pr, Detail::Full);
                OverlapResult brute = overlap_bruteforce(c.q, c.r, psi, gamma, table, pr);
                const PairGeometry& G = brute.geometry;
                Out o;
                o.equal = fast.measure == brute.measure && fast.pair_count == brute.pair_count &&
                          fast.value_count == brute.value_count;
                const Ratio gg = R64(G.g) * R64(G.g);
                const std::int64_t box = 2 * to_i64(G.D.ceil()) + 1;
                o.b1ok = brute.measure <= G.delta * G.delta * gg * R64(brute.value_count) &&
                         brute.value_count <= box * box;
                o.mult_ok = pr || brute.pair_count == G.g * G.g * brute.value_count;
                o.product_ok = pr || overlap_product_1d(c.q, c.r, psi, gamma) == brute.measure;
                // bullets 2 and 3: the indicator product
                CaseContext cc;
                cc.level = G.bullet_level;
                cc.B = G.B_bullet;
                cc.params = cfg.params;
                cc.D = G.D;
                cc.Dhat = G.Dhat;
                cc.h = G.h;
                const ShiftContext& ctx = table.at(G.bullet_level);
                if (ctx.dirichlet) {
                    cc.b = ctx.dirichlet->b;
                    cc.norm_bgamma = norm_multiple(gamma, ctx.dirichlet->b);
                }
                bool indicator = norm_multiple(gamma, G.h) < G.D;
                if (indicator) {
                    try {
                        indicator = indicator_C(cc);
                    } catch (const ValidityError&) {
                        indicator = true;  // no Dirichlet data: the bound is not claimed
                    }
                }
                o.empty_checked = pr && c.q % c.r != 0 && G.D < Ratio(1) && !indicator;
                o.empty_ok = !o.empty_checked || brute.value_count == 0;
                const Ratio lq = measure_single(c.q, psi, table, pr), lr = measure_single(c.r, psi, table, pr);
                const Ratio denom = lq * lr * (Ratio(1) + Ratio(1) / (G.D * G.D));
                o.c1 = denom.is_zero() ? Ratio() : brute.measure / denom;
                std::vector<std::string> row{family, yes(pr), str(c.q), str(c.r), exact(c.pq), exact(c.pr), str(G.g),
                                             str(G.h)};
                add_ratio_cells(row, G.D);
                row.push_back(bullet_name(G.bullet));
                row.push_back(std::to_string(G.bullet_level));
                add_ratio_cells(row, brute.measure);
                row.insert(row.end(), {str(brute.pair_count), str(brute.value_count), yes(o.equal), yes(o.b1ok),
                                       yes(indicator), o.empty_checked ? yes(o.empty_ok) : "-",
                                       pr ? "-" : yes(o.product_ok), fmt12(o.c1.to_double())});
                o.row = std::move(row);
                return o;
            });
            for (auto& o : outs) {
                ++total;
                if (!o.equal) ++mism;
                if (!o.b1ok) ++b1;
                if (o.empty_checked) ++empty_checked;
                if (!o.empty_ok) ++empty_viol;
                if (!o.product_ok) ++product_bad;
                if (!o.mult_ok) ++mult_bad;
                c1_max = max(c1_max, o.c1);
                t.add(std::move(o.row));
            }
        }
    }
    res.counts["overlaps.pairs"] = total;
    res.counts["overlaps.mismatches"] = mism;
    res.counts["lemma.bullet1_violations"] = b1;
    res.counts["lemma.empty_checked"] = empty_checked;
    res.counts["lemma.empty_violations"] = empty_viol;
    res.counts["overlaps.product_mismatches"] = product_bad;
    res.counts["overlaps.multiplicity_violations"] = mult_bad;
    res.values["lemma.C1"] = c1_max;
    res.checks.push_back(make_check("C3", "overlap_fast equals overlap_bruteforce", mism == 0 && product_bad == 0,
                                    str(total) + " pairs, " + str(mism) + " mismatches, " + str(product_bad) +
                                        " 1-D product mismatches"));
    res.checks.push_back(make_check("C4", "overlap lemma count form and indicator emptiness",
                                    b1 == 0 && empty_viol == 0 && mult_bad == 0,
                                    str(b1) + " bullet-1 violations, " + str(empty_viol) + " of " +
                                        str(empty_checked) + " emptiness checks failed, C1 " +
                                        fmt12(c1_max.to_double())));
    res.tables = {t};
    return res;
}

// ---------------------------------------------------------------------------
// bohr: full orbit and once-around bounds

SuiteResult suite_bohr(const ExperimentConfig& cfg, const VerifyThresholds&) {
    SuiteResult res;
    res.name = "bohr";
    Table orbit{"bohr_orbits", {}, {}}, once{"bohr_once_around", {}, {}};
    orbit.columns = cols({"b", "a_vectors", "instances", "max_count"});
    ratio_col(orbit.columns, "max_ratio");
    orbit.columns.push_back("violations");
    once.columns = cols({"alpha1", "alpha2", "beta1", "beta2", "eps"});
    ratio_col(once.columns, "norm_alpha");
    once.columns.push_back("count");
    ratio_col(once.columns, "bound");
    once.columns.push_back("ok");

    Prng rng = Prng::derive(cfg.seed, kStreamBohr);
    std::vector<std::vector<IVec2>> avecs(static_cast<std::size_t>(cfg.bohr.b_max) + 1);
    for (std::int64_t b = 1; b <= cfg.bohr.b_max; ++b) {
        auto& v = avecs[static_cast<std::size_t>(b)];
        v.push_back({1, 0});
        for (std::int64_t i = 0; i < cfg.bohr.a_per_b; ++i) {
            IVec2 a;
            do {
                a = {rng.range(0, b - 1), rng.range(0, b - 1)};
            } while (std::gcd(std::gcd(a[0], a[1]), b) != 1);
            v.push_back(a);
        }
    }
    struct OrbitOut {
        std::int64_t instances = 0, max_count = 0, violations = 0;
        Ratio max_ratio;
    };
    const std::int64_t G = cfg.bohr.beta_grid;
    auto outs = parallel_map(static_cast<std::size_t>(cfg.bohr.b_max), cfg.workers, [&](std::size_t i) {
        const std::int64_t b = static_cast<std::int64_t>(i) + 1;
        OrbitOut o;
        for (const auto& a : avecs[static_cast<std::size_t>(b)])
            for (long j = 0; j <= cfg.bohr.j_max; ++j) {
                const Ratio eps = pow2(-j);
                const Ratio bound = Ratio(8) * eps * R64(b) + Ratio(1);
                for (std::int64_t x = 0; x < G; ++x)
                    for (std::int64_t y = 0; y < G; ++y) {
                        ++o.instances;
                        try {
                            const std::int64_t c = rational_orbit_count(a, b, Vec2Q{Ratio(x) / R64(G), Ratio(y) / R64(G)}, eps);
                            o.max_count = std::max(o.max_count, c);
                            o.max_ratio = max(o.max_ratio, R64(c) / bound);
                        } catch (const InvariantViolation&) {
                            ++o.violations;
                        }
                    }
            }
        return o;
    });
    std::int64_t orbit_viol = 0, orbit_inst = 0;
    Ratio orbit_ratio;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        const auto& o = outs[i];
        orbit_viol += o.violations;
        orbit_inst += o.instances;
        orbit_ratio = max(orbit_ratio, o.max_ratio);
        std::vector<std::string> row{str(static_cast<std::int64_t>(i) + 1), str(static_cast<std::int64_t>(avecs[i + 1].size())),
                                     str(o.instances), str(o.max_count)};
        add_ratio_cells(row, o.max_ratio);
        row.push_back(str(o.violations));
        orbit.add(std::move(row));
    }

    std::int64_t once_viol = 0;
    Ratio once_ratio;
    for (std::int64_t i = 0; i < cfg.bohr.once_around; ++i) {
        Vec2Q alpha;
        do {
            for (int c = 0; c < 2; ++c) {
                const std::int64_t d = rng.range(1, 1000);
                alpha[c] = Ratio(rng.range(0, d - 1)) / R64(d);
            }
        } while (torus_norm(alpha).is_zero());
        const Vec2Q beta{Ratio(rng.range(0, 999), 1000), Ratio(rng.range(0, 999), 1000)};
        const Ratio eps = pow2(-rng.range(1, cfg.bohr.j_max));
        const Ratio na = torus_norm(alpha);
        const Ratio bound = Ratio(2) * eps / na + Ratio(1);
        std::int64_t count = -1;
        bool ok = true;
        try {
            count = once_around_count(alpha, beta, eps);
            once_ratio = max(once_ratio, R64(count) / bound);
        } catch (const InvariantViolation&) {
            ok = false;
            ++once_viol;
        }
        std::vector<std::string> row{exact(alpha.x), exact(alpha.y), exact(beta.x), exact(beta.y), exact(eps)};
        add_ratio_cells(row, na);
        row.push_back(str(count));
        add_ratio_cells(row, bound);
        row.push_back(yes(ok));
        once.add(std::move(row));
    }
    res.counts["bohr.orbit_instances"] = orbit_inst;
    res.counts["bohr.orbit_violations"] = orbit_viol;
    res.counts["bohr.once_instances"] = cfg.bohr.once_around;
    res.counts["bohr.once_violations"] = once_viol;
    res.values["bohr.orbit_max_ratio"] = orbit_ratio;
    res.values["bohr.once_max_ratio"] = once_ratio;
    res.checks.push_back(make_check("C5", "orbit count <= 8 eps b + 1 and once-around <= 2 eps/||alpha|| + 1",
                                    orbit_viol == 0 && once_viol == 0,
                                    str(orbit_inst) + " orbit instances (" + str(orbit_viol) + " violations), " +
                                        str(cfg.bohr.once_around) + " once-around (" + str(once_viol) + ")"));
    res.tables = {orbit, once};
    return res;
}

// ---------------------------------------------------------------------------
// adhoc: the Bohr-set sums induced by the block strata

SuiteResult suite_adhoc(const ExperimentConfig& cfg, const VerifyThresholds& th) {
    SuiteResult res;
    res.name = "adhoc";
    Table t{"adhoc", {}, {}}, blocks{"adhoc_blocks", {}, {}};
    t.columns = cols({"family", "Q", "R", "j", "bullet", "level", "N"});
    ratio_col(t.columns, "D");
    t.columns.insert(t.columns.end(), {"B", "b", "case", "h_start", "hits"});
    ratio_col(t.columns, "lhs");
    ratio_col(t.columns, "D_omega_lower");
    t.columns.insert(t.columns.end(), {"ind_k", "ind_l"});
    ratio_col(t.columns, "bound_lower");
    ratio_col(t.columns, "ratio_upper");
    blocks.columns = cols({"family", "Q", "R", "instances"});
    ratio_col(blocks.columns, "block_max");

    const ApproxFunction psi = sparse_psi(cfg.adhoc.a_min, cfg.adhoc.a_max, cfg.blocks.points,
                                          splitmix_mix(cfg.seed + kStreamAdhoc));
    struct Item {
        std::size_t family;
        std::int64_t Q, R;
        AdhocInstance inst;
        long j;
        std::size_t unique;
    };
    std::vector<Item> items;
    std::vector<std::pair<std::size_t, AdhocInstance>> uniq;
    std::map<std::tuple<std::size_t, int, long, std::int64_t, std::string, std::string>, std::size_t> seen;
    std::vector<ApproxTable> tables;
    for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
        const IrrationalSurrogate gamma = surrogate_preset(cfg.families[fi], cfg.validity);
        tables.emplace_back(gamma, cfg.params.sigma);
        tables.back().warm(psi_max_level(psi));
        for (const auto& blk : block_grid(cfg.adhoc.a_min, cfg.adhoc.a_max, cfg.adhoc.max_log_ratio)) {
            BlockSpec spec{blk.Q, blk.R, psi, gamma, cfg.params.sigma, true};
            Strata st = stratify(spec, tables.back());
            for (const auto& inst : adhoc_instances(spec, st)) {
                auto key = std::make_tuple(fi, inst.bullet == Bullet::K ? 0 : 1, inst.level, inst.N, inst.D.to_string(),
                                           inst.R_over_Q.to_string());
                auto it = seen.find(key);
                std::size_t u;
                if (it == seen.end()) {
                    u = uniq.size();
                    seen.emplace(key, u);
                    uniq.emplace_back(fi, inst);
                } else {
                    u = it->second;
                }
                const long j = bit_length(inst.D.den());  // D = 2^(-j+1)
                items.push_back({fi, blk.Q, blk.R, inst, j, u});
            }
        }
    }
    auto results = parallel_map(uniq.size(), cfg.workers, [&](std::size_t i) {
        const auto& [fi, inst] = uniq[i];
        return adhoc_bound_eval(tables[fi].gamma(), tables[fi], inst, cfg.params);
    });
    std::map<std::tuple<std::size_t, std::int64_t, std::int64_t>, std::pair<std::int64_t, Ratio>> block_max;
    Ratio c2;
    for (const auto& it : items) {
        const AdhocResult& r = results[it.unique];
        c2 = max(c2, r.ratio_upper);
        auto& bm = block_max[{it.family, it.Q, it.R}];
        bm.first += 1;
        bm.second = max(bm.second, r.ratio_upper);
        std::vector<std::string> row{cfg.families[it.family], str(it.Q), str(it.R), std::to_string(it.j),
                                     bullet_name(it.inst.bullet), std::to_string(it.inst.level), str(it.inst.N)};
        add_ratio_cells(row, it.inst.D);
        row.insert(row.end(), {str(r.B), str(r.b), r.case_one ? "1" : "2", str(r.h_start), str(r.hits)});
        add_ratio_cells(row, r.lhs);
        add_ratio_cells(row, r.D_omega_lower);
        row.push_back(yes(r.ind_k));
        row.push_back(yes(r.ind_l));
        add_ratio_cells(row, r.bound_lower);
        add_ratio_cells(row, r.ratio_upper);
        t.add(std::move(row));
    }
    std::vector<double> maxima;
    for (const auto& [key, v] : block_max) {
        const auto& [fi, Q, R] = key;
        std::vector<std::string> row{cfg.families[fi], str(Q), str(R), str(v.first)};
        add_ratio_cells(row, v.second);
        blocks.add(std::move(row));
        maxima.push_back(v.second.to_double());
    }
    const double med = median(maxima);
    res.values["adhoc.C2"] = c2;
    res.stats["adhoc.median_block_max"] = med;
    res.counts["adhoc.instances"] = static_cast<std::int64_t>(items.size());
    res.counts["adhoc.unique_instances"] = static_cast<std::int64_t>(uniq.size());
    res.counts["adhoc.blocks"] = static_cast<std::int64_t>(block_max.size());
    const bool stable = !maxima.empty() && c2.to_double() <= th.adhoc_stability * med;
    res.checks.push_back(make_check("C6", "adhoc Bohr sums <= C2 (bound terms), C2 stable",
                                    stable,
                                    "C2 " + fmt12(c2.to_double()) + ", median block max " + fmt12(med) + ", " +
                                        str(static_cast<std::int64_t>(items.size())) + " instances"));
    res.tables = {t, blocks};
    return res;
}

// ---------------------------------------------------------------------------
// blocks: the block-sum inequality and the divisor-pair bound

SuiteResult suite_blocks(const ExperimentConfig& cfg, const VerifyThresholds& th) {
    SuiteResult res;
    res.name = "blocks";
    Table t{"blocks", {}, {}}, trend{"blocks_trend", {}, {}};
    t.columns = cols({"generator", "family", "Q", "R", "pairs", "d0", "strata", "f_count"});
    for (const char* n : {"sum_q", "sum_r", "lhs", "product_term", "cross_term", "empirical_constant", "f_sum", "f_constant"})
        ratio_col(t.columns, n);
    trend.columns = cols({"log2_ratio", "blocks"});
    ratio_col(trend.columns, "max_empirical_constant");
    ratio_col(trend.columns, "max_f_constant");
    ratio_col(trend.columns, "max_lhs_over_product");

    std::map<long, std::pair<std::int64_t, Ratio>> by_ratio;
    std::map<long, Ratio> f_by_ratio, indep_by_ratio;
    Ratio c3, c4;
    for (std::size_t gi = 0; gi < cfg.blocks.generators.size(); ++gi) {
        const std::string& gen = cfg.blocks.generators[gi];
        const ApproxFunction psi = make_psi(gen, cfg.blocks.a_min, cfg.blocks.a_max, cfg.blocks.points,
                                            splitmix_mix(cfg.seed + kStreamBlocks + gi));
        for (const auto& family : cfg.families) {
            const IrrationalSurrogate gamma = surrogate_preset(family, cfg.validity);
            ApproxTable table(gamma, cfg.params.sigma);
            table.warm(psi_max_level(psi));
            Ratio fam_c3, fam_c4;
            for (const auto& blk : block_grid(cfg.blocks.a_min, cfg.blocks.a_max, cfg.blocks.max_log_ratio)) {
                BlockSpec spec{blk.Q, blk.R, psi, gamma, cfg.params.sigma, true};
                BlockReport rep = block_sums(spec, table, cfg.workers);
                std::ostringstream strata;
                const char* sep = "";
                for (const auto& [j, c] : rep.strata_counts) {
                    strata << sep << j << ":" << c;
                    sep = ";";
                }
                std::vector<std::string> row{gen, family, str(blk.Q), str(blk.R), str(rep.pairs), str(rep.d0),
                                             strata.str(), str(rep.f_count)};
                for (const Ratio* v : {&rep.sum_q, &rep.sum_r, &rep.lhs, &rep.product_term, &rep.cross_term,
                                       &rep.empirical_constant, &rep.f_sum, &rep.f_constant})
                    add_ratio_cells(row, *v);
                t.add(std::move(row));
                const long lr = bit_length(BigInt(static_cast<long>(blk.Q / blk.R))) - 1;
                auto& br = by_ratio[lr];
                br.first += 1;
                br.second = max(br.second, rep.empirical_constant);
                f_by_ratio[lr] = max(f_by_ratio[lr], rep.f_constant);
                if (!rep.product_term.is_zero())
                    indep_by_ratio[lr] = max(indep_by_ratio[lr], rep.lhs / rep.product_term);
                fam_c3 = max(fam_c3, rep.empirical_constant);
                fam_c4 = max(fam_c4, rep.f_constant);
            }
            res.values["blocks.C3." + gen + "." + family] = fam_c3;
            res.values["blocks.C4." + gen + "." + family] = fam_c4;
            c3 = max(c3, fam_c3);
            c4 = max(c4, fam_c4);
        }
    }
    std::vector<double> xs, ys;
    for (const auto& [lr, v] : by_ratio) {
        std::vector<std::string> row{std::to_string(lr), str(v.first)};
        add_ratio_cells(row, v.second);
        add_ratio_cells(row, f_by_ratio[lr]);
        add_ratio_cells(row, indep_by_ratio[lr]);
        trend.add(std::move(row));
        xs.push_back(static_cast<double>(lr));
        ys.push_back(v.second.to_double());
    }
    const double slope = ls_slope(xs, ys);
    res.values["blocks.C3"] = c3;
    res.values["blocks.C4"] = c4;
    res.stats["blocks.trend_slope"] = slope;
    for (std::size_t i = 0; i < xs.size(); ++i) res.stats["blocks.max_at." + std::to_string(static_cast<long>(xs[i]))] = ys[i];
    res.checks.push_back(make_check("C7", "block sums <= C3 (product + cross), no upward trend in Q/R",
                                    slope <= th.block_trend_slope,
                                    "C3 " + fmt12(c3.to_double()) + ", slope of maxima vs log2(Q/R) " + fmt12(slope)));
    res.checks.push_back(make_check("C8", "divisor-pair sum <= C4 (R/Q) sum_q", c4 <= th.f_constant,
                                    "C4 " + fmt12(c4.to_double())));
    res.tables = {t, trend};
    return res;
}

// ---------------------------------------------------------------------------
// qia: the global second-moment ratio

SuiteResult suite_qia(const ExperimentConfig& cfg, const VerifyThresholds& th) {
    SuiteResult res;
    res.name = "qia";
    Table t{"qia", {}, {}};
    t.columns = cols({"family", "primed", "U"});
    ratio_col(t.columns, "sum");
    ratio_col(t.columns, "square");
    ratio_col(t.columns, "ratio");
    const ApproxFunction psi = sparse_psi(0, cfg.qia.U - 1, cfg.blocks.points, splitmix_mix(cfg.seed + kStreamQia));
    Ratio c5;
    for (const auto& family : cfg.qia.families) {
        const IrrationalSurrogate gamma = surrogate_preset(family, cfg.validity);
        for (int primed = 1; primed >= 0; --primed) {
            QiaTrace tr = qia_trace(psi, gamma, cfg.params.sigma, cfg.qia.U, primed != 0, cfg.workers);
            for (std::size_t i = 0; i < tr.U.size(); ++i) {
                std::vector<std::string> row{family, yes(primed != 0), std::to_string(tr.U[i])};
                add_ratio_cells(row, tr.sum[i]);
                add_ratio_cells(row, tr.square[i]);
                if (tr.defined[i]) {
                    add_ratio_cells(row, tr.ratio[i]);
                } else {
                    row.push_back("undefined");
                    row.push_back("undefined");
                }
                t.add(std::move(row));
                if (primed && tr.defined[i] && tr.U[i] >= 8) c5 = max(c5, tr.ratio[i]);
            }
        }
    }
    res.values["qia.C5"] = c5;
    res.checks.push_back(make_check("QIA", "primed second-moment ratio bounded (U >= 8)", c5 <= th.qia_constant,
                                    "C5 " + fmt12(c5.to_double())));
    res.tables = {t};
    return res;
}

// ---------------------------------------------------------------------------
// model: the model-problem sums

SuiteResult suite_model(const ExperimentConfig& cfg, const VerifyThresholds& th) {
    SuiteResult res;
    res.name = "model";
    Table grid{"model", {}, {}}, slopes{"model_slopes", {}, {}};
    grid.columns = cols({"variant", "family", "support", "M", "B", "b", "large_B", "trials"});
    ratio_col(grid.columns, "max_sum");
    grid.columns.insert(grid.columns.end(), {"argmax_trial", "mean_dec"});
    slopes.columns = cols({"variant", "family", "bounded", "slope_dec"});

    struct Run {
        std::string variant, family;
        bool bounded;
    };
    std::vector<Run> runs;
    for (const auto& v : cfg.model.variants)
        for (const auto& f : cfg.model.families) runs.push_back({v, f, true});
    runs.push_back({"plain", cfg.model.contrast_family, false});
    for (const auto& f : cfg.model.families) runs.push_back({"plain", f, false});

    const SupportKind kind = parse_support_kind(cfg.model.support);
    double worst = -1e300;
    bool all_ok = true;
    for (std::size_t ri = 0; ri < runs.size(); ++ri) {
        const Run& run = runs[ri];
        const ModelVariant variant = parse_model_variant(run.variant);
        const IrrationalSurrogate gamma = surrogate_preset(run.family, cfg.validity);
        std::vector<double> xs, ys;
        for (long lm = cfg.model.log_M_min; lm <= cfg.model.log_M_max; ++lm) {
            const std::int64_t M = std::int64_t{1} << lm;
            auto sums = parallel_map(static_cast<std::size_t>(cfg.model.trials), cfg.workers, [&](std::size_t t) {
                ModelSpec spec;
                spec.T = cfg.model.T;
                spec.M = M;
                spec.gamma = gamma;
                spec.seed = model_trial_seed(cfg.seed, static_cast<std::int64_t>(t));
                spec.variant = variant;
                spec.support = kind;
                spec.sigma = cfg.params.sigma;
                spec.rho = cfg.params.rho;
                return model_sum(spec);
            });
            ModelSpec base;
            base.T = cfg.model.T;
            base.M = M;
            base.gamma = gamma;
            base.variant = variant;
            base.sigma = cfg.params.sigma;
            base.rho = cfg.params.rho;
            const ModelParams mp = model_params(base);
            Ratio best = sums[0], total;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < sums.size(); ++i) {
                total += sums[i];
                if (sums[i] > best) {
                    best = sums[i];
                    arg = i;
                }
            }
            std::vector<std::string> row{run.variant, run.family, cfg.model.support, str(M), str(mp.B), str(mp.b),
                                         yes(mp.large_B), str(cfg.model.trials)};
            add_ratio_cells(row, best);
            row.push_back(str(static_cast<std::int64_t>(arg)));
            row.push_back(decimal(total / R64(cfg.model.trials)));
            grid.add(std::move(row));
            xs.push_back(std::log(static_cast<double>(M)));
            ys.push_back(best.to_double());
        }
        const double slope = ls_slope(xs, ys);
        slopes.add({run.variant, run.family, yes(run.bounded), fmt12(slope)});
        res.stats["model.slope." + run.variant + "." + run.family] = slope;
        if (run.bounded) {
            worst = std::max(worst, slope);
            all_ok = all_ok && slope <= th.model_slope;
        }
    }
    res.stats["model.worst_slope"] = worst;
    res.checks.push_back(make_check("C9", "model_sum max over trials flat in M (slope vs ln M <= 0.05)", all_ok,
                                    "worst slope " + fmt12(worst)));
    res.tables = {grid, slopes};
    return res;
}

// ---------------------------------------------------------------------------
// convergence: union of E_q against the subadditive bound

SuiteResult suite_convergence(const ExperimentConfig& cfg, const VerifyThresholds&) {
    SuiteResult res;
    res.name = "convergence";
    Table t{"convergence", {}, {}}, tail{"convergence_tail", {}, {}};
    t.columns = cols({"family", "Q0", "Q1"});
    ratio_col(t.columns, "union");
    ratio_col(t.columns, "subadditive");
    t.columns.insert(t.columns.end(), {"within", "strict"});
    tail.columns = cols({"Q0"});
    ratio_col(tail.columns, "tail_bound");
    tail.columns.push_back("below_tenth");

    struct Job {
        std::string family;
        std::int64_t Q0;
    };
    std::vector<Job> jobs;
    for (const auto& f : cfg.families)
        for (auto q0 : cfg.convergence.Q0) jobs.push_back({f, q0});
    struct Out {
        TailReport rep;
        bool ok = true;
    };
    auto outs = parallel_map(jobs.size(), cfg.workers, [&](std::size_t i) {
        const Job& j = jobs[i];
        const IrrationalSurrogate gamma = surrogate_preset(j.family, cfg.validity);
        Out o;
        try {
            o.rep = convergence_tail(psi_three_quarters(j.Q0, 2 * j.Q0), gamma, j.Q0, 2 * j.Q0);
        } catch (const InvariantViolation&) {
            o.ok = false;
        }
        return o;
    });
    std::int64_t bad = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Out& o = outs[i];
        if (!o.ok) ++bad;
        std::vector<std::string> row{jobs[i].family, str(jobs[i].Q0), str(2 * jobs[i].Q0)};
        add_ratio_cells(row, o.rep.union_measure);
        add_ratio_cells(row, o.rep.subadditive);
        row.push_back(yes(o.ok));
        row.push_back(yes(o.rep.union_measure < o.rep.subadditive));
        t.add(std::move(row));
    }
    bool tail_ok = true;
    std::set<std::int64_t> tail_points{100, 10'000, cfg.convergence.tail_Q0};
    for (auto q0 : tail_points) {
        const Ratio b = tail_bound_three_quarters(q0);
        const bool below = b < Ratio(1, 10);
        if (q0 >= cfg.convergence.tail_Q0) tail_ok = tail_ok && below;
        std::vector<std::string> row{str(q0)};
        add_ratio_cells(row, b);
        row.push_back(yes(below));
        tail.add(std::move(row));
    }
    res.counts["convergence.violations"] = bad;
    res.counts["convergence.instances"] = static_cast<std::int64_t>(jobs.size());
    res.values["convergence.tail_bound"] = tail_bound_three_quarters(cfg.convergence.tail_Q0);
    res.checks.push_back(make_check("C10", "union <= sum 4 psi^2 and tail bound < 1/10",
                                    bad == 0 && tail_ok,
                                    str(bad) + " violations, tail bound at Q0 = " + str(cfg.convergence.tail_Q0) +
                                        " is " + decimal(res.values["convergence.tail_bound"])));
    res.tables = {t, tail};
    return res;
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() {
    return {"residues", "overlaps", "bohr", "adhoc", "blocks", "qia", "model", "convergence"};
}

SuiteResult run_suite(const std::string& name, const ExperimentConfig& cfg, const VerifyThresholds& th) {
    if (name == "residues") return suite_residues(cfg, th);
    if (name == "overlaps") return suite_overlaps(cfg, th);
    if (name == "bohr") return suite_bohr(cfg, th);
    if (name == "adhoc") return suite_adhoc(cfg, th);
    if (name == "blocks") return suite_blocks(cfg, th);
    if (name == "qia") return suite_qia(cfg, th);
    if (name == "model") return suite_model(cfg, th);
    if (name == "convergence") return suite_convergence(cfg, th);
    throw ValidityError("unknown suite '" + name + "'");
}

void write_suite_reports(const std::vector<SuiteResult>& results, const std::string& out_dir,
                         const std::string& command, std::int64_t wall_ms) {
    std::filesystem::create_directories(out_dir);
    const std::string header = header_line(command, wall_ms);
    Table summary{"summary", cols({"suite", "id", "check", "pass", "detail"}), {}};
    for (const auto& r : results) {
        for (const auto& t : r.tables) write_file(out_dir + "/" + t.name + ".csv", to_csv(t, header));
        for (const auto& c : r.checks) summary.add({r.name, c.id, c.what, c.pass ? "PASS" : "FAIL", c.detail});
    }
    write_file(out_dir + "/summary.csv", to_csv(summary, header));
}

} // namespace klab::harness

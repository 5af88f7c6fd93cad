#include "klab/approx.hpp"
#include "klab/arith.hpp"
#include "klab/bohr.hpp"
#include "klab/errors.hpp"
#include "klab/harness/config.hpp"
#include "klab/harness/report.hpp"
#include "klab/harness/suites.hpp"
#include "klab/measure.hpp"
#include "klab/parallel.hpp"
#include "klab/qia.hpp"
#include "klab/shiftred.hpp"
#include "klab/surrogate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace klab;
using namespace klab::harness;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::int64_t> validity;
    std::string out;
};

ExperimentConfig load(const Globals& g) {
    ExperimentConfig cfg = g.config_path.empty() ? parse_config("{}") : load_config(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    if (g.workers) cfg.workers = *g.workers;
    if (g.validity) cfg.validity = *g.validity;
    cfg.validate();
    return cfg;
}

std::string row_str(std::int64_t v) { return std::to_string(v); }

// "x,y" with each part an integer or p/q.
Vec2Q parse_vec(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ValidityError("expected x,y but got '" + text + "'");
    return {Ratio::parse(text.substr(0, comma)), Ratio::parse(text.substr(comma + 1))};
}

// "a1,a2/b": the rational point (a1/b, a2/b) given by its numerator vector and denominator.
void parse_rational_point(const std::string& text, IVec2& a, std::int64_t& b) {
    const auto slash = text.rfind('/');
    const auto comma = text.find(',');
    if (slash == std::string::npos || comma == std::string::npos || comma > slash)
        throw ValidityError("--rational expects a1,a2/b, got '" + text + "'");
    try {
        a = {std::stoll(text.substr(0, comma)), std::stoll(text.substr(comma + 1, slash - comma - 1))};
        b = std::stoll(text.substr(slash + 1));
    } catch (const std::logic_error&) {
        throw ValidityError("--rational expects integers in a1,a2/b, got '" + text + "'");
    }
}

// "16..1024" (powers of two in between), "16,32,64" or "256".
std::vector<std::int64_t> parse_M_list(const std::string& text) {
    std::vector<std::int64_t> out;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const std::int64_t lo = std::stoll(text.substr(0, dots)), hi = std::stoll(text.substr(dots + 2));
            if (lo < 1 || hi < lo || (lo & (lo - 1)) != 0) throw ValidityError("--M range needs a power-of-two start");
            for (std::int64_t m = lo; m <= hi; m *= 2) out.push_back(m);
        } else {
            std::size_t pos = 0;
            while (pos <= text.size()) {
                const auto next = text.find(',', pos);
                out.push_back(std::stoll(text.substr(pos, next - pos)));
                if (next == std::string::npos) break;
                pos = next + 1;
            }
        }
    } catch (const std::logic_error& e) {
        if (const auto* v = dynamic_cast<const ValidityError*>(&e)) throw *v;
        throw ValidityError("cannot parse --M '" + text + "'");
    }
    for (auto m : out)
        if (m < 2) throw ValidityError("--M values must be at least 2");
    return out;
}

void emit(const Table& t, const std::string& command, std::int64_t wall_ms, const std::string& out) {
    const std::string text = to_csv(t, header_line(command, wall_ms));
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
    }
}

class Stopwatch {
public:
    std::int64_t ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lab: exact experiments on shifted simultaneous approximation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "JSON experiment config");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--workers", g.workers, "worker threads (default LAB_WORKERS or 1)")->check(CLI::Range(1, 1024));
    app.add_option("--validity", g.validity, "surrogate validity bound V");
    app.add_option("--out", g.out, "output file (tables) or directory (verify)");

    std::string command;
    for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

    // approx
    auto* approx = app.add_subcommand("approx", "first-kind and Dirichlet approximations per level");
    std::string a_gamma = "quad-sqrt2", a_sigma;
    long a_kmin = 2, a_kmax = 12;
    approx->add_option("--gamma", a_gamma, "surrogate preset");
    approx->add_option("--k-min", a_kmin)->check(CLI::Range(1L, 62L));
    approx->add_option("--k-max", a_kmax)->check(CLI::Range(1L, 62L));
    approx->add_option("--sigma", a_sigma, "p/q, default from config");

    // shiftred
    auto* shiftred = app.add_subcommand("shiftred", "reduced residue sets S_q at one level");
    std::string s_gamma = "quad-sqrt2";
    long s_k = 8;
    std::int64_t s_qmax = 40;
    shiftred->add_option("--gamma", s_gamma);
    shiftred->add_option("--k", s_k)->check(CLI::Range(2L, 62L));
    shiftred->add_option("--q-max", s_qmax)->check(CLI::Range(std::int64_t{1}, std::int64_t{5000}));

    // measure
    auto* measure = app.add_subcommand("measure", "pairwise overlap lambda(E_q cap E_r)");
    std::string m_gamma = "quad-sqrt2", m_psiq = "1/8", m_psir = "1/8";
    std::int64_t m_q = 12, m_r = 8;
    bool m_primed = false, m_brute = false;
    measure->add_option("--gamma", m_gamma);
    measure->add_option("--q", m_q)->required();
    measure->add_option("--r", m_r)->required();
    measure->add_option("--psi-q", m_psiq);
    measure->add_option("--psi-r", m_psir);
    measure->add_flag("--primed", m_primed, "restrict residues to S_q");
    measure->add_flag("--brute", m_brute, "also run the brute-force oracle");

    // bohr
    auto* bohr = app.add_subcommand("bohr", "Bohr set counts");
    std::string b_rational, b_gamma, b_alpha, b_eps = "1/10", b_beta = "0,0";
    std::int64_t b_N = 1000;
    bohr->add_option("--rational", b_rational, "full orbit of a/b, written a1,a2/b");
    bohr->add_option("--gamma", b_gamma, "count 1 <= h <= N with ||h gamma + beta|| < eps");
    bohr->add_option("--alpha", b_alpha, "once-around count for alpha = x,y");
    bohr->add_option("--N", b_N);
    bohr->add_option("--eps", b_eps);
    bohr->add_option("--beta", b_beta);

    // qia
    auto* qia = app.add_subcommand("qia", "second-moment ratio trace");
    std::string q_gamma = "liouville", q_psi = "sparse";
    long q_U = 12;
    bool q_primed = false;
    qia->add_option("--gamma", q_gamma);
    qia->add_option("--U", q_U)->check(CLI::Range(1L, 20L));
    qia->add_option("--psi", q_psi, "sparse or power:<s>");
    qia->add_flag("--primed", q_primed);

    // model
    auto* model = app.add_subcommand("model", "model-problem sums over seeded supports");
    std::string o_variant = "shiftb", o_M = "16..1024", o_gamma = "liouville", o_support = "clusters";
    std::int64_t o_trials = 20, o_T = std::int64_t{1} << 30;
    model->add_option("--variant", o_variant, "plain, shiftB or shiftb");
    model->add_option("--M", o_M, "lo..hi (powers of two) or a comma list");
    model->add_option("--trials", o_trials)->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}));
    model->add_option("--gamma", o_gamma);
    model->add_option("--support", o_support, "random, multiples or clusters");
    model->add_option("--T", o_T);

    // verify
    auto* verify = app.add_subcommand("verify", "invariant suites and acceptance checks");
    std::string v_suite = "all";
    std::optional<std::int64_t> v_qmax, v_pairs, v_trials;
    std::optional<long> v_U;
    verify->add_option("suite", v_suite, "suite name or all")->required();
    verify->add_option("--q-max", v_qmax, "q_max of the residues and overlaps suites");
    verify->add_option("--pairs", v_pairs, "pairs per family and primality (overlaps)");
    verify->add_option("--trials", v_trials, "model trials");
    verify->add_option("--U", v_U, "qia depth");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    Stopwatch clock;
    try {
        const ExperimentConfig cfg0 = load(g);

        if (*approx) {
            const Ratio sigma = a_sigma.empty() ? cfg0.params.sigma : Ratio::parse(a_sigma);
            if (a_kmin > a_kmax) throw ValidityError("--k-min exceeds --k-max");
            ApproxTable table(surrogate_preset(a_gamma, cfg0.validity), sigma);
            table.warm(a_kmax);
            Table t{"approx", {"k", "B", "A1", "A2", "b", "a1", "a2"}, {}};
            add_ratio_columns(t.columns, "norm_b_gamma");
            add_ratio_columns(t.columns, "first_kind_error");
            t.columns.insert(t.columns.end(), {"branch", "M", "m1", "m2"});
            for (long k = a_kmin; k <= a_kmax; ++k) {
                const ShiftContext& c = table.at(k);
                std::vector<std::string> row{std::to_string(k), row_str(c.first_kind.B), row_str(c.first_kind.A[0]),
                                             row_str(c.first_kind.A[1])};
                if (c.dirichlet) {
                    row.insert(row.end(), {row_str(c.dirichlet->b), row_str(c.dirichlet->a[0]), row_str(c.dirichlet->a[1])});
                    add_ratio_cells(row, norm_multiple(table.gamma(), c.dirichlet->b));
                } else {
                    row.insert(row.end(), {"-", "-", "-", "-", "-"});
                }
                add_ratio_cells(row, first_kind_error(table.gamma(), c.first_kind.B, c.first_kind.A));
                row.insert(row.end(), {branch_name(c.branch), row_str(c.modulus()), row_str(c.shift()[0]),
                                       row_str(c.shift()[1])});
                t.add(std::move(row));
            }
            emit(t, command, clock.ms(), g.out);
            return 0;
        }

        if (*shiftred) {
            ApproxTable table(surrogate_preset(s_gamma, cfg0.validity), cfg0.params.sigma);
            table.warm(s_k);
            const ShiftContext& c = table.at(s_k);
            Table t{"shiftred", {"k", "M", "m1", "m2", "q", "pi_q", "count", "formula", "formula_equal"}, {}};
            add_ratio_columns(t.columns, "density");
            t.columns.push_back("density_ok");
            auto rows = parallel_map(static_cast<std::size_t>(s_qmax), cfg0.workers, [&](std::size_t i) {
                const std::int64_t q = static_cast<std::int64_t>(i) + 1;
                ResidueSet rs = residue_set(q, c);
                const BigInt f = cardinality_formula(q, c);
                std::vector<std::string> row{std::to_string(s_k), row_str(c.modulus()), row_str(c.shift()[0]),
                                             row_str(c.shift()[1]), row_str(q), row_str(pi_q(q, c)),
                                             row_str(rs.count), f.get_str(), f == rs.count ? "1" : "0"};
                add_ratio_cells(row, Ratio(rs.count) / (Ratio(q) * Ratio(q)));
                row.push_back(5 * rs.count >= 3 * q * q ? "1" : "0");
                return row;
            });
            for (auto& r : rows) t.add(std::move(r));
            emit(t, command, clock.ms(), g.out);
            return 0;
        }

        if (*measure) {
            if (m_r < 1 || m_q <= m_r) throw ValidityError("measure needs 1 <= r < q");
            const IrrationalSurrogate gamma = surrogate_preset(m_gamma, cfg0.validity);
            ApproxFunction psi;
            psi.set(m_q, Ratio::parse(m_psiq));
            psi.set(m_r, Ratio::parse(m_psir));
            ApproxTable table(gamma, cfg0.params.sigma);
            table.warm(std::max(dyadic_level(psi.at(m_q)), dyadic_level(psi.at(m_r))));
            OverlapResult fast = overlap_fast(m_q, m_r, psi, gamma, table, m_primed, Detail::Full);
            const PairGeometry& G = fast.geometry;
            Table t{"measure", {"q", "r", "primed", "g", "h"}, {}};
            add_ratio_columns(t.columns, "D");
            t.columns.insert(t.columns.end(), {"bullet", "level", "B"});
            add_ratio_columns(t.columns, "lambda_q");
            add_ratio_columns(t.columns, "lambda_r");
            add_ratio_columns(t.columns, "overlap");
            t.columns.insert(t.columns.end(), {"pair_count", "value_count", "oracle"});
            std::vector<std::string> row{row_str(m_q), row_str(m_r), m_primed ? "1" : "0", row_str(G.g), row_str(G.h)};
            add_ratio_cells(row, G.D);
            row.insert(row.end(), {bullet_name(G.bullet), std::to_string(G.bullet_level), row_str(G.B_bullet)});
            add_ratio_cells(row, measure_single(m_q, psi, table, m_primed));
            add_ratio_cells(row, measure_single(m_r, psi, table, m_primed));
            add_ratio_cells(row, fast.measure);
            row.push_back(row_str(fast.pair_count));
            row.push_back(row_str(fast.value_count));
            if (m_brute) {
                OverlapResult brute = overlap_bruteforce(m_q, m_r, psi, gamma, table, m_primed);
                const bool same = brute.measure == fast.measure && brute.pair_count == fast.pair_count &&
                                  brute.value_count == fast.value_count;
                if (!same) {
                    throw InvariantViolation("overlap_fast disagrees with overlap_bruteforce at q=" + row_str(m_q) +
                                             " r=" + row_str(m_r) + ": " + fast.measure.to_string() + " vs " +
                                             brute.measure.to_string());
                }
                row.push_back("equal");
            } else {
                row.push_back("-");
            }
            t.add(std::move(row));
            emit(t, command, clock.ms(), g.out);
            return 0;
        }

        if (*bohr) {
            const Ratio eps = Ratio::parse(b_eps);
            const Vec2Q beta = parse_vec(b_beta);
            const int modes = !b_rational.empty() + !b_gamma.empty() + !b_alpha.empty();
            if (modes != 1) throw ValidityError("bohr needs exactly one of --rational, --gamma, --alpha");
            Table t{"bohr", {}, {}};
            if (!b_rational.empty()) {
                IVec2 a;
                std::int64_t b = 0;
                parse_rational_point(b_rational, a, b);
                t.columns = {"a1", "a2", "b", "beta1", "beta2"};
                add_ratio_columns(t.columns, "eps");
                t.columns.push_back("count");
                add_ratio_columns(t.columns, "bound");
                const std::int64_t count = rational_orbit_count(a, b, beta, eps);
                std::vector<std::string> row{row_str(a[0]), row_str(a[1]), row_str(b), exact(beta.x), exact(beta.y)};
                add_ratio_cells(row, eps);
                row.push_back(row_str(count));
                add_ratio_cells(row, Ratio(8) * eps * Ratio(b) + Ratio(1));
                t.add(std::move(row));
            } else if (!b_gamma.empty()) {
                BohrQuery qy{surrogate_preset(b_gamma, cfg0.validity), b_N, eps, beta};
                t.columns = {"gamma", "N", "beta1", "beta2"};
                add_ratio_columns(t.columns, "eps");
                t.columns.push_back("count");
                add_ratio_columns(t.columns, "density");
                const std::int64_t count = bohr_count(qy);
                std::vector<std::string> row{b_gamma, row_str(b_N), exact(beta.x), exact(beta.y)};
                add_ratio_cells(row, eps);
                row.push_back(row_str(count));
                add_ratio_cells(row, Ratio(count) / Ratio(b_N));
                t.add(std::move(row));
            } else {
                const Vec2Q alpha = parse_vec(b_alpha);
                t.columns = {"alpha1", "alpha2", "beta1", "beta2"};
                add_ratio_columns(t.columns, "eps");
                add_ratio_columns(t.columns, "norm_alpha");
                t.columns.push_back("count");
                add_ratio_columns(t.columns, "bound");
                const std::int64_t count = once_around_count(alpha, beta, eps);
                const Ratio na = torus_norm(alpha);
                std::vector<std::string> row{exact(alpha.x), exact(alpha.y), exact(beta.x), exact(beta.y)};
                add_ratio_cells(row, eps);
                add_ratio_cells(row, na);
                row.push_back(row_str(count));
                add_ratio_cells(row, Ratio(2) * eps / na + Ratio(1));
                t.add(std::move(row));
            }
            emit(t, command, clock.ms(), g.out);
            return 0;
        }

        if (*qia) {
            const ApproxFunction psi = make_psi(q_psi, 0, q_U - 1, cfg0.blocks.points, splitmix_mix(cfg0.seed + 5000));
            QiaTrace tr = qia_trace(psi, surrogate_preset(q_gamma, cfg0.validity), cfg0.params.sigma, q_U, q_primed,
                                    cfg0.workers);
            Table t{"qia", {"U", "primed"}, {}};
            add_ratio_columns(t.columns, "sum");
            add_ratio_columns(t.columns, "square");
            add_ratio_columns(t.columns, "ratio");
            for (std::size_t i = 0; i < tr.U.size(); ++i) {
                std::vector<std::string> row{std::to_string(tr.U[i]), q_primed ? "1" : "0"};
                add_ratio_cells(row, tr.sum[i]);
                add_ratio_cells(row, tr.square[i]);
                if (tr.defined[i]) {
                    add_ratio_cells(row, tr.ratio[i]);
                } else {
                    row.insert(row.end(), {"undefined", "undefined"});
                }
                t.add(std::move(row));
            }
            emit(t, command, clock.ms(), g.out);
            return 0;
        }

        if (*model) {
            const ModelVariant variant = parse_model_variant(o_variant);
            const SupportKind kind = parse_support_kind(o_support);
            const IrrationalSurrogate gamma = surrogate_preset(o_gamma, cfg0.validity);
            Table t{"model", {"variant", "gamma", "support", "M", "B", "b", "large_B", "trials"}, {}};
            add_ratio_columns(t.columns, "max_sum");
            t.columns.insert(t.columns.end(), {"argmax_trial"});
            add_ratio_columns(t.columns, "mean_sum");
            for (std::int64_t M : parse_M_list(o_M)) {
                ModelSpec base;
                base.T = o_T;
                base.M = M;
                base.gamma = gamma;
                base.variant = variant;
                base.support = kind;
                base.sigma = cfg0.params.sigma;
                base.rho = cfg0.params.rho;
                auto sums = parallel_map(static_cast<std::size_t>(o_trials), cfg0.workers, [&](std::size_t i) {
                    ModelSpec s = base;
                    s.seed = model_trial_seed(cfg0.seed, static_cast<std::int64_t>(i));
                    return model_sum(s);
                });
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
                std::vector<std::string> row{model_variant_name(variant), o_gamma, support_kind_name(kind), row_str(M),
                                             row_str(mp.B), row_str(mp.b), mp.large_B ? "1" : "0", row_str(o_trials)};
                add_ratio_cells(row, best);
                row.push_back(row_str(static_cast<std::int64_t>(arg)));
                add_ratio_cells(row, total / Ratio(o_trials));
                t.add(std::move(row));
            }
            emit(t, command, clock.ms(), g.out);
            return 0;
        }

        if (*verify) {
            ExperimentConfig cfg = cfg0;
            if (v_qmax) {
                if (v_suite == "residues" || v_suite == "all") cfg.residues.q_max = *v_qmax;
                if (v_suite == "overlaps" || v_suite == "all") cfg.overlaps.q_max = *v_qmax;
            }
            if (v_pairs) cfg.overlaps.pairs = *v_pairs;
            if (v_trials) cfg.model.trials = *v_trials;
            if (v_U) cfg.qia.U = *v_U;
            if (!g.out.empty()) cfg.out_dir = g.out;
            cfg.validate();
            std::vector<std::string> names = v_suite == "all" ? suite_names() : std::vector<std::string>{v_suite};
            std::vector<SuiteResult> results;
            bool ok = true;
            for (const auto& n : names) {
                Stopwatch sw;
                results.push_back(run_suite(n, cfg));
                for (const auto& c : results.back().checks) {
                    std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << " [" << n << "] " << c.what << ": " << c.detail
                              << "\n";
                    ok = ok && c.pass;
                }
                std::cerr << "suite " << n << " " << sw.ms() << " ms\n";
            }
            write_suite_reports(results, cfg.out_dir, command, clock.ms());
            std::cout << (ok ? "all checks passed" : "some checks failed") << "; reports in " << cfg.out_dir << "\n";
            return ok ? 0 : 2;
        }
    } catch (const ValidityError& e) {
        std::cerr << "lab: " << e.what() << "\n";
        return 1;
    } catch (const BudgetExceeded& e) {
        std::cerr << "lab: budget exceeded: " << e.what() << "\n";
        return 1;
    } catch (const InvariantViolation& e) {
        std::cerr << "lab: invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "lab: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

#pragma once

#include "klab/approx.hpp"
#include "klab/bohr.hpp"
#include "klab/measure.hpp"
#include "klab/prng.hpp"
#include "klab/ratio.hpp"
#include "klab/shiftred.hpp"
#include "klab/surrogate.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace klab {

// Blocks (Q, 2Q] and (R, 2R], R <= Q.
struct BlockSpec {
    std::int64_t Q = 1;
    std::int64_t R = 1;
    ApproxFunction psi;
    IrrationalSurrogate gamma;
    Ratio sigma{2, 3};
    bool primed = true;

    void validate() const;
};

// Stratum labels: 0 is D_0 (D > 1), j >= 1 is D_j, kStratumF is F.
inline constexpr long kStratumF = -1;

struct PairRecord {
    std::int64_t q = 0, r = 0;
    long stratum = 0;
    Ratio D;
    Bullet bullet = Bullet::K;
    long bullet_level = 0;
};

struct Strata {
    std::vector<PairRecord> pairs;  // every supported r < q, ordered by (q, r)
    std::int64_t d0 = 0;
    std::map<long, std::int64_t> dj;  // j >= 1 -> |D_j|
    std::int64_t f = 0;
};

// Stratum of a pair with the given D: 0, j or kStratumF.
long stratum_of(std::int64_t q, std::int64_t r, const Ratio& D);

// Warms `table` (if needed) to every level of psi on the two blocks.
ApproxTable block_table(const BlockSpec& spec);

Strata stratify(const BlockSpec& spec, const ApproxTable& table);
Strata stratify(const BlockSpec& spec);

// Pairs with D <= 1 found by enumerating g | q and e = r/g <= 1/(2 psi(q)),
// ordered by (q, r). Must agree with the D <= 1 part of stratify.
std::vector<PairRecord> near_pairs_divisor(const BlockSpec& spec, const ApproxTable& table);

struct BlockReport {
    std::int64_t Q = 0, R = 0;
    Ratio lhs;
    Ratio sum_q, sum_r;
    Ratio product_term;
    Ratio cross_term;
    Ratio log_plus;
    std::int64_t pairs = 0;
    std::int64_t d0 = 0;
    std::map<long, std::int64_t> strata_counts;
    std::int64_t f_count = 0;
    Ratio f_sum;
    Ratio f_constant;  // f_sum / ((R/Q) sum_q), 0 when sum_q = 0
    Ratio empirical_constant;
};

// log+(Q/R) = max(1, log2(Q/R)); Q/R must be a power of two.
Ratio log_plus(std::int64_t Q, std::int64_t R);

BlockReport block_sums(const BlockSpec& spec, const ApproxTable& table, int workers = 1);
BlockReport block_sums(const BlockSpec& spec, int workers = 1);

// Sum over F only; throws InvariantViolation if it exceeds c4 (R/Q) sum_q.
Ratio f_set_sum(const BlockSpec& spec, const ApproxTable& table, const Ratio& c4);
// Direct enumeration of q = m r, m >= 2, used as the oracle.
Ratio f_set_sum_direct(const BlockSpec& spec, const ApproxTable& table);

// The adhoc Bohr instances induced by the strata of one block pair:
// for each (j >= 2, bullet, level) present, N = (Q/R) 2^(k-j+2) for k and
// 2^(l-j+3) for l, D = 2^(-j+1).
std::vector<AdhocInstance> adhoc_instances(const BlockSpec& spec, const Strata& strata);

struct QiaTrace {
    std::vector<long> U;         // 1..U_max
    std::vector<Ratio> ratio;    // empty optional shown as undefined
    std::vector<bool> defined;
    std::vector<Ratio> sum;      // sum of lambda over s <= 2^U
    std::vector<Ratio> square;   // full square sum over s, t <= 2^U
};

// sum_{s,t <= 2^U} lambda(E_s* cap E_t*) / (sum_{s <= 2^U} lambda(E_s*))^2 for U = 1..U_max.
QiaTrace qia_trace(const ApproxFunction& psi, const IrrationalSurrogate& gamma, const Ratio& sigma,
                   long U_max, bool primed, int workers = 1);
// Last entry of the trace; nullopt when the denominator is zero.
std::optional<Ratio> qia_ratio(const ApproxFunction& psi, const IrrationalSurrogate& gamma, const Ratio& sigma,
                               long U, bool primed, int workers = 1);

enum class ModelVariant { Plain, ShiftB, Shiftb };
const char* model_variant_name(ModelVariant v);
ModelVariant parse_model_variant(const std::string& name);

enum class SupportKind { Random, Multiples, Clusters };
const char* support_kind_name(SupportKind k);
SupportKind parse_support_kind(const std::string& name);

struct ModelSpec {
    std::int64_t T = std::int64_t{1} << 30;
    std::int64_t M = 16;
    IrrationalSurrogate gamma;
    std::uint64_t seed = 0;
    ModelVariant variant = ModelVariant::Plain;
    SupportKind support = SupportKind::Random;
    Ratio sigma{2, 3};
    Ratio rho{1, 6};
};

// Random: M distinct values uniform in [T, 2T].
// Multiples: (T/M) n for all but one n in [M, 2M]; requires M | T.
// Clusters: groups G n, n in [N, 2N), N = 2^s, 1 <= s, 16 4^(s+1) <= M (or s = 1),
// G uniform with every G n in [T, 2T], until M distinct values.
std::vector<std::int64_t> model_support(const ModelSpec& spec);

struct ModelParams {
    std::int64_t B = 1;          // minimal B with |gamma - A/B| < M^(-1/2)
    std::int64_t b = 0;          // Dirichlet denominator (0 when unused)
    Ratio norm_b;                // ||b gamma||
    bool large_B = false;        // B > M^(sigma/2)
};

// B(M) and, for the shiftb variant with B > M^(sigma/2), the minimal b < B with
// ||b gamma|| <= 1/B (diagonal gamma) or <= B^(-1/2) (general gamma).
ModelParams model_params(const ModelSpec& spec);

// (1/M^2) sum_j 4^j sum over ordered q != r with D <= 2^-j of
// 1[||h gamma|| < 2^-j] times the variant indicator, h = |q - r| / gcd.
Ratio model_sum(const ModelSpec& spec, const std::vector<std::int64_t>& support);
Ratio model_sum(const ModelSpec& spec);
// Same sum by a direct triple loop over (q, r, j) with exact rationals.
Ratio model_sum_reference(const ModelSpec& spec, const std::vector<std::int64_t>& support);

// psi(q) = floor(2^20 q^(-3/4)) / 2^20 on [lo, hi].
ApproxFunction psi_three_quarters(std::int64_t lo, std::int64_t hi);

struct TailReport {
    Ratio union_measure;
    Ratio subadditive;  // sum 4 psi(q)^2
};

// Exact area of the union of E_q, Q0 <= q <= Q1; asserts <= sum 4 psi(q)^2.
TailReport convergence_tail(const ApproxFunction& psi, const IrrationalSurrogate& gamma, std::int64_t Q0,
                            std::int64_t Q1, std::int64_t budget = kUnionBudget);

// Upper bound for sum_{q >= Q0} 4 q^(-3/2): 4/s^3 + 8/s with s = floor(sqrt(Q0)).
Ratio tail_bound_three_quarters(std::int64_t Q0);

} // namespace klab

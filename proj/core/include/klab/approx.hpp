#pragma once

#include "klab/ratio.hpp"
#include "klab/surrogate.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace klab {

using IVec2 = std::array<std::int64_t, 2>;

// Minimal B >= 1 with |gamma - A/B| < 2^-k (max norm), A nearest to B*gamma.
struct FirstKindApprox {
    long k = 0;
    std::int64_t B = 1;
    IVec2 A{0, 0};
};

// Minimal 1 <= b < B_k with ||b gamma|| <= B_k^(-1/2), a nearest to b*gamma.
struct DirichletApprox {
    long k = 0;
    std::int64_t b = 1;
    IVec2 a{0, 0};
};

enum class Branch { FirstKind, Dirichlet };

const char* branch_name(Branch b);

struct ShiftContext {
    long k = 0;
    FirstKindApprox first_kind;
    std::optional<DirichletApprox> dirichlet;
    Ratio sigma;
    Branch branch = Branch::FirstKind;

    // (M, m) of the residue condition gcd(M u + m, M q) = 1.
    std::int64_t modulus() const;
    IVec2 shift() const;
};

// Nearest integer to x, ties to even.
BigInt nearest_integer(const Ratio& x);

// Upper limit on scan iterations before BudgetExceeded.
inline constexpr std::int64_t kScanBudget = std::int64_t{1} << 28;

// Scans B = start, start+1, ...; `start` must not exceed the true answer.
FirstKindApprox first_kind(const IrrationalSurrogate& gamma, long k, std::int64_t start = 1);

// Minimal B with |gamma - A/B|^2 < radius_sq (k is reported as -1).
FirstKindApprox first_kind_within_sq(const IrrationalSurrogate& gamma, const Ratio& radius_sq);

DirichletApprox dirichlet(const IrrationalSurrogate& gamma, const FirstKindApprox& fk);

ShiftContext shift_context(const IrrationalSurrogate& gamma, long k, const Ratio& sigma);

// First n convergents p_i/q_i of [a0; a1, ...] (periodic extension beyond the list).
std::vector<std::pair<BigInt, BigInt>> convergents_1d(const std::vector<std::int64_t>& cf, int n);

// |gamma - A/B| in the max norm.
Ratio first_kind_error(const IrrationalSurrogate& gamma, std::int64_t B, const IVec2& A);

// ||n gamma|| on the torus.
Ratio norm_multiple(const IrrationalSurrogate& gamma, std::int64_t n);

// Memo of shift contexts for one (gamma, sigma). warm() is single threaded;
// afterwards at() is read-only and safe from any number of workers.
class ApproxTable {
public:
    ApproxTable(IrrationalSurrogate gamma, Ratio sigma);

    void warm(long k_max);
    const ShiftContext& at(long k) const;
    long warmed_to() const { return static_cast<long>(levels_.size()) - 1; }

    const IrrationalSurrogate& gamma() const { return gamma_; }
    const Ratio& sigma() const { return sigma_; }

private:
    IrrationalSurrogate gamma_;
    Ratio sigma_;
    std::vector<ShiftContext> levels_;
};

} // namespace klab

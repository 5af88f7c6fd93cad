#pragma once

#include "klab/ratio.hpp"

#include <cstdint>
#include <vector>

namespace klab {

// Distinct prime divisors of n >= 1, ascending (trial division).
std::vector<std::int64_t> prime_factors(std::int64_t n);

std::int64_t floor_mod(std::int64_t a, std::int64_t m);
// Inverse of a modulo m; requires gcd(a, m) = 1 and m >= 1.
std::int64_t mod_inverse(std::int64_t a, std::int64_t m);
// Returns (x, y) with a*x + b*y = gcd(a, b), for a, b >= 0.
void ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& g, std::int64_t& x, std::int64_t& y);

std::int64_t to_i64(const BigInt& v);
BigInt ipow(const BigInt& base, unsigned long e);
BigInt isqrt(const BigInt& v);
// Number of binary digits of v > 0.
long bit_length(const BigInt& v);

// All squarefree divisors of the product of `primes`; entry i is the
// product over the set bits of i, with Moebius sign (-1)^popcount(i).
struct SquarefreeDivisors {
    std::vector<std::int64_t> value;
    std::vector<int> mu;
};
SquarefreeDivisors squarefree_divisors(const std::vector<std::int64_t>& primes);

// Exact comparisons against rational powers of nonnegative rationals.
// exponent = p/q with q > 0, p >= 0; x, base >= 0.
bool le_power(const Ratio& x, const Ratio& base, const Ratio& exponent);
bool lt_power(const Ratio& x, const Ratio& base, const Ratio& exponent);

// B <= 2^(sigma*k), decided as B^den(sigma) <= 2^(k*num(sigma)).
bool le_pow2_sigma(const BigInt& B, long k, const Ratio& sigma);

// Rational lower bound L with L <= base^(p/q) < L + 2^-bits, base >= 0.
Ratio power_lower(const Ratio& base, const Ratio& exponent, long bits = 64);

} // namespace klab

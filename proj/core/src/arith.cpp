#include "klab/arith.hpp"

#include "klab/errors.hpp"

#include <limits>

namespace klab {

std::vector<std::int64_t> prime_factors(std::int64_t n) {
    if (n < 1) throw ValidityError("prime_factors: n must be positive");
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

void ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& g, std::int64_t& x, std::int64_t& y) {
    std::int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        std::int64_t q = a / b;
        std::int64_t t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
        t = y0 - q * y1; y0 = y1; y1 = t;
    }
    g = a;
    x = x0;
    y = y0;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
    if (m == 1) return 0;
    std::int64_t g, x, y;
    ext_gcd(floor_mod(a, m), m, g, x, y);
    if (g != 1) throw ValidityError("mod_inverse: arguments not coprime");
    return floor_mod(x, m);
}

std::int64_t to_i64(const BigInt& v) {
    if (!mpz_fits_slong_p(v.get_mpz_t()))
        throw ValidityError("integer " + v.get_str() + " does not fit in 64 bits");
    return v.get_si();
}

BigInt ipow(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

BigInt isqrt(const BigInt& v) {
    if (v < 0) throw ValidityError("isqrt of negative value");
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
    return r;
}

long bit_length(const BigInt& v) {
    if (v <= 0) return 0;
    return static_cast<long>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

SquarefreeDivisors squarefree_divisors(const std::vector<std::int64_t>& primes) {
    std::size_t n = std::size_t{1} << primes.size();
    SquarefreeDivisors out;
    out.value.assign(n, 1);
    out.mu.assign(n, 1);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t low = i & (~i + 1);
        std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(low));
        out.value[i] = out.value[i ^ low] * primes[bit];
        out.mu[i] = -out.mu[i ^ low];
    }
    return out;
}

namespace {

void split_exponent(const Ratio& exponent, unsigned long& p, unsigned long& q) {
    if (exponent.sign() < 0) throw ValidityError("negative exponent in power comparison");
    if (!exponent.num().fits_ulong_p() || !exponent.den().fits_ulong_p())
        throw ValidityError("exponent too large");
    p = exponent.num().get_ui();
    q = exponent.den().get_ui();
}

} // namespace

bool le_power(const Ratio& x, const Ratio& base, const Ratio& exponent) {
    unsigned long p, q;
    split_exponent(exponent, p, q);
    if (x.sign() <= 0) return true;
    return pow(x, q) <= pow(base, p);
}

bool lt_power(const Ratio& x, const Ratio& base, const Ratio& exponent) {
    unsigned long p, q;
    split_exponent(exponent, p, q);
    if (x.sign() < 0) return true;
    if (x.is_zero()) return pow(base, p).sign() > 0;
    return pow(x, q) < pow(base, p);
}

bool le_pow2_sigma(const BigInt& B, long k, const Ratio& sigma) {
    unsigned long p, q;
    split_exponent(sigma, p, q);
    BigInt lhs = ipow(B, q);
    BigInt rhs;
    mpz_ui_pow_ui(rhs.get_mpz_t(), 2, static_cast<unsigned long>(k) * p);
    return lhs <= rhs;
}

Ratio power_lower(const Ratio& base, const Ratio& exponent, long bits) {
    unsigned long p, q;
    split_exponent(exponent, p, q);
    // floor((base^p * 2^(bits*q))^(1/q)) / 2^bits
    Ratio bp = pow(base, p);
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(bits) * q);
    BigInt inner = (bp * Ratio(scale)).floor();
    BigInt root;
    mpz_root(root.get_mpz_t(), inner.get_mpz_t(), q);
    return Ratio(root) * pow2(-bits);
}

} // namespace klab

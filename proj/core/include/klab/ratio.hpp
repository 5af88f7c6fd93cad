#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace klab {

using BigInt = mpz_class;

// Exact rational number, always in lowest terms with a positive denominator.
class Ratio {
public:
    Ratio() = default;
    Ratio(int v) : v_(v) {}
    Ratio(long v) : v_(v) {}
    Ratio(long long v) : v_(static_cast<long>(v)) { static_assert(sizeof(long) == 8); }
    Ratio(const BigInt& n) : v_(n) {}
    Ratio(const BigInt& n, const BigInt& d);
    explicit Ratio(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    // Accepts "p", "p/q", optional leading sign, surrounding blanks ignored.
    static Ratio parse(std::string_view text);

    const BigInt& num() const { return v_.get_num(); }
    const BigInt& den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    BigInt floor() const;
    BigInt ceil() const;
    Ratio abs() const { return Ratio(mpq_class(::abs(v_))); }
    Ratio frac() const { return *this - Ratio(floor()); }

    // Always "p/q", including "/1", so every exact field has one shape.
    std::string to_string() const;
    // Round-to-nearest (ties to even) with `digits` significant digits,
    // formatted like printf's %g.
    std::string to_decimal(int digits = 12) const;
    double to_double() const { return v_.get_d(); }

    Ratio& operator+=(const Ratio& o) { v_ += o.v_; return *this; }
    Ratio& operator-=(const Ratio& o) { v_ -= o.v_; return *this; }
    Ratio& operator*=(const Ratio& o) { v_ *= o.v_; return *this; }
    Ratio& operator/=(const Ratio& o);

    friend Ratio operator+(Ratio a, const Ratio& b) { return a += b; }
    friend Ratio operator-(Ratio a, const Ratio& b) { return a -= b; }
    friend Ratio operator*(Ratio a, const Ratio& b) { return a *= b; }
    friend Ratio operator/(Ratio a, const Ratio& b) { return a /= b; }
    friend Ratio operator-(const Ratio& a) { return Ratio(mpq_class(-a.v_)); }

    friend bool operator==(const Ratio& a, const Ratio& b) { return cmp(a.v_, b.v_) == 0; }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Ratio& r);

// 2^e for any integer e.
Ratio pow2(long e);
Ratio pow(const Ratio& base, unsigned long e);
Ratio min(const Ratio& a, const Ratio& b);
Ratio max(const Ratio& a, const Ratio& b);

struct Vec2Q {
    Ratio x;
    Ratio y;

    const Ratio& operator[](int i) const { return i == 0 ? x : y; }
    Ratio& operator[](int i) { return i == 0 ? x : y; }

    friend Vec2Q operator+(const Vec2Q& a, const Vec2Q& b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2Q operator-(const Vec2Q& a, const Vec2Q& b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2Q operator*(const Ratio& s, const Vec2Q& v) { return {s * v.x, s * v.y}; }
    friend bool operator==(const Vec2Q& a, const Vec2Q& b) { return a.x == b.x && a.y == b.y; }
};

// Distance to the nearest integer; in [0, 1/2].
Ratio torus_dist(const Ratio& x);
// Max-norm distance to the nearest integer vector.
Ratio torus_norm(const Vec2Q& v);
// Componentwise reduction into [0,1)^2.
Vec2Q mod1(const Vec2Q& v);
// Max-norm absolute value (no reduction mod 1).
Ratio max_abs(const Vec2Q& v);

} // namespace klab

#include "klab/ratio.hpp"

#include "klab/errors.hpp"

#include <cctype>
#include <ostream>

namespace klab {

namespace {

BigInt pow10(unsigned long e) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

// Round n/d to the nearest integer, ties to even. n, d > 0.
BigInt round_half_even(const BigInt& n, const BigInt& d) {
    BigInt q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    BigInt twice = 2 * r;
    int c = cmp(twice, d);
    if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t())))
        q += 1;
    return q;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_int(std::string_view s, BigInt& out) {
    s = trim(s);
    if (s.empty()) return false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') i = 1;
    if (i == s.size()) return false;
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    std::string buf(s[0] == '+' ? s.substr(1) : s);
    return out.set_str(buf, 10) == 0;
}

} // namespace

Ratio::Ratio(const BigInt& n, const BigInt& d) {
    if (d == 0) throw ValidityError("Ratio: zero denominator");
    v_ = mpq_class(n, d);
    v_.canonicalize();
}

Ratio Ratio::parse(std::string_view text) {
    std::string_view s = trim(text);
    auto slash = s.find('/');
    BigInt n, d = 1;
    bool ok = slash == std::string_view::npos
        ? parse_int(s, n)
        : parse_int(s.substr(0, slash), n) && parse_int(s.substr(slash + 1), d);
    if (!ok) throw ValidityError("cannot parse rational '" + std::string(text) + "'");
    return Ratio(n, d);
}

Ratio& Ratio::operator/=(const Ratio& o) {
    if (o.is_zero()) throw ValidityError("Ratio: division by zero");
    v_ /= o.v_;
    return *this;
}

BigInt Ratio::floor() const {
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
    return r;
}

BigInt Ratio::ceil() const {
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
    return r;
}

std::string Ratio::to_string() const {
    return num().get_str() + "/" + den().get_str();
}

std::string Ratio::to_decimal(int digits) const {
    if (digits < 1) digits = 1;
    if (is_zero()) return "0";
    BigInt n = ::abs(num());
    const BigInt& d = den();

    // Find e with 10^e <= n/d < 10^(e+1).
    long e = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 10));
    auto at_least = [&](long p) {  // n/d >= 10^p
        return p >= 0 ? cmp(n, d * pow10(p)) >= 0 : cmp(n * pow10(-p), d) >= 0;
    };
    while (!at_least(e)) --e;
    while (at_least(e + 1)) ++e;

    long shift = digits - 1 - e;
    BigInt mant = shift >= 0 ? round_half_even(n * pow10(shift), d)
                             : round_half_even(n, d * pow10(-shift));
    if (mant == pow10(digits)) {
        mant /= 10;
        ++e;
    }
    std::string m = mant.get_str();  // exactly `digits` characters

    std::string out = sign() < 0 ? "-" : "";
    auto strip = [](std::string s) {
        if (s.find('.') == std::string::npos) return s;
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    if (e < -4 || e >= digits) {
        std::string body = strip(m.substr(0, 1) + "." + m.substr(1));
        std::string ex = std::to_string(e < 0 ? -e : e);
        if (ex.size() < 2) ex = "0" + ex;
        out += body + (e < 0 ? "e-" : "e+") + ex;
    } else if (e >= 0) {
        std::string body = m.substr(0, e + 1) + "." + m.substr(e + 1);
        out += strip(body);
    } else {
        out += strip("0." + std::string(-e - 1, '0') + m);
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const Ratio& r) {
    return os << r.to_string();
}

Ratio pow2(long e) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
    return e >= 0 ? Ratio(p) : Ratio(BigInt(1), p);
}

Ratio pow(const Ratio& base, unsigned long e) {
    BigInt n, d;
    mpz_pow_ui(n.get_mpz_t(), base.num().get_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), base.den().get_mpz_t(), e);
    return Ratio(n, d);
}

Ratio min(const Ratio& a, const Ratio& b) { return b < a ? b : a; }
Ratio max(const Ratio& a, const Ratio& b) { return a < b ? b : a; }

Ratio torus_dist(const Ratio& x) {
    Ratio f = x.frac();
    Ratio g = Ratio(1) - f;
    return min(f, g);
}

Ratio torus_norm(const Vec2Q& v) {
    return max(torus_dist(v.x), torus_dist(v.y));
}

Vec2Q mod1(const Vec2Q& v) {
    return {v.x.frac(), v.y.frac()};
}

Ratio max_abs(const Vec2Q& v) {
    return max(v.x.abs(), v.y.abs());
}

} // namespace klab

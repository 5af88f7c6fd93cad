#include "klab/surrogate.hpp"

#include "klab/arith.hpp"
#include "klab/errors.hpp"

#include <limits>
#include <sstream>

namespace klab {

namespace {

constexpr int kMaxDepth = 100000;

BigInt fourth_power(std::int64_t v) {
    return ipow(BigInt(static_cast<long>(v)), 4);
}

struct Convergent {
    BigInt p, q;
};

// Convergents p_0/q_0 ... p_depth/q_depth.
std::vector<Convergent> convergents(const std::vector<std::int64_t>& cf, int depth) {
    auto a = expand_cf(cf, static_cast<std::size_t>(depth) + 1);
    std::vector<Convergent> out;
    BigInt pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
    for (int i = 0; i <= depth; ++i) {
        BigInt ai = static_cast<long>(a[static_cast<std::size_t>(i)]);
        BigInt p = ai * pm1 + pm2;
        BigInt q = ai * qm1 + qm2;
        out.push_back({p, q});
        pm2 = pm1; pm1 = p;
        qm2 = qm1; qm1 = q;
    }
    return out;
}

void check_cf(const std::vector<std::int64_t>& cf) {
    if (cf.empty()) throw ValidityError("continued fraction needs at least one coefficient");
    for (std::size_t i = 1; i < cf.size(); ++i)
        if (cf[i] <= 0) throw ValidityError("continued fraction coefficients beyond the first must be positive");
}

std::string cf_text(const std::vector<std::int64_t>& cf) {
    std::ostringstream os;
    os << "[" << cf[0];
    for (std::size_t i = 1; i < cf.size(); ++i) os << (i == 1 ? ";" : ",") << cf[i];
    if (cf.size() > 1) os << ",...";
    os << "]";
    return os.str();
}

Ratio quadratic_component(const std::vector<std::int64_t>& cf, int depth, std::int64_t validity,
                          std::string& tail) {
    if (depth < 0) throw ValidityError("depth must be nonnegative");
    check_cf(cf);
    if (depth > kMaxDepth) throw ValidityError("depth too large");
    auto conv = convergents(cf, depth + 1);
    const auto& c = conv[static_cast<std::size_t>(depth)];
    if (!(c.q > fourth_power(validity))) {
        int need = min_quadratic_depth(cf, validity);
        throw ValidityError("surrogate_quadratic: depth " + std::to_string(depth) +
                            " gives denominator " + c.q.get_str() + " <= validity^4; minimum depth is " +
                            std::to_string(need));
    }
    if (cf.size() > 1) {
        const auto& next = conv[static_cast<std::size_t>(depth) + 1];
        tail = "|x - p/q| < 1/(q*q') with q' = " + next.q.get_str();
    } else {
        tail = "exact";
    }
    return Ratio(c.p, c.q);
}

} // namespace

void IrrationalSurrogate::require_within(std::string_view what, std::int64_t n) const {
    if (n > validity)
        throw ValidityError(std::string(what) + " = " + std::to_string(n) +
                            " exceeds the surrogate validity bound " + std::to_string(validity) +
                            " (" + family + ")");
}

void IrrationalSurrogate::require_within(std::string_view what, const BigInt& n) const {
    if (n > BigInt(static_cast<long>(validity)))
        throw ValidityError(std::string(what) + " = " + n.get_str() +
                            " exceeds the surrogate validity bound " + std::to_string(validity) +
                            " (" + family + ")");
}

std::vector<std::int64_t> expand_cf(const std::vector<std::int64_t>& cf, std::size_t length) {
    check_cf(cf);
    std::vector<std::int64_t> out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        if (i < cf.size()) {
            out.push_back(cf[i]);
        } else {
            if (cf.size() == 1) throw ValidityError("continued fraction has no periodic tail to extend");
            std::size_t period = cf.size() - 1;
            out.push_back(cf[1 + (i - 1) % period]);
        }
    }
    return out;
}

int min_quadratic_depth(const std::vector<std::int64_t>& cf, std::int64_t validity) {
    check_cf(cf);
    BigInt bound = fourth_power(validity);
    BigInt qm2 = 1, qm1 = 0;
    for (int i = 0; i <= kMaxDepth; ++i) {
        if (i >= static_cast<int>(cf.size()) && cf.size() == 1) break;
        auto a = expand_cf(cf, static_cast<std::size_t>(i) + 1).back();
        BigInt q = BigInt(static_cast<long>(a)) * qm1 + qm2;
        if (q > bound) return i;
        qm2 = qm1;
        qm1 = q;
    }
    throw ValidityError("continued fraction cannot reach the requested validity");
}

IrrationalSurrogate surrogate_quadratic(const std::vector<std::int64_t>& cf, int depth,
                                        std::int64_t validity) {
    if (validity < 1) throw ValidityError("validity must be positive");
    std::string tail;
    Ratio v = quadratic_component(cf, depth, validity, tail);
    IrrationalSurrogate s;
    s.value = {v, v};
    s.validity = validity;
    s.family = "quadratic";
    s.description = "diagonal convergent of " + cf_text(cf) + " at depth " + std::to_string(depth) +
                    "; " + tail;
    return s;
}

IrrationalSurrogate surrogate_quadratic_pair(const std::vector<std::int64_t>& cf_x,
                                             const std::vector<std::int64_t>& cf_y,
                                             std::int64_t validity) {
    if (validity < 1) throw ValidityError("validity must be positive");
    int dx = min_quadratic_depth(cf_x, validity);
    int dy = min_quadratic_depth(cf_y, validity);
    std::string tx, ty;
    IrrationalSurrogate s;
    s.value = {quadratic_component(cf_x, dx, validity, tx), quadratic_component(cf_y, dy, validity, ty)};
    s.validity = validity;
    s.family = "quadratic-pair";
    s.description = "convergents of " + cf_text(cf_x) + " (depth " + std::to_string(dx) + "; " + tx +
                    ") and " + cf_text(cf_y) + " (depth " + std::to_string(dy) + "; " + ty + ")";
    return s;
}

IrrationalSurrogate surrogate_liouville(std::int64_t base, int terms,
                                        std::array<std::int64_t, 2> offsets,
                                        std::int64_t validity) {
    if (base < 2) throw ValidityError("surrogate_liouville: base must be at least 2");
    if (terms < 3) throw ValidityError("surrogate_liouville: at least 3 terms required");
    if (terms > 7) throw ValidityError("surrogate_liouville: more than 7 terms is not supported");
    if (validity < 1) throw ValidityError("validity must be positive");
    if (offsets[0] < 0 || offsets[1] < 0) throw ValidityError("surrogate_liouville: offsets must be nonnegative");
    unsigned long fact = 1;
    for (int n = 2; n <= terms; ++n) fact *= static_cast<unsigned long>(n);
    BigInt b = static_cast<long>(base);
    if (!(ipow(b, fact) > fourth_power(validity)))
        throw ValidityError("surrogate_liouville: base^(terms!) = " + std::to_string(base) + "^" +
                            std::to_string(fact) + " does not exceed validity^4");
    IrrationalSurrogate s;
    for (int i = 0; i < 2; ++i) {
        Ratio sum;
        unsigned long f = 1;
        for (int n = 1; n <= terms; ++n) {
            f *= static_cast<unsigned long>(n);
            BigInt den = ipow(b, f + static_cast<unsigned long>(offsets[static_cast<std::size_t>(i)]));
            sum += Ratio(BigInt(1), den);
        }
        s.value[i] = sum;
    }
    s.validity = validity;
    s.family = "liouville";
    unsigned long next = fact * static_cast<unsigned long>(terms + 1);
    s.description = "Liouville partial sums base " + std::to_string(base) + ", " + std::to_string(terms) +
                    " terms, offsets (" + std::to_string(offsets[0]) + "," + std::to_string(offsets[1]) +
                    "); tail < 2*" + std::to_string(base) + "^-" + std::to_string(next);
    return s;
}

IrrationalSurrogate surrogate_rational(const Vec2Q& value, std::string label) {
    IrrationalSurrogate s;
    s.value = value;
    s.validity = std::numeric_limits<std::int64_t>::max();
    s.exact = true;
    s.family = "rational";
    s.description = std::move(label);
    return s;
}

IrrationalSurrogate surrogate_preset(std::string_view name, std::int64_t validity) {
    IrrationalSurrogate s;
    if (name == "quad-sqrt2") {
        s = surrogate_quadratic({0, 2}, min_quadratic_depth({0, 2}, validity), validity);
    } else if (name == "golden") {
        s = surrogate_quadratic({0, 1}, min_quadratic_depth({0, 1}, validity), validity);
    } else if (name == "quad-pair") {
        s = surrogate_quadratic_pair({0, 2}, {0, 1}, validity);
    } else if (name == "liouville") {
        s = surrogate_liouville(2, 6, {0, 1}, validity);
    } else if (name == "liouville-diag") {
        s = surrogate_liouville(2, 6, {0, 0}, validity);
    } else if (name == "zero") {
        s = surrogate_rational({Ratio(0), Ratio(0)}, "exact (0,0)");
    } else if (name.substr(0, 9) == "rational:") {
        auto body = name.substr(9);
        auto comma = body.find(',');
        if (comma == std::string_view::npos) throw ValidityError("rational preset needs 'rational:x,y'");
        Vec2Q v{Ratio::parse(body.substr(0, comma)), Ratio::parse(body.substr(comma + 1))};
        for (int i = 0; i < 2; ++i)
            if (v[i].abs() > Ratio(1 << 20)) throw ValidityError("rational preset components must be at most 2^20");
        s = surrogate_rational(v, "exact (" + v.x.to_string() + "," + v.y.to_string() + ")");
    } else {
        throw ValidityError("unknown surrogate family '" + std::string(name) + "'");
    }
    s.family = std::string(name);
    return s;
}

std::vector<std::string> surrogate_family_names() {
    return {"quad-sqrt2", "quad-pair", "golden", "liouville", "liouville-diag", "zero"};
}

} // namespace klab

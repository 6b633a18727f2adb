#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatsing {

using cplx = std::complex<double>;

inline constexpr int kDefaultOrder = 32;
// Leading coefficients below this magnitude are treated as zero when
// determining the valuation, so floating noise cannot create spurious poles.
inline constexpr double kCanonEps = 1e-14;

struct math_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated Laurent series with complex coefficients.
///
/// Coefficients are stored for exponents valuation()..order()-1; exponents
/// >= order() are unknown (not zero). The zero series has no coefficients
/// and reports valuation() == order(). Arithmetic never fabricates
/// precision: every result carries the order implied by its operands.
class LaurentSeries {
public:
    LaurentSeries() : val_(kDefaultOrder), order_(kDefaultOrder) {}

    LaurentSeries(int valuation, std::vector<cplx> coeffs, int order)
        : val_(valuation), order_(order), c_(std::move(coeffs)) {
        canonicalize();
    }

    static LaurentSeries zero(int order = kDefaultOrder) {
        return LaurentSeries(order, {}, order);
    }

    static LaurentSeries constant(cplx value, int order = kDefaultOrder) {
        return LaurentSeries(0, {value}, order);
    }

    static LaurentSeries monomial(int exponent, cplx coeff = 1.0,
                                  int order = kDefaultOrder) {
        return LaurentSeries(exponent, {coeff}, order);
    }

    /// The identity series z.
    static LaurentSeries identity(int order = kDefaultOrder) {
        return monomial(1, 1.0, order);
    }

    bool is_zero() const { return c_.empty(); }
    int valuation() const { return val_; }
    int order() const { return order_; }

    /// Coefficient of z^k (zero outside the stored window; exponents
    /// >= order() also report zero, callers must respect order()).
    cplx coeff(int k) const {
        if (k < val_ || k >= val_ + static_cast<int>(c_.size())) return 0.0;
        return c_[static_cast<size_t>(k - val_)];
    }

    const std::vector<cplx>& coeffs() const { return c_; }

    /// Horner evaluation of the truncated series at w (w != 0 if there
    /// are negative exponents).
    cplx eval(cplx w) const {
        if (c_.empty()) return 0.0;
        cplx acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * w + *it;
        return acc * std::pow(w, cplx(val_));
    }

    /// Long-double Horner evaluation; used by finite-difference stencils
    /// where double rounding in the evaluation would dominate the result.
    std::complex<long double> eval_ld(std::complex<long double> w) const {
        if (c_.empty()) return 0.0L;
        std::complex<long double> acc = 0.0L;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * w + std::complex<long double>(it->real(), it->imag());
        std::complex<long double> p = 1.0L;
        int e = val_;
        std::complex<long double> base = (e < 0) ? 1.0L / w : w;
        for (int i = 0; i < std::abs(e); ++i) p *= base;
        return acc * p;
    }

private:
    void canonicalize() {
        if (order_ < val_ + static_cast<int>(c_.size()))
            c_.resize(static_cast<size_t>(std::max(0, order_ - val_)));
        size_t lead = 0;
        while (lead < c_.size() && std::abs(c_[lead]) < kCanonEps) ++lead;
        if (lead > 0) {
            c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
            val_ += static_cast<int>(lead);
        }
        while (!c_.empty() && std::abs(c_.back()) < kCanonEps &&
               val_ + static_cast<int>(c_.size()) > order_)
            c_.pop_back();
        if (c_.empty()) val_ = order_;
    }

    int val_;
    int order_;
    std::vector<cplx> c_;
};

inline LaurentSeries truncated(const LaurentSeries& s, int order) {
    if (order >= s.order()) return s;
    std::vector<cplx> c;
    for (int k = s.valuation(); k < std::min(order, s.order()); ++k)
        c.push_back(s.coeff(k));
    return LaurentSeries(std::min(s.valuation(), order), std::move(c), order);
}

/// Multiply by z^m.
inline LaurentSeries shifted(const LaurentSeries& s, int m) {
    return LaurentSeries(s.valuation() + m, s.coeffs(), s.order() + m);
}

inline LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    int order = std::min(a.order(), b.order());
    int lo = std::min(a.valuation(), b.valuation());
    if (lo >= order) return LaurentSeries::zero(order);
    std::vector<cplx> c(static_cast<size_t>(order - lo));
    for (int k = lo; k < order; ++k)
        c[static_cast<size_t>(k - lo)] = a.coeff(k) + b.coeff(k);
    return LaurentSeries(lo, std::move(c), order);
}

inline LaurentSeries operator-(const LaurentSeries& s) {
    std::vector<cplx> c = s.coeffs();
    for (auto& x : c) x = -x;
    return LaurentSeries(s.valuation(), std::move(c), s.order());
}

inline LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) {
    return a + (-b);
}

inline LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    // Unknown tails enter the product at exponent val(a)+order(b) and
    // val(b)+order(a), whichever is lower.
    int order = std::min(a.valuation() + b.order(), b.valuation() + a.order());
    if (a.is_zero() || b.is_zero()) return LaurentSeries::zero(order);
    int lo = a.valuation() + b.valuation();
    if (lo >= order) return LaurentSeries::zero(order);
    std::vector<cplx> c(static_cast<size_t>(order - lo), 0.0);
    int na = static_cast<int>(a.coeffs().size());
    int nb = static_cast<int>(b.coeffs().size());
    for (int i = 0; i < na; ++i) {
        cplx ai = a.coeffs()[static_cast<size_t>(i)];
        if (ai == 0.0) continue;
        for (int j = 0; j < nb; ++j) {
            int k = a.valuation() + i + b.valuation() + j;
            if (k >= order) break;
            c[static_cast<size_t>(k - lo)] += ai * b.coeffs()[static_cast<size_t>(j)];
        }
    }
    return LaurentSeries(lo, std::move(c), order);
}

inline LaurentSeries operator*(const LaurentSeries& a, cplx scalar) {
    std::vector<cplx> c = a.coeffs();
    for (auto& x : c) x *= scalar;
    return LaurentSeries(a.valuation(), std::move(c), a.order());
}

inline LaurentSeries operator*(cplx scalar, const LaurentSeries& a) {
    return a * scalar;
}

/// Multiplicative inverse. The order drops by 2*val(b): the reciprocal of
/// a series known through order ob with valuation vb is known through
/// ob - 2*vb.
inline LaurentSeries inverse(const LaurentSeries& b) {
    if (b.is_zero()) throw math_error("zero divisor");
    int vb = b.valuation();
    int rel = std::max(b.order() - vb, 1);  // relative order of the unit part
    cplx b0 = b.coeffs()[0];
    std::vector<cplx> inv(static_cast<size_t>(rel), 0.0);
    inv[0] = 1.0 / b0;
    for (int m = 1; m < rel; ++m) {
        cplx acc = 0.0;
        for (int j = 1; j <= m; ++j)
            acc += b.coeff(vb + j) * inv[static_cast<size_t>(m - j)];
        inv[static_cast<size_t>(m)] = -acc / b0;
    }
    return LaurentSeries(-vb, std::move(inv), -vb + rel);
}

inline LaurentSeries operator/(const LaurentSeries& a, const LaurentSeries& b) {
    return a * inverse(b);
}

/// Termwise derivative; the truncation order drops by one.
inline LaurentSeries derivative(const LaurentSeries& s) {
    std::vector<cplx> c;
    int lo = s.valuation() - 1;
    for (int k = s.valuation(); k < s.valuation() + static_cast<int>(s.coeffs().size()); ++k)
        c.push_back(static_cast<double>(k) * s.coeff(k));
    return LaurentSeries(lo, std::move(c), s.order() - 1);
}

/// outer(inner(z)). Requires val(outer) >= 0 and val(inner) >= 1.
inline LaurentSeries compose(const LaurentSeries& outer, const LaurentSeries& inner) {
    if (!inner.is_zero() && inner.valuation() < 1)
        throw math_error("composition requires positive valuation");
    if (!outer.is_zero() && outer.valuation() < 0)
        throw math_error("composition requires non-negative outer valuation");
    int vi = inner.is_zero() ? inner.order() : inner.valuation();
    if (vi < 1) vi = 1;
    int order = std::min(outer.order() * vi, inner.order());
    LaurentSeries acc = LaurentSeries::zero(order);
    for (int k = std::min(outer.order(), (order + vi - 1) / vi) - 1; k >= 0; --k) {
        acc = truncated(acc * inner, order);
        cplx ck = outer.coeff(k);
        if (ck != 0.0) acc = acc + LaurentSeries::constant(ck, order);
    }
    return acc;
}

/// exp of a series with val >= 0, via the recurrence E' = s'E.
inline LaurentSeries exp(const LaurentSeries& s) {
    if (!s.is_zero() && s.valuation() < 0)
        throw math_error("essential exponential");
    int order = s.order();
    if (order <= 0) return LaurentSeries::zero(order);
    cplx s0 = s.coeff(0);
    int rel = order;
    std::vector<cplx> e(static_cast<size_t>(rel), 0.0);
    e[0] = std::exp(s0);
    for (int m = 1; m < rel; ++m) {
        cplx acc = 0.0;
        for (int k = 1; k <= m; ++k)
            acc += static_cast<double>(k) * s.coeff(k) * e[static_cast<size_t>(m - k)];
        e[static_cast<size_t>(m)] = acc / static_cast<double>(m);
    }
    return LaurentSeries(0, std::move(e), order);
}

/// log of a unit series (val == 0, s(0) != 0). The constant term is the
/// principal log of s(0) shifted by 2*pi*i*branch.
inline LaurentSeries log_unit(const LaurentSeries& s, int branch = 0) {
    if (s.is_zero() || s.valuation() != 0)
        throw math_error("log of non-unit");
    cplx s0 = s.coeff(0);
    int order = s.order();
    std::vector<cplx> l(static_cast<size_t>(std::max(order, 1)), 0.0);
    constexpr double two_pi = 6.283185307179586476925286766559;
    l[0] = std::log(s0) + cplx(0.0, two_pi * branch);
    // t = s/s0 - 1; L_m = t_m - (1/m) sum k L_k t_{m-k}
    for (int m = 1; m < order; ++m) {
        cplx tm = s.coeff(m) / s0;
        cplx acc = 0.0;
        for (int k = 1; k < m; ++k)
            acc += static_cast<double>(k) * l[static_cast<size_t>(k)] * (s.coeff(m - k) / s0);
        l[static_cast<size_t>(m)] = tm - acc / static_cast<double>(m);
    }
    return LaurentSeries(0, std::move(l), std::max(order, 1));
}

/// s^gamma for a unit series, as exp(gamma * log_unit(s, branch)).
inline LaurentSeries pow_real(const LaurentSeries& s, double gamma, int branch = 0) {
    return exp(log_unit(s, branch) * cplx(gamma));
}

/// Max absolute coefficient difference over the jointly known exponent
/// range, optionally capped at compare_order.
inline double max_coeff_diff(const LaurentSeries& a, const LaurentSeries& b,
                             int compare_order = std::numeric_limits<int>::max()) {
    int hi = std::min({a.order(), b.order(), compare_order});
    int lo = std::min(a.valuation(), b.valuation());
    double d = 0.0;
    for (int k = lo; k < hi; ++k) d = std::max(d, std::abs(a.coeff(k) - b.coeff(k)));
    return d;
}

inline double max_coeff_abs(const LaurentSeries& s) {
    double m = 0.0;
    for (const auto& c : s.coeffs()) m = std::max(m, std::abs(c));
    return m;
}

/// Relative coefficientwise comparison (default relative 1e-9, absolute 1e-12).
inline bool approx_equal(const LaurentSeries& a, const LaurentSeries& b,
                         double rtol = 1e-9, double atol = 1e-12) {
    double scale = std::max(max_coeff_abs(a), max_coeff_abs(b));
    return max_coeff_diff(a, b) <= atol + rtol * scale;
}

}  // namespace flatsing

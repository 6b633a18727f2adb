#pragma once

#include <cmath>

#include "flatsing/classify.hpp"
#include "flatsing/series.hpp"

namespace flatsing {

/// The four families of origin-preserving coordinate changes that keep a
/// normal form:
///   M1_generic  rotations z -> lambda z (conical, beta > -1 or non-integer)
///   M1_integer  h = (zeta0 z^{-(beta+1)} + lambda1)^{1/(beta+1)}
///               (conical, integer beta < -1)
///   M2          scalars z -> p z (cylindrical)
///   M3          h(0) = e_k an n-th root of unity, the order-n coefficient
///               free (log-pole)
enum class Family { M1Generic, M1Integer, M2, M3 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::M1Generic: return "M1_generic";
        case Family::M1Integer: return "M1_integer";
        case Family::M2: return "M2";
        case Family::M3: return "M3";
    }
    return "?";
}

struct SymmetryElement {
    Family family = Family::M1Generic;
    cplx lambda = 1.0;  // M1_generic rotation / M1_integer lambda1, |lambda| = 1
    cplx zeta = 0.0;    // M1_integer zeta0
    cplx p = 1.0;       // M2 scalar, nonzero
    int ek_index = 0;   // M3: h(0) = e^{2 pi i k / n}, 0 <= k < n
    cplx a = 0.0;       // M3 free coefficient at order n
};

namespace detail {
constexpr double kTwoPiSym = 6.283185307179586476925286766559;

inline bool is_negative_integer_beta(double beta) {
    return beta < -1.0 && std::abs(beta - std::round(beta)) < 1e-9;
}

inline void check_compat(const SymmetryElement& g, const NormalForm& form) {
    switch (g.family) {
        case Family::M1Generic:
            if (form.tag != FormTag::Conical)
                throw math_error("M1 element requires a conical form");
            if (std::abs(std::abs(g.lambda) - 1.0) > 1e-9)
                throw math_error("M1 rotation must be unimodular");
            return;
        case Family::M1Integer:
            if (form.tag != FormTag::Conical || !is_negative_integer_beta(form.beta))
                throw math_error("M1_integer element requires integer beta < -1");
            if (std::abs(std::abs(g.lambda) - 1.0) > 1e-9)
                throw math_error("M1_integer lambda must be unimodular");
            return;
        case Family::M2:
            if (form.tag != FormTag::Cylindrical)
                throw math_error("M2 element requires a cylindrical form");
            if (std::abs(g.p) == 0.0) throw math_error("M2 scalar must be nonzero");
            return;
        case Family::M3:
            if (form.tag != FormTag::LogPole)
                throw math_error("M3 element requires a log-pole form");
            if (g.ek_index < 0 || g.ek_index >= form.n)
                throw math_error("M3 root index out of range");
            return;
    }
}
}  // namespace detail

inline cplx root_of_unity(int k, int n) {
    return std::exp(cplx(0.0, detail::kTwoPiSym * k / n));
}

struct M3Change {
    LaurentSeries h;
    cplx zeta0;  // the additive constant realized by this element
};

/// Solve nu*log(h) + (z h)^{-n} = z^{-n} + zeta0 by coefficient recursion
/// with h(0) = e_k and the order-n coefficient fixed to the free value a.
/// zeta0 is an output of the recursion, not an input.
inline M3Change m3_change(const NormalForm& form, int ek_index, cplx a,
                          int order = kDefaultOrder) {
    int n = form.n;
    double nu = form.nu;
    cplx ek = root_of_unity(ek_index, n);
    // Multiplied by z^n the equation reads
    //   (h^{-n} - 1) + nu z^n log(h) = zeta0 z^n,
    // whose order-m coefficient carries h_m with factor -n/e_k.
    LaurentSeries h = LaurentSeries::constant(ek, order);
    cplx zeta0 = 0.0;
    for (int m = 1; m < order; ++m) {
        if (m == n) {
            h = h + LaurentSeries::monomial(n, a, order);
        }
        LaurentSeries lhs = pow_real(h, -static_cast<double>(n)) -
                            LaurentSeries::constant(1.0, order);
        lhs = lhs + shifted(log_unit(h) * cplx(nu), n);
        if (m == n) {
            zeta0 = lhs.coeff(n);
            continue;
        }
        cplx rho = lhs.coeff(m);  // computed with h_m = 0
        cplx hm = rho * ek / static_cast<double>(n);
        if (std::abs(hm) > kCanonEps)
            h = h + LaurentSeries::monomial(m, hm, order);
    }
    return M3Change{h, zeta0};
}

/// Max coefficient magnitude of nu*log(h) + (zh)^{-n} - z^{-n} - zeta0.
inline double m3_equation_residual(const NormalForm& form, const M3Change& mc) {
    int n = form.n;
    // (zh)^{-n} = z^{-n} h^{-n}
    LaurentSeries res = log_unit(mc.h) * cplx(form.nu) +
                        shifted(pow_real(mc.h, -static_cast<double>(n)), -n) -
                        LaurentSeries::monomial(-n, 1.0) -
                        LaurentSeries::constant(mc.zeta0);
    return max_coeff_abs(res);
}

/// Realize a symmetry element as a coordinate change series.
inline CoordinateChange element_to_change(const SymmetryElement& g, const NormalForm& form,
                                          int order = kDefaultOrder) {
    detail::check_compat(g, form);
    switch (g.family) {
        case Family::M1Generic:
            return CoordinateChange{LaurentSeries::constant(g.lambda, order), std::nullopt};
        case Family::M1Integer: {
            int m = -static_cast<int>(std::round(form.beta)) - 1;  // -(beta+1) >= 1
            LaurentSeries base = LaurentSeries::monomial(m, g.zeta, order) +
                                 LaurentSeries::constant(g.lambda, order);
            return CoordinateChange{pow_real(base, 1.0 / (form.beta + 1.0)), std::nullopt};
        }
        case Family::M2:
            return CoordinateChange{LaurentSeries::constant(g.p, order), std::nullopt};
        case Family::M3:
            return CoordinateChange{m3_change(form, g.ek_index, g.a, order).h, std::nullopt};
    }
    throw math_error("unreachable symmetry family");
}

inline SymmetryElement identity_element(Family family) {
    SymmetryElement g;
    g.family = family;
    return g;
}

inline SymmetryElement compose_elements(const SymmetryElement& g1, const SymmetryElement& g2,
                                        const NormalForm& form) {
    detail::check_compat(g1, form);
    detail::check_compat(g2, form);
    if (g1.family != g2.family) throw math_error("symmetry family mismatch");
    SymmetryElement out;
    out.family = g1.family;
    switch (g1.family) {
        case Family::M1Generic:
            out.lambda = g1.lambda * g2.lambda;
            break;
        case Family::M1Integer:
            out.lambda = g1.lambda * g2.lambda;
            out.zeta = g2.lambda * g1.zeta + g2.zeta;
            break;
        case Family::M2:
            out.p = g1.p * g2.p;
            break;
        case Family::M3:
            out.ek_index = (g1.ek_index + g2.ek_index) % form.n;
            out.a = root_of_unity(g1.ek_index, form.n) * g2.a +
                    root_of_unity(g2.ek_index, form.n) * g1.a;
            break;
    }
    return out;
}

inline SymmetryElement inverse_element(const SymmetryElement& g, const NormalForm& form) {
    detail::check_compat(g, form);
    SymmetryElement out;
    out.family = g.family;
    switch (g.family) {
        case Family::M1Generic:
            out.lambda = std::conj(g.lambda);
            break;
        case Family::M1Integer:
            // (lambda, zeta)^{-1} = (conj(lambda), -zeta*conj(lambda)),
            // from the law (l1,z1)x(l2,z2) = (l1 l2, l2 z1 + z2).
            out.lambda = std::conj(g.lambda);
            out.zeta = -g.zeta * std::conj(g.lambda);
            break;
        case Family::M2:
            out.p = 1.0 / g.p;
            break;
        case Family::M3: {
            out.ek_index = (form.n - g.ek_index) % form.n;
            cplx ek_inv = root_of_unity(out.ek_index, form.n);
            out.a = -g.a * ek_inv * ek_inv;
            break;
        }
    }
    return out;
}

/// Functional composition z -> z h1(z) -> (z h1) h2(z h1) against the
/// group law: max coefficient deviation up to the order where the law is
/// exact (all computed orders for M1/M2, order n for M3, whose law the
/// composition only pins at leading order).
inline double verify_composition(const SymmetryElement& g1, const SymmetryElement& g2,
                                 const NormalForm& form, int order = kDefaultOrder) {
    LaurentSeries h1 = element_to_change(g1, form, order).h;
    LaurentSeries h2 = element_to_change(g2, form, order).h;
    LaurentSeries combined = h1 * compose(h2, shifted(h1, 1));
    LaurentSeries law = element_to_change(compose_elements(g1, g2, form), form, order).h;
    if (g1.family == Family::M1Integer) {
        // h is only determined up to mu with mu^{beta+1} = 1; the principal
        // branch of the composed root can land on another sheet.
        cplx mu = combined.coeff(0) / law.coeff(0);
        if (std::abs(std::pow(mu, form.beta + 1.0) - 1.0) < 1e-9) law = law * mu;
    }
    int cap = (g1.family == Family::M3) ? form.n + 1 : order;
    return max_coeff_diff(combined, law, cap);
}

/// Pull the normal-form density back through the element's change and
/// compare with the original, up to global phase.
inline double verify_invariance(const NormalForm& form, const SymmetryElement& g,
                                int order = kDefaultOrder) {
    MetricDensity d = normal_form_density(form, order);
    CoordinateChange ch = element_to_change(g, form, order);
    MetricDensity pulled = apply_change(d, ch, order);
    return density_residual(d, pulled);
}

/// Right-hand side of the tail ODE z h~' = F~(z, h~) governing M3
/// elements, F~ = n(h~+e_k)(1 - (h~+e_k)^n) / (nu z^n (h~+e_k)^n - n).
/// Its linear part is n*h~; tests check both the coefficient structure
/// and that m3_change solves the ODE.
inline LaurentSeries m3_ode_rhs(const NormalForm& form, int ek_index,
                                const LaurentSeries& tail) {
    int n = form.n;
    cplx ek = root_of_unity(ek_index, n);
    int order = tail.order();
    LaurentSeries h = tail + LaurentSeries::constant(ek, order);
    LaurentSeries hn = pow_real(h, static_cast<double>(n));
    LaurentSeries num = cplx(static_cast<double>(n)) * h *
                        (LaurentSeries::constant(1.0, order) - hn);
    LaurentSeries den = shifted(hn, n) * cplx(form.nu) -
                        LaurentSeries::constant(static_cast<double>(n), order);
    return num / den;
}

}  // namespace flatsing

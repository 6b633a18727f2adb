#pragma once

#include <cmath>
#include <optional>

#include "flatsing/devmap.hpp"
#include "flatsing/series.hpp"

namespace flatsing {

enum class FormTag { Conical, Cylindrical, LogPole };

/// One of the three local normal forms:
///   Conical      (beta+1)^2 |z|^{2 beta} |dz|^2,  beta != -1
///   Cylindrical  c^2 |z|^{-2} |dz|^2,             c > 0
///   LogPole      |nu/z - n/z^{n+1}|^2 |dz|^2,     nu > 0, n >= 1
struct NormalForm {
    FormTag tag = FormTag::Conical;
    double beta = 0.0;  // Conical
    double c = 0.0;     // Cylindrical
    double nu = 0.0;    // LogPole
    int n = 0;          // LogPole
};

/// Origin-preserving coordinate change z_new = z * h(z), h(0) != 0.
/// eta is the free additive constant of the log-pole normalization.
struct CoordinateChange {
    LaurentSeries h = LaurentSeries::constant(1.0);
    std::optional<cplx> eta;
};

struct Classification {
    NormalForm form;
    CoordinateChange change;
};

inline MetricDensity normal_form_density(const NormalForm& form, int order = kDefaultOrder) {
    switch (form.tag) {
        case FormTag::Conical:
            return MetricDensity{form.beta, LaurentSeries::constant(form.beta + 1.0, order)};
        case FormTag::Cylindrical:
            return MetricDensity{-1.0, LaurentSeries::constant(form.c, order)};
        case FormTag::LogPole: {
            LaurentSeries G = LaurentSeries::constant(-static_cast<double>(form.n), order) +
                              LaurentSeries::monomial(form.n, form.nu, order);
            return MetricDensity{-static_cast<double>(form.n + 1), G};
        }
    }
    throw math_error("unreachable normal form tag");
}

/// Conical branch: write psi = w^n e^{g}, beta = alpha + n - 1, and
/// h = exp(g/(beta+1)) so that z = w*h(w) carries the metric to
/// (beta+1)^2 |z|^{2 beta} |dz|^2. The alpha = 0, val(psi) = 0 sub-case
/// first drops the constant term of psi (a Euclidean translation of the
/// developing image) and recurses.
struct ConicalChange {
    double beta;
    LaurentSeries h;
};

inline ConicalChange conical_change(const DevelopingMap& map, int order = kDefaultOrder) {
    map.validate();
    LaurentSeries psi = truncated(map.psi, std::min(map.psi.order(), order));
    if (map.alpha == 0.0) {
        if (std::abs(map.c) != 0.0)
            throw math_error("conical branch requires a vanishing log coefficient");
        if (psi.valuation() == 0)
            psi = psi - LaurentSeries::constant(psi.coeff(0), psi.order());
    }
    if (psi.is_zero()) throw math_error("degenerate developing map");
    int n = psi.valuation();
    double beta = map.alpha + n - 1;
    if (std::abs(beta + 1.0) < 1e-12)
        throw math_error("internal: beta = -1 in conical branch");
    LaurentSeries g = log_unit(shifted(psi, -n));
    return ConicalChange{beta, flatsing::exp(g * cplx(1.0 / (beta + 1.0)))};
}

/// Cylindrical branch: z = w * exp(psi/c); the invariant is |c|.
struct CylinderChange {
    double c;
    LaurentSeries h;
};

inline CylinderChange cylinder_change(const DevelopingMap& map, int order = kDefaultOrder) {
    map.validate();
    if (map.alpha != 0.0 || std::abs(map.c) == 0.0)
        throw math_error("cylindrical branch requires alpha = 0 and c != 0");
    LaurentSeries psi = truncated(map.psi, std::min(map.psi.order(), order));
    if (!psi.is_zero() && psi.valuation() < 0)
        throw math_error("cylindrical branch requires holomorphic psi");
    LaurentSeries arg =
        psi.is_zero() ? LaurentSeries::zero(order) : psi * cplx(1.0 / map.c);
    return CylinderChange{std::abs(map.c), flatsing::exp(truncated(arg, order))};
}

/// Log-pole branch: solve g(w) = e^{i theta} e^{-n phi} + w^n (c phi + eta)
/// for phi by coefficient matching, gauge-fixed by phi_n = 0. root_index
/// selects among the n log-branches of e^{-n phi(0)} = c0 e^{-i theta}.
struct ThirdFormChange {
    double nu;
    int n;
    LaurentSeries h;    // exp(phi)
    LaurentSeries phi;  // z = w * e^{phi(w)}
    cplx eta;
};

inline ThirdFormChange third_form_change(const DevelopingMap& map, int order = kDefaultOrder,
                                         int root_index = 0) {
    map.validate();
    if (map.alpha != 0.0 || std::abs(map.c) == 0.0)
        throw math_error("log-pole branch requires alpha = 0 and c != 0");
    LaurentSeries psi = map.psi;
    if (psi.is_zero() || psi.valuation() >= 0)
        throw math_error("log-pole branch requires a pole of psi");
    int n = -psi.valuation();
    if (order < 2 * n + 2) throw math_error("order too small for pole order");
    LaurentSeries g = truncated(shifted(psi, n), order);  // c0 + c1 w + ...
    cplx c0 = g.coeff(0);
    if (std::abs(c0) < kCanonEps) throw math_error("pole-order misdetection");
    double nu = std::abs(map.c);
    double theta = std::arg(map.c);
    constexpr double two_pi = 6.283185307179586476925286766559;

    // e^{i theta} e^{-n phi0} = c0
    cplx phi0 = -(std::log(c0 * std::exp(cplx(0.0, -theta))) + cplx(0.0, two_pi * root_index)) /
                static_cast<double>(n);

    // E = c0 * exp(u), u = -n (phi - phi0). Order m of the matching
    // equation reads g_m = E_m (+ c phi_{m-n} + [m==n] eta). E_m carries
    // the unknown phi_m with factor -n c0, everything else is known.
    std::vector<cplx> phi(static_cast<size_t>(order), 0.0);
    std::vector<cplx> u(static_cast<size_t>(order), 0.0);
    std::vector<cplx> E(static_cast<size_t>(order), 0.0);
    phi[0] = phi0;
    E[0] = c0;
    cplx eta = 0.0;
    for (int m = 1; m < order; ++m) {
        cplx partial = 0.0;
        for (int k = 1; k < m; ++k)
            partial += static_cast<double>(k) * u[static_cast<size_t>(k)] *
                       E[static_cast<size_t>(m - k)];
        partial /= static_cast<double>(m);
        cplx gm = g.coeff(m);
        cplx pm;
        if (m < n) {
            pm = (partial - gm) / (static_cast<double>(n) * c0);
        } else if (m == n) {
            pm = 0.0;  // gauge: the order-n coefficient of phi vanishes
            eta = gm - partial - map.c * phi[0];
        } else {
            pm = (partial + map.c * phi[static_cast<size_t>(m - n)] - gm) /
                 (static_cast<double>(n) * c0);
        }
        phi[static_cast<size_t>(m)] = pm;
        u[static_cast<size_t>(m)] = -static_cast<double>(n) * pm;
        E[static_cast<size_t>(m)] = partial - static_cast<double>(n) * c0 * pm;
    }
    LaurentSeries phi_series(0, std::move(phi), order);
    return ThirdFormChange{nu, n, flatsing::exp(phi_series), phi_series, eta};
}

/// Three-way dispatch on (alpha, c, val(psi)).
inline Classification classify(const DevelopingMap& map, int order = kDefaultOrder,
                               int root_index = 0) {
    map.validate();
    density_of(map);  // rejects degenerate inputs up front
    if (map.alpha != 0.0 || std::abs(map.c) == 0.0) {
        ConicalChange cc = conical_change(map, order);
        NormalForm form{FormTag::Conical, cc.beta, 0.0, 0.0, 0};
        return Classification{form, CoordinateChange{cc.h, std::nullopt}};
    }
    if (map.psi.is_zero() || map.psi.valuation() >= 0) {
        CylinderChange cc = cylinder_change(map, order);
        NormalForm form{FormTag::Cylindrical, 0.0, cc.c, 0.0, 0};
        return Classification{form, CoordinateChange{cc.h, std::nullopt}};
    }
    ThirdFormChange tc = third_form_change(map, order, root_index);
    NormalForm form{FormTag::LogPole, 0.0, 0.0, tc.nu, tc.n};
    return Classification{form, CoordinateChange{tc.h, tc.eta}};
}

/// Substitute z_new = z * h(z) into a density given in the z_new
/// coordinate: new G = h^a * (G o (z h)) * (h + z h'), exponents
/// re-absorbed into a. This is the series form of
/// |z h|^{2a} |G(z h)|^2 |d(z h)/dz|^2.
inline MetricDensity apply_change(const MetricDensity& d, const CoordinateChange& ch,
                                  int order = kDefaultOrder) {
    LaurentSeries h = truncated(ch.h, order);
    if (h.is_zero() || h.valuation() != 0)
        throw math_error("coordinate change must have h(0) != 0");
    LaurentSeries w = shifted(h, 1);  // z*h(z)
    LaurentSeries jac = h + shifted(derivative(h), 1);
    LaurentSeries g = pow_real(h, d.a) * compose(truncated(d.G, order), w) * jac;
    return normalized(d.a, g);
}

/// Reversion of z_new = z*h(z): returns k with z = z_new * k(z_new),
/// by the fixed-point iteration v <- z_new / h(v).
inline CoordinateChange invert_change(const CoordinateChange& ch, int order = kDefaultOrder) {
    LaurentSeries h = truncated(ch.h, order);
    if (h.is_zero() || h.valuation() != 0)
        throw math_error("coordinate change must have h(0) != 0");
    LaurentSeries v = LaurentSeries::monomial(1, 1.0 / h.coeff(0), order + 1);
    for (int it = 0; it < order + 1; ++it)
        v = shifted(inverse(compose(h, v)), 1);
    LaurentSeries k = shifted(v, -1);
    return CoordinateChange{truncated(k, order), std::nullopt};
}

/// Rewrite the map in the coordinate w_new with w = w_new * u(w_new),
/// u a unit series. Used by the invariant-uniqueness checks: the metric
/// is unchanged, only its presentation moves.
inline DevelopingMap reparametrize(const DevelopingMap& map, const LaurentSeries& u) {
    if (u.is_zero() || u.valuation() != 0)
        throw math_error("reparameterization requires a unit series");
    int order = std::min(map.psi.order(), u.order());
    LaurentSeries w = shifted(truncated(u, order), 1);  // w(w_new)
    auto substitute = [&](const LaurentSeries& s) {
        if (s.is_zero()) return s;
        int v = s.valuation();
        LaurentSeries unit = shifted(s, -v);
        LaurentSeries inner = compose(truncated(unit, order), w);
        return shifted(pow_real(truncated(u, order), static_cast<double>(v)) * inner, v);
    };
    if (map.alpha != 0.0) {
        LaurentSeries psi_new = pow_real(truncated(u, order), map.alpha) * substitute(map.psi);
        return DevelopingMap{map.alpha, 0.0, psi_new};
    }
    LaurentSeries psi_new = substitute(map.psi);
    if (std::abs(map.c) != 0.0)
        psi_new = psi_new + map.c * log_unit(truncated(u, order));
    return DevelopingMap{0.0, map.c, psi_new};
}

/// Densities agree up to a global unimodular factor on G; canonicalize
/// the phase (leading coefficient positive real) before comparing.
inline LaurentSeries phase_canonical(const LaurentSeries& G) {
    if (G.is_zero()) return G;
    cplx lead = G.coeffs()[0];
    return G * (std::conj(lead) / std::abs(lead));
}

/// Coefficientwise residual between two densities, scaled by the larger
/// coefficient magnitude. Infinite if the radial exponents differ.
inline double density_residual(const MetricDensity& lhs, const MetricDensity& rhs,
                               int compare_order = std::numeric_limits<int>::max()) {
    if (std::abs(lhs.a - rhs.a) > 1e-9) return std::numeric_limits<double>::infinity();
    LaurentSeries ga = phase_canonical(lhs.G);
    LaurentSeries gb = phase_canonical(rhs.G);
    double scale = std::max({1.0, max_coeff_abs(ga), max_coeff_abs(gb)});
    return max_coeff_diff(ga, gb, compare_order) / scale;
}

}  // namespace flatsing

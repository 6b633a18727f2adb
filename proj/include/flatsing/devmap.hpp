#pragma once

#include <cmath>

#include "flatsing/series.hpp"

namespace flatsing {

/// Developing map of a flat metric on the punctured disk, encoded as
/// f(w) = w^alpha * psi(w) when alpha != 0, and f(w) = c*log(w) + psi(w)
/// when alpha == 0. alpha in [0,1) is the holonomy exponent.
struct DevelopingMap {
    double alpha = 0.0;
    cplx c = 0.0;
    LaurentSeries psi;

    void validate() const {
        if (alpha < 0.0 || alpha >= 1.0)
            throw math_error("holonomy exponent must lie in [0,1)");
        if (alpha != 0.0 && std::abs(c) != 0.0)
            throw math_error("log coefficient must vanish when alpha != 0");
    }
};

/// Metric density lambda^2 = |w|^{2a} * |G(w)|^2 with G a holomorphic
/// (valuation-0) series; monomial factors of G are absorbed into a.
struct MetricDensity {
    double a = 0.0;
    LaurentSeries G = LaurentSeries::constant(1.0);
};

inline MetricDensity normalized(double a, const LaurentSeries& G) {
    if (G.is_zero()) throw math_error("degenerate developing map");
    int v = G.valuation();
    return MetricDensity{a + v, shifted(G, -v)};
}

/// |df|^2 as a density. Case alpha != 0: G = alpha*psi + w*psi'.
/// Case alpha == 0: G = c + w*psi', with the 1/|w|^2 factor carried in a.
inline MetricDensity density_of(const DevelopingMap& map) {
    map.validate();
    if (map.alpha != 0.0) {
        // sum (alpha+k) a_k w^k, radial factor |w|^{2(alpha-1)}
        std::vector<cplx> c;
        for (int k = map.psi.valuation(); k < map.psi.order(); ++k)
            c.push_back((map.alpha + k) * map.psi.coeff(k));
        LaurentSeries G(map.psi.valuation(), std::move(c), map.psi.order());
        return normalized(map.alpha - 1.0, G);
    }
    LaurentSeries G = LaurentSeries::constant(map.c, map.psi.order() + 1) +
                      shifted(derivative(map.psi), 1);
    return normalized(-1.0, G);
}

inline double eval_density(const MetricDensity& d, cplx w) {
    if (w == 0.0) throw math_error("evaluation at puncture");
    double g = std::abs(d.G.eval(w));
    return std::pow(std::abs(w), 2.0 * d.a) * g * g;
}

/// Annulus sampling for the flatness check. `step` is the spacing of the
/// five-point Laplacian stencil; grid points where |G| falls below
/// zero_guard are skipped (the scheme error of log|G| blows up near a
/// zero of G).
struct FlatnessGrid {
    double r_min = 0.2;
    double r_max = 0.8;
    int n_radial = 12;
    int n_angular = 24;
    double step = 1e-5;
    double zero_guard = 0.05;
};

/// Max |discrete Laplacian of log(lambda)| over the grid. Zero residual
/// characterizes flatness: K = -(Delta log lambda)/lambda^2.
///
/// log(lambda) is evaluated in extended precision: with stencil spacing h
/// the rounding noise of a double-precision evaluation (~eps/h^2) would
/// exceed the 1e-6 scale the check certifies.
inline double flatness_residual(const MetricDensity& d, const FlatnessGrid& grid = {}) {
    using cld = std::complex<long double>;
    const long double h = grid.step;
    auto log_lambda = [&](cld p) -> long double {
        long double g = std::abs(d.G.eval_ld(p));
        if (g < 1e-12L) throw math_error("log singularity on grid");
        return static_cast<long double>(d.a) * std::log(std::abs(p)) + std::log(g);
    };
    double residual = 0.0;
    bool any = false;
    for (int i = 0; i < grid.n_radial; ++i) {
        double t = grid.n_radial == 1 ? 0.0 : static_cast<double>(i) / (grid.n_radial - 1);
        long double r = grid.r_min * std::pow(grid.r_max / grid.r_min, t);
        for (int j = 0; j < grid.n_angular; ++j) {
            long double th = 2.0L * 3.14159265358979323846264338328L * j / grid.n_angular;
            cld z(r * std::cos(th), r * std::sin(th));
            cld stencil[5] = {z, z + h, z - h, z + cld(0, h), z - cld(0, h)};
            bool skip = false;
            for (const cld& p : stencil)
                if (std::abs(d.G.eval_ld(p)) < grid.zero_guard) skip = true;
            if (skip) continue;
            long double lap = log_lambda(stencil[1]) + log_lambda(stencil[2]) +
                              log_lambda(stencil[3]) + log_lambda(stencil[4]) -
                              4.0L * log_lambda(stencil[0]);
            lap /= h * h;
            residual = std::max(residual, static_cast<double>(std::abs(lap)));
            any = true;
        }
    }
    if (!any) throw math_error("log singularity on grid");
    return residual;
}

}  // namespace flatsing

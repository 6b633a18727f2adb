#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flatsing/classify.hpp"
#include "flatsing/devmap.hpp"

namespace flatsing {

/// Product quadrature for annuli: uniform angular nodes (exact for the
/// trigonometric polynomials |G|^2 produces) times log-spaced radial
/// panels with 4-point Gauss-Legendre per panel.
struct QuadratureSpec {
    int angular_nodes = 512;
    int panels_per_decade = 16;
};

namespace detail {
// 4-point Gauss-Legendre on [-1, 1].
inline constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563,
                                      0.3399810435848563, 0.8611363115940526};
inline constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461,
                                      0.6521451548625461, 0.3478548451374538};
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace detail

/// Radial quadrature nodes for the annulus (r_in, r_out).
inline std::vector<double> radial_nodes(double r_in, double r_out,
                                        const QuadratureSpec& spec = {}) {
    double u0 = std::log(r_in), u1 = std::log(r_out);
    int panels = std::max(4, static_cast<int>(std::ceil(
                                 spec.panels_per_decade * (u1 - u0) / std::log(10.0))));
    std::vector<double> nodes;
    nodes.reserve(static_cast<size_t>(panels) * 4);
    for (int p = 0; p < panels; ++p) {
        double a = u0 + (u1 - u0) * p / panels;
        double b = u0 + (u1 - u0) * (p + 1) / panels;
        for (int q = 0; q < 4; ++q)
            nodes.push_back(std::exp(0.5 * (a + b) + 0.5 * (b - a) * detail::kGaussX[q]));
    }
    return nodes;
}

/// Integral of lambda^2 over the annulus r_in < |w| < r_out. In u = log s
/// the radial integrand is s^{2a+2} * (angular mean of |G|^2).
inline double annulus_area(const MetricDensity& d, double r_in, double r_out,
                           const QuadratureSpec& spec = {}) {
    if (!(0.0 < r_in && r_in < r_out))
        throw math_error("annulus radii must satisfy 0 < r_in < r_out");
    double u0 = std::log(r_in), u1 = std::log(r_out);
    int panels = std::max(4, static_cast<int>(std::ceil(
                                 spec.panels_per_decade * (u1 - u0) / std::log(10.0))));
    double dtheta = detail::kTwoPi / spec.angular_nodes;
    double total = 0.0;
    double g_max = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = u0 + (u1 - u0) * p / panels;
        double b = u0 + (u1 - u0) * (p + 1) / panels;
        for (int q = 0; q < 4; ++q) {
            double u = 0.5 * (a + b) + 0.5 * (b - a) * detail::kGaussX[q];
            double s = std::exp(u);
            double ang = 0.0;
            for (int j = 0; j < spec.angular_nodes; ++j) {
                double th = dtheta * j;
                double g = std::abs(d.G.eval(cplx(s * std::cos(th), s * std::sin(th))));
                g_max = std::max(g_max, g);
                if (g < 1e-12 || g < 1e-7 * g_max)
                    throw math_error("annulus touches a zero of the density at radius " +
                                     std::to_string(s));
                ang += g * g;
            }
            total += detail::kGaussW[q] * 0.5 * (b - a) *
                     std::pow(s, 2.0 * d.a + 2.0) * ang * dtheta;
        }
    }
    if (!std::isfinite(total))
        throw math_error("annulus touches a singularity of the density");
    return total;
}

enum class GrowthModel { Constant, Logarithmic, Power };

inline const char* model_name(GrowthModel m) {
    switch (m) {
        case GrowthModel::Constant: return "constant";
        case GrowthModel::Logarithmic: return "logarithmic";
        case GrowthModel::Power: return "power";
    }
    return "?";
}

/// Area(Delta(0, 1/r, R)) samples plus the selected growth law.
/// fit_residual is the max relative deviation of the selected model.
struct AreaScan {
    double R = 0.0;
    std::vector<std::pair<double, double>> samples;  // (r, area)
    GrowthModel fitted_model = GrowthModel::Constant;
    double coef = 0.0;      // M of the selected law
    double offset = 0.0;    // additive constant (log model)
    double exponent = 0.0;  // N (power model only)
    double fit_residual = 0.0;
    bool truncated = false;  // some r values fell below the evaluable range
};

namespace detail {

struct Fit {
    double coef = 0.0, offset = 0.0, exponent = 0.0;
    double residual = std::numeric_limits<double>::infinity();
};

inline double rel_dev(const std::vector<std::pair<double, double>>& samples,
                      const std::vector<double>& model) {
    double r = 0.0;
    for (size_t i = 0; i < samples.size(); ++i)
        r = std::max(r, std::abs(model[i] - samples[i].second) /
                            std::max(std::abs(samples[i].second), 1e-300));
    return r;
}

inline Fit fit_constant(const std::vector<std::pair<double, double>>& s) {
    // The harmonic mean of the extreme samples minimizes the max relative
    // deviation for positive data, which is the reported residual.
    Fit f;
    double lo = s.front().second, hi = s.front().second;
    for (const auto& [r, a] : s) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (lo <= 0.0) return f;
    f.coef = 2.0 * lo * hi / (lo + hi);
    std::vector<double> model(s.size(), f.coef);
    f.residual = rel_dev(s, model);
    return f;
}

inline Fit fit_logarithmic(const std::vector<std::pair<double, double>>& s) {
    // least squares A = M ln r + b
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [r, a] : s) {
        double x = std::log(r);
        sx += x; sy += a; sxx += x * x; sxy += x * a;
    }
    double n = static_cast<double>(s.size());
    double denom = n * sxx - sx * sx;
    Fit f;
    f.coef = (n * sxy - sx * sy) / denom;
    f.offset = (sy - f.coef * sx) / n;
    std::vector<double> model;
    for (const auto& [r, a] : s) model.push_back(f.coef * std::log(r) + f.offset);
    f.residual = rel_dev(s, model);
    return f;
}

inline Fit fit_power(const std::vector<std::pair<double, double>>& s) {
    // least squares ln A = ln M + N ln r; requires positive areas
    Fit f;
    for (const auto& [r, a] : s)
        if (a <= 0.0) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [r, a] : s) {
        double x = std::log(r), y = std::log(a);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double n = static_cast<double>(s.size());
    double denom = n * sxx - sx * sx;
    f.exponent = (n * sxy - sx * sy) / denom;
    f.coef = std::exp((sy - f.exponent * sx) / n);
    std::vector<double> model;
    for (const auto& [r, a] : s) model.push_back(f.coef * std::pow(r, f.exponent));
    f.residual = rel_dev(s, model);
    return f;
}

}  // namespace detail

// Lowest inner radius at which series evaluation is still meaningful.
inline constexpr double kMinInnerRadius = 1e-12;

/// Compute Area(Delta(0, 1/r, R)) for each r and fit the three candidate
/// growth laws. Selection picks the minimum residual, with a 5% margin
/// in favor of the simpler model (constant, then logarithmic).
inline AreaScan growth_scan(const MetricDensity& d, double R, std::vector<double> r_values,
                            const QuadratureSpec& spec = {}) {
    std::sort(r_values.begin(), r_values.end());
    AreaScan scan;
    scan.R = R;
    std::vector<double> usable;
    for (double r : r_values) {
        if (r <= 1.0 / R) throw math_error("r values must exceed 1/R");
        if (1.0 / r < kMinInnerRadius) {
            scan.truncated = true;
            continue;
        }
        usable.push_back(r);
    }
    if (usable.size() < 2) throw math_error("growth scan needs at least two usable r values");
    if (usable.back() / usable.front() < 100.0)
        throw math_error("r values must span at least two decades");
    // Annuli share their outer region; sweep inward and accumulate.
    double acc = annulus_area(d, 1.0 / usable.front(), R, spec);
    scan.samples.push_back({usable.front(), acc});
    for (size_t i = 1; i < usable.size(); ++i) {
        acc += annulus_area(d, 1.0 / usable[i], 1.0 / usable[i - 1], spec);
        scan.samples.push_back({usable[i], acc});
    }

    detail::Fit fc = detail::fit_constant(scan.samples);
    detail::Fit fl = detail::fit_logarithmic(scan.samples);
    detail::Fit fp = detail::fit_power(scan.samples);
    constexpr double kSimplerMargin = 0.05;
    double best = std::min({fc.residual, fl.residual, fp.residual});
    detail::Fit chosen;
    if (fc.residual <= best + kSimplerMargin) {
        scan.fitted_model = GrowthModel::Constant;
        chosen = fc;
    } else if (fl.residual <= best + kSimplerMargin) {
        scan.fitted_model = GrowthModel::Logarithmic;
        chosen = fl;
    } else {
        scan.fitted_model = GrowthModel::Power;
        chosen = fp;
    }
    scan.coef = chosen.coef;
    scan.offset = chosen.offset;
    scan.exponent = chosen.exponent;
    scan.fit_residual = chosen.residual;
    return scan;
}

inline std::vector<double> default_r_grid(double r_min = 10.0, double r_max = 1e4,
                                          int count = 40) {
    std::vector<double> r(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        r[static_cast<size_t>(i)] =
            r_min * std::pow(r_max / r_min, static_cast<double>(i) / (count - 1));
    return r;
}

struct InvarianceResult {
    AreaScan before;
    AreaScan after;
};

/// Growth scan before and after an origin-preserving coordinate change:
/// the selected model and exponent are coordinate invariants.
inline InvarianceResult invariance_check(const MetricDensity& d, const CoordinateChange& ch,
                                         double R, const std::vector<double>& r_values,
                                         int order = kDefaultOrder,
                                         const QuadratureSpec& spec = {}) {
    InvarianceResult res;
    res.before = growth_scan(d, R, r_values, spec);
    res.after = growth_scan(apply_change(d, ch, order), R, r_values, spec);
    return res;
}

}  // namespace flatsing

#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "flatsing/area.hpp"
#include "flatsing/classify.hpp"
#include "flatsing/devmap.hpp"
#include "flatsing/series.hpp"
#include "flatsing/symmetry.hpp"

namespace flatsing {

using json = nlohmann::ordered_json;

struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io_detail {

inline json require(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key))
        throw schema_error("missing field \"" + key + "\"");
    return j.at(key);
}

inline cplx complex_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw schema_error("field \"" + where + "\" must be [re, im]");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

inline json complex_to(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace io_detail

// --- series ---------------------------------------------------------------

inline json series_to_json(const LaurentSeries& s) {
    json coeffs = json::array();
    for (const auto& c : s.coeffs()) coeffs.push_back(io_detail::complex_to(c));
    return json{{"valuation", s.valuation()}, {"order", s.order()}, {"coeffs", coeffs}};
}

inline LaurentSeries series_from_json(const json& j) {
    int valuation = io_detail::require(j, "valuation").get<int>();
    int order = io_detail::require(j, "order").get<int>();
    json cj = io_detail::require(j, "coeffs");
    if (!cj.is_array()) throw schema_error("field \"coeffs\" must be an array");
    std::vector<cplx> coeffs;
    for (size_t i = 0; i < cj.size(); ++i)
        coeffs.push_back(io_detail::complex_from(cj[i], "coeffs[" + std::to_string(i) + "]"));
    return LaurentSeries(valuation, std::move(coeffs), order);
}

// --- developing map / density --------------------------------------------

inline json map_to_json(const DevelopingMap& m) {
    return json{{"alpha", m.alpha},
                {"c", io_detail::complex_to(m.c)},
                {"psi", series_to_json(m.psi)}};
}

inline DevelopingMap map_from_json(const json& j) {
    DevelopingMap m;
    m.alpha = io_detail::require(j, "alpha").get<double>();
    m.c = io_detail::complex_from(io_detail::require(j, "c"), "c");
    m.psi = series_from_json(io_detail::require(j, "psi"));
    try {
        m.validate();
    } catch (const math_error& e) {
        throw schema_error(e.what());
    }
    return m;
}

inline json density_to_json(const MetricDensity& d) {
    return json{{"a", d.a}, {"G", series_to_json(d.G)}};
}

inline MetricDensity density_from_json(const json& j) {
    MetricDensity d;
    d.a = io_detail::require(j, "a").get<double>();
    d.G = series_from_json(io_detail::require(j, "G"));
    if (d.G.is_zero()) throw schema_error("density factor G must be nonzero");
    return d;
}

// --- normal form / classification ----------------------------------------

inline json classification_to_json(const Classification& cl) {
    json out;
    switch (cl.form.tag) {
        case FormTag::Conical:
            out["form"] = "conical";
            out["beta"] = cl.form.beta;
            break;
        case FormTag::Cylindrical:
            out["form"] = "cylindrical";
            out["c"] = cl.form.c;
            break;
        case FormTag::LogPole:
            out["form"] = "log_pole";
            out["nu"] = cl.form.nu;
            out["n"] = cl.form.n;
            break;
    }
    if (cl.change.eta) out["eta"] = io_detail::complex_to(*cl.change.eta);
    out["change"] = series_to_json(cl.change.h);
    return out;
}

inline NormalForm form_from_json(const json& j) {
    std::string tag = io_detail::require(j, "form").get<std::string>();
    NormalForm f;
    if (tag == "conical") {
        f.tag = FormTag::Conical;
        f.beta = io_detail::require(j, "beta").get<double>();
    } else if (tag == "cylindrical") {
        f.tag = FormTag::Cylindrical;
        f.c = io_detail::require(j, "c").get<double>();
    } else if (tag == "log_pole") {
        f.tag = FormTag::LogPole;
        f.nu = io_detail::require(j, "nu").get<double>();
        f.n = io_detail::require(j, "n").get<int>();
    } else {
        throw schema_error("unknown form tag \"" + tag + "\"");
    }
    return f;
}

inline json form_to_json(const NormalForm& f) {
    switch (f.tag) {
        case FormTag::Conical:
            return json{{"form", "conical"}, {"beta", f.beta}};
        case FormTag::Cylindrical:
            return json{{"form", "cylindrical"}, {"c", f.c}};
        case FormTag::LogPole:
            return json{{"form", "log_pole"}, {"nu", f.nu}, {"n", f.n}};
    }
    throw schema_error("unknown form tag");
}

// --- symmetry elements ----------------------------------------------------

inline json element_to_json(const SymmetryElement& g) {
    json out{{"family", family_name(g.family)}};
    switch (g.family) {
        case Family::M1Generic:
            out["lambda"] = io_detail::complex_to(g.lambda);
            break;
        case Family::M1Integer:
            out["lambda"] = io_detail::complex_to(g.lambda);
            out["zeta"] = io_detail::complex_to(g.zeta);
            break;
        case Family::M2:
            out["p"] = io_detail::complex_to(g.p);
            break;
        case Family::M3:
            out["ek_index"] = g.ek_index;
            out["a"] = io_detail::complex_to(g.a);
            break;
    }
    return out;
}

inline SymmetryElement element_from_json(const json& j) {
    std::string fam = io_detail::require(j, "family").get<std::string>();
    SymmetryElement g;
    if (fam == "M1_generic") {
        g.family = Family::M1Generic;
        g.lambda = io_detail::complex_from(io_detail::require(j, "lambda"), "lambda");
    } else if (fam == "M1_integer") {
        g.family = Family::M1Integer;
        g.lambda = io_detail::complex_from(io_detail::require(j, "lambda"), "lambda");
        g.zeta = io_detail::complex_from(io_detail::require(j, "zeta"), "zeta");
    } else if (fam == "M2") {
        g.family = Family::M2;
        g.p = io_detail::complex_from(io_detail::require(j, "p"), "p");
    } else if (fam == "M3") {
        g.family = Family::M3;
        g.ek_index = io_detail::require(j, "ek_index").get<int>();
        g.a = io_detail::complex_from(io_detail::require(j, "a"), "a");
    } else {
        throw schema_error("unknown symmetry family \"" + fam + "\"");
    }
    return g;
}

// --- area scans -----------------------------------------------------------

inline json scan_to_json(const AreaScan& scan) {
    json out;
    out["R"] = scan.R;
    out["fitted_model"] = model_name(scan.fitted_model);
    out["coef"] = scan.coef;
    if (scan.fitted_model == GrowthModel::Logarithmic) out["offset"] = scan.offset;
    if (scan.fitted_model == GrowthModel::Power) out["exponent"] = scan.exponent;
    out["fit_residual"] = scan.fit_residual;
    out["truncated"] = scan.truncated;
    return out;
}

inline std::string scan_to_csv(const AreaScan& scan) {
    std::string csv = "r,area\n";
    char buf[64];
    for (const auto& [r, a] : scan.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", r, a);
        csv += buf;
    }
    return csv;
}

}  // namespace flatsing

// Command-line front end: classify flat-metric singularities, normalize
// them, scan area growth, and exercise the symmetry families.
//
// Exit codes: 0 success, 2 schema violation, 3 mathematical precondition
// failure, 4 I/O failure. Failures emit a machine-readable error object.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "flatsing/area.hpp"
#include "flatsing/classify.hpp"
#include "flatsing/devmap.hpp"
#include "flatsing/io.hpp"
#include "flatsing/symmetry.hpp"

namespace {

using flatsing::json;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open input file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw flatsing::schema_error(std::string("invalid JSON: ") + e.what());
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw io_error("cannot open output file: " + path);
    out << text;
    if (!out) throw io_error("write failed: " + path);
}

// Accepts either a developing-map object or a density object.
flatsing::MetricDensity density_from_input(const json& j) {
    if (j.is_object() && j.contains("alpha"))
        return flatsing::density_of(flatsing::map_from_json(j));
    return flatsing::density_from_json(j);
}

struct Options {
    std::string input;
    std::string output;
    int order = 32;
    double tol = 1e-9;
    unsigned long long seed = 0;
    int root_index = 0;
    double R = 0.4;
    double r_min = 10.0;
    double r_max = 1e4;
    int r_count = 40;
};

void add_common(CLI::App* cmd, Options& opt, bool needs_input = true) {
    if (needs_input)
        cmd->add_option("input", opt.input, "input JSON file")->required();
    cmd->add_option("--order", opt.order, "truncation order (>= 4)");
    cmd->add_option("--tol", opt.tol, "tolerance for pass/fail reporting");
    cmd->add_option("--seed", opt.seed, "seed for randomized checks");
    cmd->add_option("--output", opt.output, "output path (default stdout)");
}

void check_job(const Options& opt) {
    if (opt.order < 4) throw flatsing::schema_error("order must be >= 4");
    if (!(opt.tol > 0.0)) throw flatsing::schema_error("tol must be positive");
}

int run_classify(const Options& opt) {
    flatsing::DevelopingMap map = flatsing::map_from_json(read_input(opt.input));
    flatsing::Classification cl = flatsing::classify(map, opt.order, opt.root_index);
    write_output(opt.output, flatsing::classification_to_json(cl).dump(2));
    return 0;
}

int run_normalize(const Options& opt) {
    flatsing::DevelopingMap map = flatsing::map_from_json(read_input(opt.input));
    flatsing::Classification cl = flatsing::classify(map, opt.order, opt.root_index);
    json out = flatsing::classification_to_json(cl);
    out["density"] = flatsing::density_to_json(
        flatsing::normal_form_density(cl.form, opt.order));
    write_output(opt.output, out.dump(2));
    return 0;
}

int run_roundtrip(const Options& opt) {
    flatsing::DevelopingMap map = flatsing::map_from_json(read_input(opt.input));
    flatsing::Classification cl = flatsing::classify(map, opt.order, opt.root_index);
    flatsing::MetricDensity input_density = flatsing::density_of(map);
    flatsing::MetricDensity pulled = flatsing::apply_change(
        flatsing::normal_form_density(cl.form, opt.order), cl.change, opt.order);
    double residual = flatsing::density_residual(input_density, pulled);
    json out = flatsing::classification_to_json(cl);
    out.erase("change");
    out["residual"] = residual;
    out["tol"] = opt.tol;
    out["pass"] = residual < opt.tol;
    write_output(opt.output, out.dump(2));
    return 0;
}

int run_flatness(const Options& opt) {
    flatsing::MetricDensity d = density_from_input(read_input(opt.input));
    double residual = flatsing::flatness_residual(d);
    json out{{"residual", residual}, {"tol", opt.tol}, {"pass", residual < opt.tol}};
    write_output(opt.output, out.dump(2));
    return 0;
}

int run_area_scan(const Options& opt) {
    flatsing::MetricDensity d = density_from_input(read_input(opt.input));
    flatsing::AreaScan scan = flatsing::growth_scan(
        d, opt.R, flatsing::default_r_grid(opt.r_min, opt.r_max, opt.r_count));
    std::string csv = flatsing::scan_to_csv(scan);
    std::string summary = flatsing::scan_to_json(scan).dump(2);
    if (opt.output.empty() || opt.output == "-") {
        std::cout << csv << summary << "\n";
    } else {
        write_output(opt.output, csv);
        write_output(opt.output + ".json", summary);
    }
    return 0;
}

int run_symmetry_compose(const Options& opt) {
    json j = read_input(opt.input);
    flatsing::NormalForm form = flatsing::form_from_json(flatsing::io_detail::require(j, "form"));
    flatsing::SymmetryElement g1 =
        flatsing::element_from_json(flatsing::io_detail::require(j, "g1"));
    flatsing::SymmetryElement g2 =
        flatsing::element_from_json(flatsing::io_detail::require(j, "g2"));
    flatsing::SymmetryElement composed = flatsing::compose_elements(g1, g2, form);
    double residual = flatsing::verify_composition(g1, g2, form, opt.order);
    json out{{"composed", flatsing::element_to_json(composed)},
             {"composition_residual", residual}};
    write_output(opt.output, out.dump(2));
    return 0;
}

int run_symmetry_verify(const Options& opt) {
    json j = read_input(opt.input);
    flatsing::NormalForm form = flatsing::form_from_json(flatsing::io_detail::require(j, "form"));
    flatsing::SymmetryElement g =
        flatsing::element_from_json(flatsing::io_detail::require(j, "element"));
    double inv = flatsing::verify_invariance(form, g, opt.order);
    json out{{"invariance_residual", inv}, {"tol", opt.tol}, {"pass", inv < opt.tol}};
    if (g.family == flatsing::Family::M3) {
        flatsing::M3Change mc = flatsing::m3_change(form, g.ek_index, g.a, opt.order);
        out["equation_residual"] = flatsing::m3_equation_residual(form, mc);
        out["zeta0"] = flatsing::io_detail::complex_to(mc.zeta0);
    }
    write_output(opt.output, out.dump(2));
    return 0;
}

json error_object(const std::string& kind, const std::string& message) {
    return json{{"error", json{{"kind", kind}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flat-metric singularity toolkit"};
    app.require_subcommand(1);

    Options opt;
    auto* classify = app.add_subcommand("classify", "classify a developing map");
    add_common(classify, opt);
    classify->add_option("--root-index", opt.root_index, "log-branch for the third form");

    auto* normalize = app.add_subcommand("normalize", "classify and emit the normal form");
    add_common(normalize, opt);
    normalize->add_option("--root-index", opt.root_index, "log-branch for the third form");

    auto* roundtrip = app.add_subcommand("roundtrip", "classify and verify the pullback residual");
    add_common(roundtrip, opt);
    roundtrip->add_option("--root-index", opt.root_index, "log-branch for the third form");

    auto* flatness = app.add_subcommand("flatness", "finite-difference flatness residual");
    add_common(flatness, opt);

    auto* area = app.add_subcommand("area-scan", "annulus area growth scan");
    add_common(area, opt);
    area->add_option("--R", opt.R, "outer radius");
    area->add_option("--r-min", opt.r_min, "smallest r (inner radius 1/r)");
    area->add_option("--r-max", opt.r_max, "largest r");
    area->add_option("--r-count", opt.r_count, "number of r samples");

    auto* scompose = app.add_subcommand("symmetry-compose", "compose two symmetry elements");
    add_common(scompose, opt);

    auto* sverify = app.add_subcommand("symmetry-verify", "verify a symmetry element");
    add_common(sverify, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        check_job(opt);
        if (classify->parsed()) return run_classify(opt);
        if (normalize->parsed()) return run_normalize(opt);
        if (roundtrip->parsed()) return run_roundtrip(opt);
        if (flatness->parsed()) return run_flatness(opt);
        if (area->parsed()) return run_area_scan(opt);
        if (scompose->parsed()) return run_symmetry_compose(opt);
        if (sverify->parsed()) return run_symmetry_verify(opt);
    } catch (const flatsing::schema_error& e) {
        std::cout << error_object("schema", e.what()).dump(2) << "\n";
        return 2;
    } catch (const flatsing::math_error& e) {
        std::cout << error_object("math", e.what()).dump(2) << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cout << error_object("io", e.what()).dump(2) << "\n";
        return 4;
    }
    return 1;
}

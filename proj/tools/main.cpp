#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "carleman/bell.hpp"
#include "carleman/carleman_matrix.hpp"
#include "carleman/errors.hpp"
#include "carleman/function_spec.hpp"
#include "carleman/iterate.hpp"
#include "carleman/series.hpp"
#include "carleman/spectral.hpp"
#include "carleman/tetration.hpp"
#include "carleman/verification.hpp"

namespace {

using nlohmann::json;

std::string fmt_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// nlohmann's dump has its own float formatting; this walker pins the digit
// count instead and turns non-finite values into null
void dump_json(const json& j, std::string& out, int digits) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_json(it.value(), out, digits);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_json(j[i], out, digits);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? fmt_double(v, digits) : "null";
            break;
        }
        default:
            out += j.dump();
            break;
    }
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct Emit {
    std::string format = "json";  // json | csv
    int digits = 17;
    std::string out_path;

    void write(const std::string& text) const {
        if (out_path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(out_path);
        if (!f) throw carleman::Error("cannot open output file " + out_path);
        f << text;
    }

    void record(const json& rec, const std::string& csv) const {
        if (format == "json") {
            std::string text;
            dump_json(rec, text, digits);
            text += '\n';
            write(text);
        } else {
            write(csv);
        }
    }
};

json eigenvalue_list(const std::vector<carleman::Complex>& eigs) {
    json arr = json::array();
    for (const auto& e : eigs) arr.push_back({{"re", e.real()}, {"im", e.imag()}});
    return arr;
}

void eigenvalue_rows(std::string& csv, const std::vector<carleman::Complex>& eigs, int digits) {
    for (const auto& e : eigs)
        csv += "eigenvalue," + fmt_double(e.real(), digits) + "," +
               fmt_double(e.imag(), digits) + "\n";
}

double parse_base(const std::string& text) {
    if (text == "e") return std::exp(1.0);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw carleman::SpecParseError("malformed base '" + text + "'", 0);
    return v;
}

std::pair<int, int> parse_orders(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos)
        throw carleman::SpecParseError("orders must look like N1..N2", text.size());
    int a = 0, b = 0;
    auto [p1, e1] = std::from_chars(text.data(), text.data() + dots, a);
    auto [p2, e2] = std::from_chars(text.data() + dots + 2, text.data() + text.size(), b);
    if (e1 != std::errc() || p1 != text.data() + dots || e2 != std::errc() ||
        p2 != text.data() + text.size())
        throw carleman::SpecParseError("malformed orders range '" + text + "'", 0);
    return {a, b};
}

struct IterateArgs {
    std::string spec;
    double alpha = 1.0;
    int order = 8;
    std::vector<double> at;
    double tol = -1.0;
    Emit emit;
};

int run_iterate(const IterateArgs& a) {
    const auto fs = carleman::parse_function_spec(a.spec);
    const auto g = carleman::series_from_spec(fs, a.order);
    const auto res = carleman::iterate_series(g, a.alpha, a.order, a.tol);
    const auto eigs = carleman::eigenvalues(carleman::carleman_direct(g, a.order).entries);

    json rec{{"schema_version", 1},
             {"kind", "iterate"},
             {"spec", carleman::render_function_spec(fs)},
             {"N", a.order},
             {"alpha", a.alpha},
             {"convention", "taylor"},
             {"eigenvalues", eigenvalue_list(eigs)},
             {"diagnostics",
              {{"gap", res.gap}, {"max_imag", res.max_imag}, {"path", to_string(res.path)}}}};
    json coeffs = json::array();
    for (int k = 0; k <= a.order; ++k) coeffs.push_back(res.series.taylor(k));
    rec["coefficients"] = coeffs;
    json values = json::array();
    for (double x : a.at) values.push_back({x, evaluate(res.series, x)});
    rec["values"] = values;

    std::string csv = "record,iterate\nspec," + csv_escape(carleman::render_function_spec(fs)) +
                      "\nN," + std::to_string(a.order) + "\nalpha," +
                      fmt_double(a.alpha, a.emit.digits) + "\nconvention,taylor\n";
    for (int k = 0; k <= a.order; ++k)
        csv += "coefficient," + std::to_string(k) + "," +
               fmt_double(res.series.taylor(k), a.emit.digits) + "\n";
    eigenvalue_rows(csv, eigs, a.emit.digits);
    for (double x : a.at)
        csv += "value," + fmt_double(x, a.emit.digits) + "," +
               fmt_double(evaluate(res.series, x), a.emit.digits) + "\n";
    csv += "diagnostic,gap," + fmt_double(res.gap, a.emit.digits) + "\n";
    csv += "diagnostic,max_imag," + fmt_double(res.max_imag, a.emit.digits) + "\n";
    csv += std::string("diagnostic,path,") + to_string(res.path) + "\n";

    a.emit.record(rec, csv);
    return 0;
}

struct MatrixArgs {
    std::string spec;
    int order = 4;
    std::string kind = "carleman";
    Emit emit;
};

int run_matrix(const MatrixArgs& a) {
    const auto fs = carleman::parse_function_spec(a.spec);
    const auto g = carleman::series_from_spec(fs, a.order);
    carleman::Matrix m;
    if (a.kind == "bell")
        m = carleman::bell_matrix(g, a.order).entries;
    else
        m = carleman::carleman_factored(g, a.order).entries;
    const auto eigs = carleman::eigenvalues(m);

    json rec{{"schema_version", 1},
             {"kind", "matrix"},
             {"matrix_kind", a.kind},
             {"spec", carleman::render_function_spec(fs)},
             {"N", a.order},
             {"eigenvalues", eigenvalue_list(eigs)}};
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        entries.push_back(row);
    }
    rec["entries"] = entries;

    std::string csv = "record,matrix\nspec," + csv_escape(carleman::render_function_spec(fs)) +
                      "\nN," + std::to_string(a.order) + "\nmatrix_kind," + a.kind + "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            csv += "entry," + std::to_string(i) + "," + std::to_string(j) + "," +
                   fmt_double(m(i, j), a.emit.digits) + "\n";
    eigenvalue_rows(csv, eigs, a.emit.digits);

    a.emit.record(rec, csv);
    return 0;
}

struct TetrateArgs {
    std::string base = "e";
    double height = 1.0;
    double x = 1.0;
    bool tower = false;
    bool x_given = false;
    int order = 8;
    double tol = -1.0;
    Emit emit;
};

int run_tetrate(const TetrateArgs& a) {
    const double base = parse_base(a.base);
    if (!(base > 0.0) || base == 1.0)
        throw carleman::BaseOutOfRange("tetrate requires base > 0 and base != 1");
    const double x = a.tower ? base : a.x;
    const bool is_e = base == std::exp(1.0);
    const auto fs = is_e ? carleman::FunctionSpec{"exp", {}}
                         : carleman::FunctionSpec{"exp_base", {base}};
    const auto g = carleman::series_from_spec(fs, a.order);
    const auto res = carleman::iterate_series(g, a.height, a.order, a.tol);
    const double value = evaluate(res.series, x);
    const auto eigs = carleman::eigenvalues(carleman::carleman_direct(g, a.order).entries);

    json rec{{"schema_version", 1},
             {"kind", "tetrate"},
             {"spec", carleman::render_function_spec(fs)},
             {"base", base},
             {"N", a.order},
             {"alpha", a.height},
             {"convention", "taylor"},
             {"eigenvalues", eigenvalue_list(eigs)},
             {"values", json::array({json::array({x, value})})},
             {"diagnostics",
              {{"gap", res.gap}, {"max_imag", res.max_imag}, {"path", to_string(res.path)}}}};
    json coeffs = json::array();
    for (int k = 0; k <= a.order; ++k) coeffs.push_back(res.series.taylor(k));
    rec["coefficients"] = coeffs;

    std::string csv = "record,tetrate\nspec," + csv_escape(carleman::render_function_spec(fs)) +
                      "\nbase," + fmt_double(base, a.emit.digits) + "\nN," +
                      std::to_string(a.order) + "\nalpha," + fmt_double(a.height, a.emit.digits) +
                      "\nconvention,taylor\n";
    for (int k = 0; k <= a.order; ++k)
        csv += "coefficient," + std::to_string(k) + "," +
               fmt_double(res.series.taylor(k), a.emit.digits) + "\n";
    eigenvalue_rows(csv, eigs, a.emit.digits);
    csv += "value," + fmt_double(x, a.emit.digits) + "," + fmt_double(value, a.emit.digits) + "\n";
    csv += "diagnostic,gap," + fmt_double(res.gap, a.emit.digits) + "\n";
    csv += "diagnostic,max_imag," + fmt_double(res.max_imag, a.emit.digits) + "\n";
    csv += std::string("diagnostic,path,") + to_string(res.path) + "\n";

    a.emit.record(rec, csv);
    return 0;
}

struct ConvergenceArgs {
    std::string spec;
    double alpha = 1.0;
    double at = 1.0;
    std::string orders = "2..8";
    double tol = -1.0;
    Emit emit;
};

int run_convergence(const ConvergenceArgs& a) {
    const auto fs = carleman::parse_function_spec(a.spec);
    if (fs.head != "exp")
        throw carleman::SpecParseError("convergence sweeps support exp only", 0);
    const auto [first, last] = parse_orders(a.orders);
    const auto rep = carleman::convergence_sweep(a.alpha, a.at, first, last, a.tol);

    json rec{{"schema_version", 1},
             {"kind", "convergence"},
             {"spec", "exp"},
             {"alpha", a.alpha},
             {"at", a.at}};
    if (rep.has_reference)
        rec["reference"] = {{"value", rep.reference}, {"provenance", rep.provenance}};
    else
        rec["reference"] = {{"value", nullptr}, {"provenance", rep.provenance}};
    json entries = json::array();
    for (const auto& e : rep.entries) {
        entries.push_back({{"N", e.order},
                           {"ok", e.ok},
                           {"value", e.value},
                           {"error", e.error},
                           {"difference", e.difference},
                           {"note", e.note}});
    }
    rec["entries"] = entries;

    auto cell = [&](double v) { return std::isfinite(v) ? fmt_double(v, a.emit.digits) : ""; };
    std::string csv = "N,ok,value,error,difference,note\n";
    for (const auto& e : rep.entries)
        csv += std::to_string(e.order) + "," + (e.ok ? "1" : "0") + "," + cell(e.value) + "," +
               cell(e.error) + "," + cell(e.difference) + "," + csv_escape(e.note) + "\n";

    a.emit.record(rec, csv);
    return 0;
}

void add_emit_flags(CLI::App* cmd, Emit& emit) {
    cmd->add_option("--format", emit.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--digits", emit.digits, "significant digits for floating output")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
    cmd->add_option("--out", emit.out_path, "write data to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous iteration of truncated power series via Bell and Carleman matrices"};
    app.require_subcommand(1);
    app.footer("exit codes: 0 ok, 2 parse/domain error, 3 degenerate spectrum,\n"
               "4 not invertible, 5 nonzero constant term, 1 other failure");

    IterateArgs ia;
    auto* it = app.add_subcommand("iterate", "fractional iterate of a series");
    it->add_option("spec", ia.spec,
                   "function spec: exp | exp_base:<a> | affine:<g0>,<g1> | logistic |"
                   " smoluchowski | xe^x | poly:<a0>,<a1>,...")
        ->required();
    it->add_option("--alpha", ia.alpha, "iteration exponent")->required();
    it->add_option("--order", ia.order, "truncation order N")->check(CLI::PositiveNumber);
    it->add_option("--at", ia.at, "evaluate the iterate at these points");
    it->add_option("--degeneracy-tol", ia.tol, "eigenvalue gap tolerance (default scale-based)");
    add_emit_flags(it, ia.emit);

    MatrixArgs ma;
    auto* mt = app.add_subcommand("matrix", "emit a bell or carleman matrix");
    mt->add_option("spec", ma.spec, "function spec")->required();
    mt->add_option("--order", ma.order, "truncation order N")->check(CLI::PositiveNumber);
    mt->add_option("--kind", ma.kind, "matrix kind")
        ->check(CLI::IsMember({"bell", "carleman"}))
        ->capture_default_str();
    add_emit_flags(mt, ma.emit);

    TetrateArgs ta;
    auto* tt = app.add_subcommand("tetrate", "continuous tetration of a base");
    tt->add_option("--base", ta.base, "base a (a number, or the letter e)")
        ->capture_default_str();
    tt->add_option("--height", ta.height, "tower height t")->required();
    auto* xopt = tt->add_option("--x", ta.x, "evaluation point (default 1)");
    auto* topt = tt->add_flag("--tower", ta.tower, "evaluate at x = base, giving the tower a^^(t+1)");
    xopt->excludes(topt);
    topt->excludes(xopt);
    tt->add_option("--order", ta.order, "truncation order N")->check(CLI::PositiveNumber);
    tt->add_option("--degeneracy-tol", ta.tol, "eigenvalue gap tolerance");
    add_emit_flags(tt, ta.emit);

    auto* vf = app.add_subcommand("verify", "run the acceptance checks and print a table");

    ConvergenceArgs ca;
    auto* cv = app.add_subcommand("convergence", "sweep the truncation order");
    cv->add_option("spec", ca.spec, "function spec (exp only)")->required();
    cv->add_option("--alpha", ca.alpha, "iteration exponent")->required();
    cv->add_option("--at", ca.at, "evaluation point")->required();
    cv->add_option("--orders", ca.orders, "order range N1..N2")->capture_default_str();
    cv->add_option("--degeneracy-tol", ca.tol, "eigenvalue gap tolerance");
    add_emit_flags(cv, ca.emit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*it) return run_iterate(ia);
        if (*mt) return run_matrix(ma);
        if (*tt) return run_tetrate(ta);
        if (*vf) {
            const auto checks = carleman::verification::run_all_checks();
            return carleman::verification::print_report(std::cout, checks) == 0 ? 0 : 1;
        }
        if (*cv) return run_convergence(ca);
    } catch (const carleman::SpecParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const carleman::BaseOutOfRange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const carleman::DegenerateSpectrum& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const carleman::NonInvertible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const carleman::ZeroEigenvalue& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const carleman::NonzeroConstantTerm& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const carleman::InvalidParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const carleman::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lclt/edgeworth.hpp"
#include "lclt/harness.hpp"
#include "lclt/measure.hpp"
#include "lclt/oracle.hpp"
#include "lclt/tilt.hpp"

namespace {

using namespace lclt;

std::vector<std::int64_t> parse_i64_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, ',')) {
        try {
            out.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad integer '" + tok + "' in list");
        }
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + tok + "' in list");
        }
    }
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

LatticePoint parse_point(const std::string& s, int dim) {
    auto v = parse_i64_list(s);
    if (static_cast<int>(v.size()) != dim)
        throw ConfigError("point has " + std::to_string(v.size()) + " coordinates, measure has dimension " +
                          std::to_string(dim));
    return v;
}

int cmd_check(const std::string& path, int cap) {
    LatticeMeasure m = load_measure_file(path);
    ValidationReport report = validate(m, cap);
    std::cout << render_validation(report);
    return report.all_ok() ? 0 : 1;
}

int cmd_approx(const std::string& path, std::int64_t n, const std::string& xs,
               const std::string& mode_str, double alpha) {
    LatticeMeasure m = load_measure_file(path);
    LatticePoint x = parse_point(xs, m.dim());
    Mode mode = parse_mode(mode_str);
    ApproxRow row = evaluate_point(m, n, x, mode, alpha);
    std::cout << "n: " << n << "\n"
              << "x: " << format_point(x, ',') << "\n"
              << "exact_dp: " << format_double(row.exact_dp) << "\n"
              << "exact_dft: " << format_double(row.exact_dft) << "\n"
              << "approximant(" << mode_str << "): " << format_double(row.approximant) << "\n"
              << "abs_error: " << format_double(row.abs_error) << "\n"
              << "weight: " << format_double(row.weight) << "\n";
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& ns, double alpha,
              const std::string& mode_str, const std::string& out, int jobs) {
    LatticeMeasure m = load_measure_file(path);
    SweepConfig config;
    config.measure_path = path;
    config.n_list = parse_i64_list(ns);
    config.alpha = alpha;
    config.mode = parse_mode(mode_str);
    config.out_path = out;
    config.parallelism = jobs;
    ErrorReport report = run_sweep(m, config);
    {
        std::ofstream csv(out + ".csv");
        csv << report_csv(report);
        std::ofstream json(out + ".json");
        json << report_json(report, config);
    }
    std::cout << "rows: " << report.rows.size() << "\n"
              << "C_hat: " << format_double(report.C_hat) << "\n"
              << "slope: " << format_double(report.slope.slope) << " +- "
              << format_double(report.slope.stderr_) << "\n"
              << "written: " << out << ".csv, " << out << ".json\n";
    if (report.failed) {
        std::cerr << "sweep failed: " << report.failure << "\n";
        return 1;
    }
    return 0;
}

int cmd_tilt(const std::string& path, const std::string& xis) {
    LatticeMeasure m = load_measure_file(path);
    auto xi = parse_double_list(xis);
    if (static_cast<int>(xi.size()) != m.dim())
        throw ConfigError("xi has wrong dimension for the measure");
    TiltSolution sol = solve_tilt(m, xi);
    std::cout << "t:";
    for (double v : sol.t) std::cout << " " << format_double(v);
    std::cout << "\n"
              << "log_Z: " << format_double(sol.logZ) << "\n"
              << "I: " << format_double(sol.rate) << "\n";
    std::cout << "V_xi:";
    for (Eigen::Index r = 0; r < sol.tilted_cov.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < sol.tilted_cov.matrix.cols(); ++c)
            std::cout << " " << format_double(sol.tilted_cov.matrix(r, c));
    std::cout << "\n"
              << "residual: " << format_double(sol.residual) << "\n"
              << "iterations: " << sol.iterations << "\n"
              << "tilted measure:\n"
              << serialize(sol.tilted);
    return 0;
}

int cmd_corollary(const std::string& path, const std::string& ns) {
    LatticeMeasure m = load_measure_file(path);
    auto rows = corollary_table(m, parse_i64_list(ns));
    std::cout << "n,x,exact,approx,diff,scaled\n";
    for (const auto& r : rows) {
        if (!r.valid) {
            std::cerr << "notice: n = " << r.n << " skipped (nE not a lattice point)\n";
            continue;
        }
        std::cout << r.n << "," << format_point(r.x) << "," << format_double(r.exact) << ","
                  << format_double(r.approx) << "," << format_double(r.diff) << ","
                  << format_double(r.scaled) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"local approximants and exact oracles for bounded-step lattice random walks"};
    app.require_subcommand(1);

    std::string path, xs, xis, ns, out;
    std::string mode_str = "theorem";
    double alpha = 0.25;
    std::int64_t n = 1;
    int jobs = 1;
    int cap = 64;

    auto* check = app.add_subcommand("check", "validate a measure file");
    check->add_option("file", path)->required();
    check->add_option("--cap", cap, "aperiodicity search cap");

    auto* approx = app.add_subcommand("approx", "exact vs approximant at one point");
    approx->add_option("file", path)->required();
    approx->add_option("--n", n)->required();
    approx->add_option("--x", xs, "lattice point, comma separated")->required();
    approx->add_option("--mode", mode_str);
    approx->add_option("--alpha", alpha);

    auto* sweep = app.add_subcommand("sweep", "error sweep over a list of n");
    sweep->add_option("file", path)->required();
    sweep->add_option("--n", ns, "comma separated n list")->required();
    sweep->add_option("--alpha", alpha);
    sweep->add_option("--mode", mode_str);
    sweep->add_option("--out", out, "output base path")->required();
    sweep->add_option("--jobs", jobs, "parallelism hint");

    auto* tilt = app.add_subcommand("tilt", "solve the tilt equation for a target mean");
    tilt->add_option("file", path)->required();
    tilt->add_option("--xi", xis, "target mean, comma separated")->required();

    auto* coro = app.add_subcommand("corollary", "scaled error at the mean over a list of n");
    coro->add_option("file", path)->required();
    coro->add_option("--n", ns, "comma separated n list")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(check)) return cmd_check(path, cap);
        if (app.got_subcommand(approx)) return cmd_approx(path, n, xs, mode_str, alpha);
        if (app.got_subcommand(sweep)) return cmd_sweep(path, ns, alpha, mode_str, out, jobs);
        if (app.got_subcommand(tilt)) return cmd_tilt(path, xis);
        if (app.got_subcommand(coro)) return cmd_corollary(path, ns);
    } catch (const lclt::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const lclt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

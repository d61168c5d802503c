#include "lclt/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "lclt/oracle.hpp"
#include "lclt/tilt.hpp"

namespace lclt {

namespace {

constexpr double kWeightFloor = 1e-280;  // cells below this go to the tail-bound check

}  // namespace

Mode parse_mode(const std::string& name) {
    if (name == "theorem") return Mode::theorem;
    if (name == "lemma") return Mode::lemma;
    if (name == "corollary") return Mode::corollary;
    if (name == "gaussian-only") return Mode::gaussian_only;
    throw ConfigError("unknown mode '" + name + "' (theorem|lemma|corollary|gaussian-only)");
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::theorem: return "theorem";
        case Mode::lemma: return "lemma";
        case Mode::corollary: return "corollary";
        case Mode::gaussian_only: return "gaussian-only";
    }
    return "?";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_point(const LatticePoint& x, char sep) {
    std::ostringstream os;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (j) os << sep;
        os << x[j];
    }
    return os.str();
}

std::string render_validation(const ValidationReport& r) {
    std::ostringstream os;
    os << "mass_ok: " << (r.mass_ok ? "yes" : "no") << "\n";
    os << "steplength_ok: " << (r.steplength_ok ? "yes" : "no") << "\n";
    os << "maximal: " << (r.maximal ? "yes" : "no") << "\n";
    os << "aperiodic: ";
    switch (r.aperiodic) {
        case Aperiodicity::yes: os << "yes"; break;
        case Aperiodicity::no: os << "no (period " << r.period << ")"; break;
        case Aperiodicity::undetermined: os << "undetermined (cap reached)"; break;
    }
    os << "\n";
    os << "mean:";
    for (double m : r.mean) os << " " << format_double(m);
    os << "\n";
    os << "gamma: " << format_double(r.gamma) << "\n";
    return os.str();
}

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    if (m < 3 || y.size() != m) throw PreconditionError("slope fit needs at least 3 points");
    double xb = 0.0, yb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        xb += x[i];
        yb += y[i];
    }
    xb /= m;
    yb /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xb) * (x[i] - xb);
        sxy += (x[i] - xb) * (y[i] - yb);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double resid = y[i] - yb - fit.slope * (x[i] - xb);
        ssr += resid * resid;
    }
    fit.stderr_ = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
    return fit;
}

namespace {

// Internal control flow: the row cannot be evaluated for this n (e.g.
// nE not a lattice point in corollary mode) but the sweep goes on.
struct SkipRow {
    std::string reason;
};

void check_config(const LatticeMeasure& m, const SweepConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 0.5))
        throw ConfigError("alpha must lie strictly inside (0, 1/2)");
    if (config.n_list.size() < 5)
        throw ConfigError("n list must carry at least 5 points for the slope fit");
    for (std::size_t i = 0; i < config.n_list.size(); ++i) {
        if (config.n_list[i] < 1) throw ConfigError("n values must be >= 1");
        if (i > 0 && config.n_list[i] <= config.n_list[i - 1])
            throw ConfigError("n list must be strictly increasing");
    }
    if (config.mode == Mode::theorem && !m.is_centered())
        throw PreconditionError("theorem mode requires a centered measure");
}

ErrorRow sweep_row(const LatticeMeasure& m, const EdgeworthModel& model, Mode mode,
                   double alpha, std::int64_t n) {
    ErrorRow row;
    row.n = n;
    const int d = m.dim();

    if (mode == Mode::corollary) {
        LatticePoint x(d);
        for (int j = 0; j < d; ++j) {
            const double target = static_cast<double>(n) * model.mean()[j];
            const double rounded = std::round(target);
            if (std::abs(target - rounded) > 1e-9)
                throw SkipRow{"corollary: nE is not a lattice point at n = " + std::to_string(n)};
            x[j] = static_cast<std::int64_t>(rounded);
        }
        ConvolvedMeasure exact = power_dp(m, n);
        const double approx = std::pow(2.0 * M_PI * static_cast<double>(n), -0.5 * d) /
                              std::sqrt(model.cov().determinant) *
                              (1.0 + model.corollary_constant() / static_cast<double>(n));
        row.sup_abs_err = std::abs(exact.measure.at(x) - approx);
        row.argmax_x = x;
        row.weighted_err = std::pow(static_cast<double>(n), 0.5 * (d + 3)) * row.sup_abs_err;
        return row;
    }

    ConvolvedMeasure exact = power_dp(m, n);
    row.argmax_x.assign(d, 0);
    double weighted_max = 0.0;

    // Iterate the reachable box [n min_j, n max_j]^d rather than the stored
    // support: deep-tail cells flushed below 1e-300 still belong to the
    // weight-floor / tail-bound route.
    std::vector<std::int64_t> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
        std::int64_t cmin = m.entries().front().first[j], cmax = cmin;
        for (const auto& [x, p] : m.entries()) {
            cmin = std::min(cmin, x[j]);
            cmax = std::max(cmax, x[j]);
        }
        lo[j] = n * cmin;
        hi[j] = n * cmax;
    }
    LatticePoint x(lo.begin(), lo.end());
    bool done = false;
    while (!done) {
        const double p = exact.measure.at(x);
        double approx = 0.0;
        switch (mode) {
            case Mode::theorem: approx = model.theorem_approximant(n, x); break;
            case Mode::lemma: approx = model.lemma_approximant(n, x); break;
            case Mode::gaussian_only: approx = model.gaussian_approximant(n, x); break;
            case Mode::corollary: break;
        }
        const double err = std::abs(p - approx);
        if (err > row.sup_abs_err) {
            row.sup_abs_err = err;
            row.argmax_x = x;
        }
        if (mode == Mode::theorem) {
            const double weight = std::pow(static_cast<double>(n), -1.0 - alpha) *
                                  comparison_gaussian(d, m.steplength(), n, x);
            if (weight >= kWeightFloor) {
                weighted_max = std::max(weighted_max, err / weight);
            } else {
                ++row.skipped_cells;
                if (p > tail_bound(m, n, x))
                    throw BoundViolation("tail bound violated at skipped cell n=" +
                                         std::to_string(n) + " x=" + format_point(x, ','));
            }
        }
        done = true;
        for (int j = d - 1; j >= 0; --j) {
            if (++x[j] <= hi[j]) {
                done = false;
                break;
            }
            x[j] = lo[j];
        }
    }
    switch (mode) {
        case Mode::theorem: row.weighted_err = weighted_max; break;
        case Mode::lemma:
            row.weighted_err = std::pow(static_cast<double>(n), 0.5 * (d + 3)) * row.sup_abs_err;
            break;
        case Mode::gaussian_only:
            row.weighted_err = std::pow(static_cast<double>(n), 0.5 * (d + 1)) * row.sup_abs_err;
            break;
        case Mode::corollary: break;
    }
    return row;
}

}  // namespace

ErrorReport run_sweep(const LatticeMeasure& m, const SweepConfig& config) {
    check_config(m, config);
    EdgeworthModel model = EdgeworthModel::build(m);

    ErrorReport report;
    std::vector<std::string> errors(config.n_list.size());
    std::vector<ErrorRow> rows(config.n_list.size());
    std::vector<bool> ok(config.n_list.size(), false);

    auto task = [&](std::size_t i) {
        try {
            rows[i] = sweep_row(m, model, config.mode, config.alpha, config.n_list[i]);
            ok[i] = true;
        } catch (const SkipRow&) {
            // dropped row, not a failure
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };

    if (config.parallelism > 1) {
        std::vector<std::future<void>> futures;
        futures.reserve(config.n_list.size());
        for (std::size_t i = 0; i < config.n_list.size(); ++i)
            futures.push_back(std::async(std::launch::async, task, i));
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < config.n_list.size(); ++i) task(i);
    }

    for (std::size_t i = 0; i < config.n_list.size(); ++i) {
        if (ok[i]) {
            report.rows.push_back(rows[i]);
        } else if (!errors[i].empty() && !report.failed) {
            report.failed = true;
            report.failure = errors[i];
        }
    }
    report.C_hat = 0.0;
    for (const auto& r : report.rows) report.C_hat = std::max(report.C_hat, r.weighted_err);
    std::vector<double> lx, ly;
    for (const auto& r : report.rows)
        if (r.sup_abs_err > 0.0) {
            lx.push_back(std::log(static_cast<double>(r.n)));
            ly.push_back(std::log(r.sup_abs_err));
        }
    if (lx.size() >= 3) report.slope = fit_loglog_slope(lx, ly);
    return report;
}

std::string report_csv(const ErrorReport& report) {
    std::ostringstream os;
    os << "n,sup_abs_err,argmax_x,weighted_err,skipped_cells\n";
    for (const auto& r : report.rows)
        os << r.n << "," << format_double(r.sup_abs_err) << "," << format_point(r.argmax_x)
           << "," << format_double(r.weighted_err) << "," << r.skipped_cells << "\n";
    if (report.failed) os << "# FAILED: " << report.failure << "\n";
    return os.str();
}

std::string report_json(const ErrorReport& report, const SweepConfig& config) {
    nlohmann::ordered_json j;
    j["measure"] = config.measure_path;
    j["mode"] = mode_name(config.mode);
    j["alpha"] = config.alpha;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["n"] = r.n;
        row["sup_abs_err"] = r.sup_abs_err;
        row["argmax_x"] = r.argmax_x;
        row["weighted_err"] = r.weighted_err;
        row["skipped_cells"] = r.skipped_cells;
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["C_hat"] = report.C_hat;
    j["slope"] = report.slope.slope;
    j["slope_stderr"] = report.slope.stderr_;
    if (report.failed) {
        j["failed"] = true;
        j["failure"] = report.failure;
    }
    return j.dump(2) + "\n";
}

ApproxRow evaluate_point(const LatticeMeasure& m, std::int64_t n, const LatticePoint& x,
                         Mode mode, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("alpha must lie strictly inside (0, 1/2)");
    EdgeworthModel model = EdgeworthModel::build(m);
    ApproxRow row;
    row.exact_dp = power_dp(m, n).measure.at(x);
    row.exact_dft = power_dft(m, n).measure.at(x);
    switch (mode) {
        case Mode::theorem: row.approximant = model.theorem_approximant(n, x); break;
        case Mode::lemma: row.approximant = model.lemma_approximant(n, x); break;
        case Mode::gaussian_only: row.approximant = model.gaussian_approximant(n, x); break;
        case Mode::corollary:
            row.approximant = std::pow(2.0 * M_PI * static_cast<double>(n), -0.5 * m.dim()) /
                              std::sqrt(model.cov().determinant) *
                              (1.0 + model.corollary_constant() / static_cast<double>(n));
            break;
    }
    row.abs_error = std::abs(row.exact_dp - row.approximant);
    row.weight = std::pow(static_cast<double>(n), -1.0 - alpha) *
                 comparison_gaussian(m.dim(), m.steplength(), n, x);
    return row;
}

std::vector<CorollaryRow> corollary_table(const LatticeMeasure& m,
                                          const std::vector<std::int64_t>& n_list) {
    EdgeworthModel model = EdgeworthModel::build(m);
    const int d = m.dim();
    std::vector<CorollaryRow> rows;
    rows.reserve(n_list.size());
    for (std::int64_t n : n_list) {
        CorollaryRow row;
        row.n = n;
        row.x.assign(d, 0);
        bool integral = true;
        for (int j = 0; j < d; ++j) {
            const double target = static_cast<double>(n) * model.mean()[j];
            const double rounded = std::round(target);
            if (std::abs(target - rounded) > 1e-9) {
                integral = false;
                break;
            }
            row.x[j] = static_cast<std::int64_t>(rounded);
        }
        row.valid = integral;
        if (integral) {
            row.exact = power_dp(m, n).measure.at(row.x);
            row.approx = std::pow(2.0 * M_PI * static_cast<double>(n), -0.5 * d) /
                         std::sqrt(model.cov().determinant) *
                         (1.0 + model.corollary_constant() / static_cast<double>(n));
            row.diff = row.exact - row.approx;
            row.scaled = std::pow(static_cast<double>(n), 0.5 * (d + 3)) * std::abs(row.diff);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lclt

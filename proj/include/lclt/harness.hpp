#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lclt/edgeworth.hpp"
#include "lclt/measure.hpp"

namespace lclt {

enum class Mode { theorem, lemma, corollary, gaussian_only };

Mode parse_mode(const std::string& name);  // ConfigError on unknown name
std::string mode_name(Mode mode);

struct SweepConfig {
    std::string measure_path;
    std::vector<std::int64_t> n_list;  // strictly increasing, >= 1, at least 5 entries
    double alpha = 0.25;               // in (0, 1/2) strictly
    Mode mode = Mode::theorem;
    std::string out_path;              // base path; writes <out>.csv and <out>.json
    int parallelism = 1;
};

struct ErrorRow {
    std::int64_t n = 0;
    double sup_abs_err = 0.0;
    LatticePoint argmax_x;
    /// mode=theorem: E(n) = max |err(x)| / (n^{-1-alpha} phi_{2dl^2 n}(x))
    /// over cells with weight >= 1e-280; other modes: sup_abs_err scaled
    /// by the mode's target rate (n^{(d+3)/2}, gaussian-only n^{(d+1)/2}).
    double weighted_err = 0.0;
    std::int64_t skipped_cells = 0;
};

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
    double C_hat = 0.0;  // max over rows of weighted_err
    SlopeFit slope;      // least squares on (log n, log sup_abs_err)
    bool failed = false; // partial results after an aborted sweep
    std::string failure;
};

/// Least-squares slope with standard error; needs at least 3 points.
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Full sweep over config.n_list. Skipped theorem-mode cells (weight
/// below 1e-280) are verified against the Gaussian tail bound; a
/// violation aborts with BoundViolation. Deterministic output for any
/// parallelism setting.
ErrorReport run_sweep(const LatticeMeasure& m, const SweepConfig& config);

std::string report_csv(const ErrorReport& report);
std::string report_json(const ErrorReport& report, const SweepConfig& config);

struct ApproxRow {
    double exact_dp = 0.0;
    double exact_dft = 0.0;
    double approximant = 0.0;
    double abs_error = 0.0;  // |exact_dp - approximant|
    double weight = 0.0;     // n^{-1-alpha} phi_{2dl^2 n}(x)
};

ApproxRow evaluate_point(const LatticeMeasure& m, std::int64_t n, const LatticePoint& x,
                         Mode mode, double alpha = 0.25);

struct CorollaryRow {
    std::int64_t n = 0;
    bool valid = false;  // nE integral for this n
    LatticePoint x;      // nE when valid
    double exact = 0.0;
    double approx = 0.0;  // (2 pi n)^{-d/2} (det V)^{-1/2} (1 + L/n)
    double diff = 0.0;
    double scaled = 0.0;  // n^{(d+3)/2} |diff|
};

std::vector<CorollaryRow> corollary_table(const LatticeMeasure& m,
                                          const std::vector<std::int64_t>& n_list);

// Fixed-format rendering used by the CLI (stable for golden tests).
std::string format_double(double v);  // shortest-17-digit scientific
std::string format_point(const LatticePoint& x, char sep = ';');
std::string render_validation(const ValidationReport& report);

}  // namespace lclt

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "lclt/measure.hpp"
#include "lclt/oracle.hpp"

namespace lclt {

/// Result of solving D log Z(t) = xi for an interior target mean xi.
struct TiltSolution {
    std::vector<double> xi;
    std::vector<double> t;       // t_xi
    double logZ = 0.0;           // log Z(t_xi)
    double rate = 0.0;           // I(xi) = t_xi . xi - log Z(t_xi) >= 0
    LatticeMeasure tilted;       // G_{t_xi}, same support as the base measure
    CovarianceMatrix tilted_cov; // V_xi
    int iterations = 0;
    double residual = 0.0;       // |D log Z(t_xi) - xi|
};

struct TiltOptions {
    double tolerance = 1e-12;         // Newton convergence on |D log Z(t) - xi|
    double accept_tolerance = 1e-11;  // stagnation fallback threshold
    int max_iterations = 200;
};

/// Z(t) = sum_x e^{t.x} G(x). Throws OverflowError when the value
/// exceeds double range; log_partition_fn never overflows.
double partition_fn(const LatticeMeasure& m, const std::vector<double>& t);
double log_partition_fn(const LatticeMeasure& m, const std::vector<double>& t);

/// Gradient and Hessian of log Z at t: the mean and covariance of the
/// tilted measure, computed in one stabilized pass (max-shifted weights).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> grad_hess_log_Z(const LatticeMeasure& m,
                                                            const std::vector<double>& t);

/// G_t(x) = G(x) e^{t.x} / Z(t); same support, steplength unchanged.
LatticeMeasure tilt_measure(const LatticeMeasure& m, const std::vector<double>& t);

/// Damped Newton iteration on F(t) = D log Z(t) - xi from t = 0 with
/// Armijo backtracking on |F|. Requires a maximal measure and an
/// interior xi (NotInterior otherwise); NoConvergence after the
/// iteration cap.
TiltSolution solve_tilt(const LatticeMeasure& m, const std::vector<double>& xi,
                        const TiltOptions& opts = {});

/// I(xi) = sup_t { t.xi - log Z(t) }, evaluated through solve_tilt.
double rate_fn(const LatticeMeasure& m, const std::vector<double>& xi);

/// Splits G^{*n}(x) = exp[-n I(xi)] * G_{t_xi}^{*n}(x) at xi = x/n.
/// Returns (rate_part, local_part); the local part comes from the dp
/// oracle applied to the tilted measure.
std::pair<double, double> factorize(const LatticeMeasure& m, std::int64_t n,
                                    const LatticePoint& x, const OracleLimits& limits = {});

/// exp[-|x|^2 / (2 d l^2 n)]; requires a centered measure. Callers
/// assert G^{*n}(x) <= tail_bound(m, n, x).
double tail_bound(const LatticeMeasure& m, std::int64_t n, const LatticePoint& x);

/// phi_eta(x) = (2 pi eta)^{-d/2} exp[-|x|^2/(2 eta)] with eta = 2 d l^2 n.
double comparison_gaussian(int dim, std::int64_t steplength, std::int64_t n,
                           const LatticePoint& x);

}  // namespace lclt

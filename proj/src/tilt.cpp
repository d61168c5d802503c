#include "lclt/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lclt {

namespace {

struct LogZ {
    double value = 0.0;       // log Z(t)
    Eigen::VectorXd grad;     // mean of the tilted measure
    Eigen::MatrixXd hess;     // covariance of the tilted measure
    std::vector<double> weights;  // tilted probabilities, entry order
};

// Stabilized by subtracting max t.x over the support before exponentiating.
LogZ log_z(const LatticeMeasure& m, const std::vector<double>& t, bool with_derivatives) {
    if (static_cast<int>(t.size()) != m.dim())
        throw DimensionMismatch("log Z: tilt vector has wrong dimension");
    const int d = m.dim();
    const auto& entries = m.entries();
    double shift = -std::numeric_limits<double>::infinity();
    std::vector<double> dots(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        double dot = 0.0;
        for (int j = 0; j < d; ++j) dot += t[j] * static_cast<double>(entries[i].first[j]);
        dots[i] = dot;
        shift = std::max(shift, dot);
    }
    double s = 0.0;
    std::vector<double> w(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        w[i] = std::exp(dots[i] - shift) * entries[i].second;
        s += w[i];
    }
    LogZ out;
    out.value = shift + std::log(s);
    if (!with_derivatives) return out;
    for (double& wi : w) wi /= s;
    out.grad = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (int j = 0; j < d; ++j) out.grad[j] += w[i] * static_cast<double>(entries[i].first[j]);
    out.hess = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd centered(d);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (int j = 0; j < d; ++j) centered[j] = static_cast<double>(entries[i].first[j]) - out.grad[j];
        out.hess.noalias() += w[i] * centered * centered.transpose();
    }
    out.weights = std::move(w);
    return out;
}

double sq_norm(const LatticePoint& x) {
    double s = 0.0;
    for (auto c : x) s += static_cast<double>(c) * static_cast<double>(c);
    return s;
}

}  // namespace

double log_partition_fn(const LatticeMeasure& m, const std::vector<double>& t) {
    return log_z(m, t, false).value;
}

double partition_fn(const LatticeMeasure& m, const std::vector<double>& t) {
    const double lz = log_partition_fn(m, t);
    if (lz > 709.0) throw OverflowError("partition_fn: Z(t) overflows double range");
    return std::exp(lz);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> grad_hess_log_Z(const LatticeMeasure& m,
                                                            const std::vector<double>& t) {
    LogZ z = log_z(m, t, true);
    return {std::move(z.grad), std::move(z.hess)};
}

LatticeMeasure tilt_measure(const LatticeMeasure& m, const std::vector<double>& t) {
    LogZ z = log_z(m, t, true);
    std::vector<LatticeMeasure::Entry> entries;
    entries.reserve(m.support_size());
    for (std::size_t i = 0; i < m.entries().size(); ++i)
        entries.emplace_back(m.entries()[i].first, z.weights[i]);
    return LatticeMeasure(m.dim(), m.steplength(), std::move(entries));
}

TiltSolution solve_tilt(const LatticeMeasure& m, const std::vector<double>& xi,
                        const TiltOptions& opts) {
    if (static_cast<int>(xi.size()) != m.dim())
        throw DimensionMismatch("solve_tilt: target has wrong dimension");
    SupportHull hull = support_hull(m);
    if (!hull_contains_interior(hull, xi))
        throw NotInterior("solve_tilt: xi is not interior to the support hull");

    const int d = m.dim();
    Eigen::VectorXd xiv = Eigen::Map<const Eigen::VectorXd>(xi.data(), d);
    std::vector<double> t(d, 0.0);
    LogZ z = log_z(m, t, true);
    double residual = (z.grad - xiv).norm();
    int iter = 0;
    while (residual > opts.tolerance && iter < opts.max_iterations) {
        ++iter;
        Eigen::VectorXd f = z.grad - xiv;
        Eigen::VectorXd step = z.hess.ldlt().solve(-f);
        // Armijo backtracking on |F|.
        double lambda = 1.0;
        bool accepted = false;
        std::vector<double> trial(d);
        while (lambda >= 1e-10) {
            for (int j = 0; j < d; ++j) trial[j] = t[j] + lambda * step[j];
            LogZ zt = log_z(m, trial, true);
            const double r_new = (zt.grad - xiv).norm();
            if (r_new <= (1.0 - 1e-4 * lambda) * residual) {
                t = trial;
                z = std::move(zt);
                residual = r_new;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;  // stagnation at float resolution
    }
    if (residual > opts.accept_tolerance)
        throw NoConvergence("solve_tilt: Newton did not reach tolerance (xi too close to the boundary?)");

    LatticeMeasure tilted = tilt_measure(m, t);
    TiltSolution sol{xi, t, z.value, 0.0, tilted, covariance(tilted), iter, residual};
    double rate = -z.value;
    for (int j = 0; j < d; ++j) rate += t[j] * xi[j];
    if (rate < 0.0) {
        if (rate < -1e-12) throw NumericalFailure("solve_tilt: negative rate");
        rate = 0.0;
    }
    sol.rate = rate;
    return sol;
}

double rate_fn(const LatticeMeasure& m, const std::vector<double>& xi) {
    return solve_tilt(m, xi).rate;
}

std::pair<double, double> factorize(const LatticeMeasure& m, std::int64_t n,
                                    const LatticePoint& x, const OracleLimits& limits) {
    if (n < 1) throw PreconditionError("factorize: n must be >= 1");
    if (static_cast<int>(x.size()) != m.dim())
        throw DimensionMismatch("factorize: point has wrong dimension");
    std::vector<double> xi(m.dim());
    for (int j = 0; j < m.dim(); ++j) xi[j] = static_cast<double>(x[j]) / static_cast<double>(n);
    TiltSolution sol = solve_tilt(m, xi);
    const double rate_part = std::exp(-static_cast<double>(n) * sol.rate);
    const double local_part = power_dp(sol.tilted, n, false, limits).measure.at(x);
    return {rate_part, local_part};
}

double tail_bound(const LatticeMeasure& m, std::int64_t n, const LatticePoint& x) {
    if (n < 1) throw PreconditionError("tail_bound: n must be >= 1");
    if (!m.is_centered()) throw PreconditionError("tail_bound: measure mean must be zero");
    if (static_cast<int>(x.size()) != m.dim())
        throw DimensionMismatch("tail_bound: point has wrong dimension");
    const double l2 = static_cast<double>(m.steplength()) * static_cast<double>(m.steplength());
    return std::exp(-sq_norm(x) / (2.0 * m.dim() * l2 * static_cast<double>(n)));
}

double comparison_gaussian(int dim, std::int64_t steplength, std::int64_t n,
                           const LatticePoint& x) {
    if (n < 1) throw PreconditionError("comparison_gaussian: n must be >= 1");
    if (static_cast<int>(x.size()) != dim)
        throw DimensionMismatch("comparison_gaussian: point has wrong dimension");
    const double eta = 2.0 * dim * static_cast<double>(steplength) *
                       static_cast<double>(steplength) * static_cast<double>(n);
    return std::pow(2.0 * M_PI * eta, -0.5 * dim) * std::exp(-sq_norm(x) / (2.0 * eta));
}

}  // namespace lclt

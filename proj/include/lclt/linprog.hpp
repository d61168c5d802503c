#pragma once

#include <cstdint>
#include <vector>

namespace lclt {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    std::vector<double> x;
};

/// Dense two-phase simplex with Bland's rule:
///   maximize c.x  subject to  A x = b, x >= 0.
/// Sized for the tiny geometry subproblems in this library (tens of
/// variables); not a general-purpose LP solver.
LpResult solve_lp(const std::vector<double>& c,
                  const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b);

/// Largest mu such that xi = sum_i lambda_i p_i with sum lambda_i = 1 and
/// lambda_i >= mu. Positive iff xi lies in the relative interior of the
/// convex hull of the points; negative return means xi is outside.
double relative_interior_margin(const std::vector<std::vector<double>>& points,
                                const std::vector<double>& xi);

/// True iff point p is an extreme point of conv(points); p must be one of
/// the points.
bool is_extreme_point(const std::vector<std::vector<double>>& points, std::size_t p);

}  // namespace lclt

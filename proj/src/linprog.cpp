#include "lclt/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lclt/errors.hpp"

namespace lclt {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

struct Tableau {
    // rows 0..m-1: constraints [B^-1 A | B^-1 b]; row m: [z_j - c_j | z]
    std::vector<std::vector<double>> t;
    std::vector<int> basis;
    int m = 0, n = 0;

    void pivot(int row, int col) {
        const double p = t[row][col];
        for (double& v : t[row]) v /= p;
        for (int r = 0; r <= m; ++r) {
            if (r == row) continue;
            const double f = t[r][col];
            if (f == 0.0) continue;
            for (int c = 0; c <= n; ++c) t[r][c] -= f * t[row][c];
        }
        basis[row] = col;
    }

    // Bland's rule; returns false at optimality, throws on unbounded.
    bool step() {
        int col = -1;
        for (int c = 0; c < n; ++c)
            if (t[m][c] < -kPivotTol) {
                col = c;
                break;
            }
        if (col < 0) return false;
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            if (t[r][col] <= kPivotTol) continue;
            const double ratio = t[r][n] / t[r][col];
            if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 &&
                                         (row < 0 || basis[r] < basis[row]))) {
                best = ratio;
                row = r;
            }
        }
        if (row < 0) throw NumericalFailure("simplex: unbounded direction");
        pivot(row, col);
        return true;
    }
};

}  // namespace

LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());
    Tableau tab;
    tab.m = m;
    tab.n = n + m;  // phase-1 artificials appended
    tab.t.assign(m + 1, std::vector<double>(tab.n + 1, 0.0));
    tab.basis.assign(m, 0);
    for (int r = 0; r < m; ++r) {
        const double sign = (b[r] < 0.0) ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) tab.t[r][j] = sign * A[r][j];
        tab.t[r][n + r] = 1.0;
        tab.t[r][tab.n] = sign * b[r];
        tab.basis[r] = n + r;
    }
    // Phase 1: maximize -(sum of artificials); z_j - c_j rows for that objective.
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += tab.t[r][j];
        tab.t[m][j] = -s;
    }
    double rhs_sum = 0.0;
    for (int r = 0; r < m; ++r) rhs_sum += tab.t[r][tab.n];
    tab.t[m][tab.n] = -rhs_sum;

    while (tab.step()) {}
    if (tab.t[m][tab.n] < -kFeasTol) return {LpStatus::infeasible, 0.0, {}};

    // Drive remaining artificials out of the basis; drop redundant rows.
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab.t[r][j]) > kPivotTol) {
                col = j;
                break;
            }
        if (col >= 0) tab.pivot(r, col);
    }

    // Phase 2 objective over the real columns only.
    for (int j = 0; j < tab.n; ++j) tab.t[m][j] = 0.0;
    tab.t[m][tab.n] = 0.0;
    for (int j = 0; j < n; ++j) tab.t[m][j] = -c[j];
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] >= n) continue;  // redundant row, artificial stuck at zero
        const double cb = c[tab.basis[r]];
        if (cb == 0.0) continue;
        for (int j = 0; j <= tab.n; ++j) tab.t[m][j] += cb * tab.t[r][j];
    }
    // Block artificial columns from re-entering.
    for (int r = 0; r <= m; ++r)
        for (int j = n; j < tab.n; ++j) tab.t[r][j] = 0.0;

    LpResult res;
    try {
        while (tab.step()) {}
    } catch (const NumericalFailure&) {
        res.status = LpStatus::unbounded;
        return res;
    }
    res.status = LpStatus::optimal;
    res.value = tab.t[m][tab.n];
    res.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) res.x[tab.basis[r]] = tab.t[r][tab.n];
    return res;
}

double relative_interior_margin(const std::vector<std::vector<double>>& points,
                                const std::vector<double>& xi) {
    if (points.empty()) return -1.0;
    const int d = static_cast<int>(xi.size());
    const int np = static_cast<int>(points.size());
    // Variables: mu, s_1..s_N >= 0 with lambda_i = mu + s_i.
    // Rows: sum_i lambda_i p_i = xi (d rows), sum_i lambda_i = 1.
    std::vector<std::vector<double>> A(d + 1, std::vector<double>(np + 1, 0.0));
    std::vector<double> b(d + 1, 0.0);
    for (int r = 0; r < d; ++r) {
        double colsum = 0.0;
        for (int i = 0; i < np; ++i) {
            A[r][i + 1] = points[i][r];
            colsum += points[i][r];
        }
        A[r][0] = colsum;
        b[r] = xi[r];
    }
    for (int i = 0; i < np; ++i) A[d][i + 1] = 1.0;
    A[d][0] = static_cast<double>(np);
    b[d] = 1.0;
    std::vector<double> c(np + 1, 0.0);
    c[0] = 1.0;
    LpResult res = solve_lp(c, A, b);
    if (res.status != LpStatus::optimal) return -1.0;
    return res.value;
}

bool is_extreme_point(const std::vector<std::vector<double>>& points, std::size_t p) {
    const int d = static_cast<int>(points[p].size());
    const int np = static_cast<int>(points.size());
    if (np == 1) return true;
    // Feasibility of p = sum_{i != p} lambda_i points[i], sum lambda = 1, lambda >= 0.
    std::vector<std::vector<double>> A(d + 1, std::vector<double>(np - 1, 0.0));
    std::vector<double> b(d + 1, 0.0);
    int col = 0;
    for (int i = 0; i < np; ++i) {
        if (i == static_cast<int>(p)) continue;
        for (int r = 0; r < d; ++r) A[r][col] = points[i][r];
        A[d][col] = 1.0;
        ++col;
    }
    for (int r = 0; r < d; ++r) b[r] = points[p][r];
    b[d] = 1.0;
    std::vector<double> c(np - 1, 0.0);
    LpResult res = solve_lp(c, A, b);
    return res.status == LpStatus::infeasible;
}

}  // namespace lclt

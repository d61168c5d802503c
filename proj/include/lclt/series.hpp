#pragma once

#include <memory>
#include <vector>

#include "lclt/multi_index.hpp"

namespace lclt {

/// Real-coefficient polynomial / truncated power series over the dense
/// multi-index set {|nu| <= max_degree}. All ring operations truncate at
/// max_degree. Also used for coefficient maps of differential operators.
class TruncatedSeries {
  public:
    TruncatedSeries(int dim, int max_degree);
    static TruncatedSeries constant(int dim, int max_degree, double c);

    int dim() const { return table_->dim(); }
    int max_degree() const { return table_->max_degree(); }
    const MultiIndexTable& table() const { return *table_; }

    double coeff(const MultiIndex& nu) const;
    void set_coeff(const MultiIndex& nu, double c);
    double coeff_at(std::size_t i) const { return coeffs_[i]; }
    void set_coeff_at(std::size_t i, double c) { coeffs_[i] = c; }

    TruncatedSeries& operator+=(const TruncatedSeries& other);
    TruncatedSeries& operator-=(const TruncatedSeries& other);
    TruncatedSeries& operator*=(double s);
    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    friend TruncatedSeries operator*(TruncatedSeries a, double s) { return a *= s; }
    friend TruncatedSeries operator*(double s, TruncatedSeries a) { return a *= s; }
    TruncatedSeries operator*(const TruncatedSeries& other) const;  // truncating product

    TruncatedSeries derivative(int axis) const;
    double evaluate(const std::vector<double>& x) const;

    /// Largest |coefficient| over monomials whose total degree has the
    /// given parity (0 = even, 1 = odd).
    double max_abs_coeff_of_parity(int parity) const;
    bool is_zero(double tol = 0.0) const;

  private:
    std::shared_ptr<const MultiIndexTable> table_;
    std::vector<double> coeffs_;
};

/// Formal logarithm of a series with constant term 1, via the truncated
/// alternating sum  log s = sum_{k>=1} (-1)^{k+1} (s-1)^k / k.
/// Throws PreconditionError when the constant term differs from 1.
TruncatedSeries series_log(const TruncatedSeries& s);

}  // namespace lclt

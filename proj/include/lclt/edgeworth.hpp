#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "lclt/measure.hpp"
#include "lclt/series.hpp"

namespace lclt {

/// Cumulants chi_nu for 1 <= |nu| <= 4, extracted from the formal log of
/// the moment series. chi_{e_j} is the mean, the order-2 cumulants
/// assemble the covariance matrix.
struct CumulantTable {
    std::shared_ptr<const MultiIndexTable> indices;  // degree-4 table
    std::vector<double> values;                      // chi_nu, zero at nu = 0

    double cumulant(const MultiIndex& nu) const { return values[indices->index_of(nu)]; }
    std::vector<double> mean() const;
    Eigen::MatrixXd covariance() const;
};

/// chi_r(z) = sum_{|nu|=r} (r!/nu!) chi_nu z^nu, homogeneous of degree r.
struct CumulantPolynomial {
    int order = 0;
    TruncatedSeries poly;
};

CumulantTable cumulants(const MomentTable& mom);
CumulantPolynomial cumulant_polynomial(const CumulantTable& table, int r);

/// Centered normal density with covariance V.
double gaussian_density(const CovarianceMatrix& V, const std::vector<double>& x);

/// Polynomial h_nu with D^nu phi_V = h_nu phi_V, computed from
///   h_{nu+e_j}(x) = d_j h_nu(x) - (V^{-1} x)_j h_nu(x),  h_0 = 1.
/// Supports |nu| <= 6.
TruncatedSeries hermite_factor(const CovarianceMatrix& V, const MultiIndex& nu);

/// Applies the constant-coefficient operator sum_nu c_nu D^nu to phi_V
/// at x: returns sum_nu c_nu h_nu(x) phi_V(x). Coefficients live in op
/// (a series in the symbol variable), all |nu| <= 6.
double apply_operator(const TruncatedSeries& op, const CovarianceMatrix& V,
                      const std::vector<double>& x);

/// Degree-6 operator whose symbol is chi_3(z)^2. Applying it to the
/// normal density with doubled covariance reproduces the self-convolution
/// (chi_3(D) phi_V) * (chi_3(D) phi_V), since transforms multiply.
TruncatedSeries squared_operator(const CumulantPolynomial& chi3);

/// Order-2 Cramer-Edgeworth machinery for one measure: Gaussian
/// parameters, cumulants, the correction polynomials and the scalar
/// constant L appearing in the n^{-1} term at the mean.
class EdgeworthModel {
  public:
    /// Requires a maximal measure (positive definite covariance).
    static EdgeworthModel build(const LatticeMeasure& m);

    int dim() const { return dim_; }
    const std::vector<double>& mean() const { return mean_; }
    const CovarianceMatrix& cov() const { return cov_; }
    const CumulantTable& cumulant_table() const { return cumulants_; }
    const TruncatedSeries& q3() const { return q3_; }    // chi_3(D) phi_V / phi_V, odd
    const TruncatedSeries& q4() const { return q4_; }    // chi_4(D) phi_V / phi_V, even
    const TruncatedSeries& q33() const { return q33_; }  // squared-symbol term, even
    double corollary_constant() const { return L_; }     // L = q4(0)/24 + q33(0)/72

    /// P3 = -q3/6 (odd), P6 = q4/24 + q33/72 (even); requires mean zero.
    std::pair<TruncatedSeries, TruncatedSeries> theorem_polynomials() const;

    /// n^{-d/2} [1 - q3(y)/(6 sqrt n) + q4(y)/(24 n) + q33(y)/(72 n)] phi_V(y)
    /// at y = (x - nE)/sqrt(n).
    double lemma_approximant(std::int64_t n, const LatticePoint& x) const;

    /// [1 + P3(y)/sqrt(n) + P6(y)/n] phi_{nV}(x) with y = x/sqrt(n);
    /// requires mean zero. Algebraically identical to lemma_approximant.
    double theorem_approximant(std::int64_t n, const LatticePoint& x) const;

    /// Plain local Gaussian n^{-d/2} phi_V((x - nE)/sqrt(n)) = phi_{nV}(x - nE).
    double gaussian_approximant(std::int64_t n, const LatticePoint& x) const;

    /// Diagnostic dump with fixed key order (JSON text).
    std::string dump() const;

  private:
    EdgeworthModel() = default;

    void require_centered(const char* op) const;

    int dim_ = 0;
    std::vector<double> mean_;
    CovarianceMatrix cov_;
    CumulantTable cumulants_;
    TruncatedSeries q3_{1, 6}, q4_{1, 6}, q33_{1, 6};
    TruncatedSeries p3_{1, 6}, p6_{1, 6};
    double L_ = 0.0;
    bool centered_ = false;
};

}  // namespace lclt

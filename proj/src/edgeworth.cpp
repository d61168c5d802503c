#include "lclt/edgeworth.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <map>

namespace lclt {

namespace {

constexpr int kOperatorDegree = 6;  // highest derivative order in use (chi_3 squared)

TruncatedSeries moment_series(const MomentTable& mom) {
    const int d = mom.indices->dim();
    TruncatedSeries s(d, mom.indices->max_degree());
    for (std::size_t i = 0; i < mom.indices->size(); ++i) {
        const MultiIndex& nu = mom.indices->at(i);
        s.set_coeff(nu, mom.values[i] / multi_index_factorial(nu));
    }
    return s;
}

// Linear form (A x)_row as a degree-capped polynomial.
TruncatedSeries linear_form(const Eigen::MatrixXd& A, int row, int degree) {
    const int d = static_cast<int>(A.cols());
    TruncatedSeries s(d, degree);
    MultiIndex e(d, 0);
    for (int k = 0; k < d; ++k) {
        e[k] = 1;
        s.set_coeff(e, A(row, k));
        e[k] = 0;
    }
    return s;
}

}  // namespace

std::vector<double> CumulantTable::mean() const {
    const int d = indices->dim();
    std::vector<double> e(d, 0.0);
    MultiIndex nu(d, 0);
    for (int j = 0; j < d; ++j) {
        nu[j] = 1;
        e[j] = cumulant(nu);
        nu[j] = 0;
    }
    return e;
}

Eigen::MatrixXd CumulantTable::covariance() const {
    const int d = indices->dim();
    Eigen::MatrixXd V(d, d);
    MultiIndex nu(d, 0);
    for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) {
            nu.assign(d, 0);
            nu[j] += 1;
            nu[k] += 1;
            V(j, k) = V(k, j) = cumulant(nu);
        }
    return V;
}

CumulantTable cumulants(const MomentTable& mom) {
    if (mom.indices->max_degree() < 4)
        throw PreconditionError("cumulants: moment table must reach order 4");
    TruncatedSeries logs = series_log(moment_series(mom));
    CumulantTable out;
    out.indices = mom.indices->max_degree() == 4
                      ? mom.indices
                      : MultiIndexTable::get(mom.indices->dim(), 4);
    out.values.assign(out.indices->size(), 0.0);
    for (std::size_t i = 1; i < out.indices->size(); ++i) {
        const MultiIndex& nu = out.indices->at(i);
        out.values[i] = logs.coeff(nu) * multi_index_factorial(nu);
    }
    return out;
}

CumulantPolynomial cumulant_polynomial(const CumulantTable& table, int r) {
    if (r < 1 || r > 4) throw PreconditionError("cumulant_polynomial: r must be in 1..4");
    const int d = table.indices->dim();
    CumulantPolynomial out{r, TruncatedSeries(d, kOperatorDegree)};
    const double rfact = factorial(r);
    for (std::size_t i = 0; i < table.indices->size(); ++i) {
        const MultiIndex& nu = table.indices->at(i);
        if (order_of(nu) != r) continue;
        out.poly.set_coeff(nu, rfact / multi_index_factorial(nu) * table.values[i]);
    }
    return out;
}

double gaussian_density(const CovarianceMatrix& V, const std::vector<double>& x) {
    const Eigen::MatrixXd& inv = V.inv();
    const int d = static_cast<int>(inv.rows());
    if (static_cast<int>(x.size()) != d)
        throw DimensionMismatch("gaussian_density: wrong point dimension");
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), d);
    const double q = xv.dot(inv * xv);
    return std::pow(2.0 * M_PI, -0.5 * d) / std::sqrt(V.determinant) * std::exp(-0.5 * q);
}

TruncatedSeries hermite_factor(const CovarianceMatrix& V, const MultiIndex& nu) {
    const int r = order_of(nu);
    if (r > kOperatorDegree) throw PreconditionError("hermite_factor: order above 6");
    const Eigen::MatrixXd& inv = V.inv();
    const int d = static_cast<int>(inv.rows());
    if (static_cast<int>(nu.size()) != d)
        throw DimensionMismatch("hermite_factor: wrong multi-index dimension");
    TruncatedSeries h = TruncatedSeries::constant(d, kOperatorDegree, 1.0);
    // h_{nu+e_j} = d_j h_nu - (V^{-1} x)_j h_nu
    for (int j = 0; j < d; ++j) {
        TruncatedSeries lin = linear_form(inv, j, kOperatorDegree);
        for (int k = 0; k < nu[j]; ++k) h = h.derivative(j) - lin * h;
    }
    return h;
}

double apply_operator(const TruncatedSeries& op, const CovarianceMatrix& V,
                      const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < op.table().size(); ++i) {
        const double c = op.coeff_at(i);
        if (c == 0.0) continue;
        acc += c * hermite_factor(V, op.table().at(i)).evaluate(x);
    }
    return acc * gaussian_density(V, x);
}

TruncatedSeries squared_operator(const CumulantPolynomial& chi3) {
    if (chi3.order != 3) throw PreconditionError("squared_operator: needs the order-3 polynomial");
    return chi3.poly * chi3.poly;
}

// ---------------------------------------------------------------------------

EdgeworthModel EdgeworthModel::build(const LatticeMeasure& m) {
    EdgeworthModel model;
    model.dim_ = m.dim();
    model.cov_ = covariance(m);
    if (!model.cov_.positive_definite())
        throw SingularCovariance("EdgeworthModel: measure is not maximal");
    MomentTable mom = moments(m, 4);
    model.mean_ = mom.mean;
    model.centered_ = m.is_centered(1e-12);
    model.cumulants_ = cumulants(mom);

    // Hermite factors for every |nu| <= 6, by graded recursion.
    const int d = model.dim_;
    auto table6 = MultiIndexTable::get(d, kOperatorDegree);
    std::vector<TruncatedSeries> h;
    h.reserve(table6->size());
    std::vector<TruncatedSeries> lin;
    for (int j = 0; j < d; ++j) lin.push_back(linear_form(model.cov_.inv(), j, kOperatorDegree));
    for (std::size_t i = 0; i < table6->size(); ++i) {
        const MultiIndex& nu = table6->at(i);
        if (order_of(nu) == 0) {
            h.push_back(TruncatedSeries::constant(d, kOperatorDegree, 1.0));
            continue;
        }
        int j = 0;
        while (nu[j] == 0) ++j;
        MultiIndex parent = nu;
        parent[j] -= 1;
        const TruncatedSeries& hp = h[table6->index_of(parent)];
        h.push_back(hp.derivative(j) - lin[j] * hp);
    }

    auto weighted_sum = [&](const TruncatedSeries& coeffs) {
        TruncatedSeries acc(d, kOperatorDegree);
        for (std::size_t i = 0; i < table6->size(); ++i) {
            const double c = coeffs.coeff_at(i);
            if (c != 0.0) acc += c * h[i];
        }
        return acc;
    };

    CumulantPolynomial chi3 = cumulant_polynomial(model.cumulants_, 3);
    CumulantPolynomial chi4 = cumulant_polynomial(model.cumulants_, 4);
    model.q3_ = weighted_sum(chi3.poly);
    model.q4_ = weighted_sum(chi4.poly);
    model.q33_ = weighted_sum(squared_operator(chi3));

    model.p3_ = model.q3_ * (-1.0 / 6.0);
    model.p6_ = model.q4_ * (1.0 / 24.0) + model.q33_ * (1.0 / 72.0);
    MultiIndex zero(d, 0);
    model.L_ = model.p6_.coeff(zero);
    return model;
}

void EdgeworthModel::require_centered(const char* op) const {
    if (!centered_)
        throw PreconditionError(std::string(op) + ": measure mean must be zero");
}

std::pair<TruncatedSeries, TruncatedSeries> EdgeworthModel::theorem_polynomials() const {
    require_centered("theorem_polynomials");
    return {p3_, p6_};
}

double EdgeworthModel::lemma_approximant(std::int64_t n, const LatticePoint& x) const {
    if (n < 1) throw PreconditionError("lemma_approximant: n must be >= 1");
    const double sqn = std::sqrt(static_cast<double>(n));
    std::vector<double> y(dim_);
    for (int j = 0; j < dim_; ++j)
        y[j] = (static_cast<double>(x[j]) - static_cast<double>(n) * mean_[j]) / sqn;
    const double bracket = 1.0 - q3_.evaluate(y) / (6.0 * sqn) +
                           q4_.evaluate(y) / (24.0 * n) + q33_.evaluate(y) / (72.0 * n);
    return std::pow(static_cast<double>(n), -0.5 * dim_) * gaussian_density(cov_, y) * bracket;
}

double EdgeworthModel::theorem_approximant(std::int64_t n, const LatticePoint& x) const {
    require_centered("theorem_approximant");
    if (n < 1) throw PreconditionError("theorem_approximant: n must be >= 1");
    const double sqn = std::sqrt(static_cast<double>(n));
    std::vector<double> y(dim_);
    for (int j = 0; j < dim_; ++j) y[j] = static_cast<double>(x[j]) / sqn;
    // phi_{nV}(x) = n^{-d/2} phi_V(x / sqrt n)
    const double bracket = 1.0 + p3_.evaluate(y) / sqn + p6_.evaluate(y) / n;
    return std::pow(static_cast<double>(n), -0.5 * dim_) * gaussian_density(cov_, y) * bracket;
}

double EdgeworthModel::gaussian_approximant(std::int64_t n, const LatticePoint& x) const {
    if (n < 1) throw PreconditionError("gaussian_approximant: n must be >= 1");
    const double sqn = std::sqrt(static_cast<double>(n));
    std::vector<double> y(dim_);
    for (int j = 0; j < dim_; ++j)
        y[j] = (static_cast<double>(x[j]) - static_cast<double>(n) * mean_[j]) / sqn;
    return std::pow(static_cast<double>(n), -0.5 * dim_) * gaussian_density(cov_, y);
}

namespace {

nlohmann::ordered_json poly_json(const TruncatedSeries& s) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.table().size(); ++i) {
        if (s.coeff_at(i) == 0.0) continue;
        nlohmann::ordered_json term;
        term["nu"] = s.table().at(i);
        term["c"] = s.coeff_at(i);
        arr.push_back(term);
    }
    return arr;
}

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& A) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < A.cols(); ++c) row.push_back(A(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::string EdgeworthModel::dump() const {
    nlohmann::ordered_json j;
    j["dimension"] = dim_;
    j["E"] = mean_;
    j["V"] = matrix_json(cov_.matrix);
    j["V_inv"] = matrix_json(cov_.inv());
    j["det_V"] = cov_.determinant;
    j["gamma"] = cov_.smallest_eigenvalue;
    nlohmann::ordered_json cums = nlohmann::ordered_json::array();
    for (std::size_t i = 1; i < cumulants_.indices->size(); ++i) {
        nlohmann::ordered_json term;
        term["nu"] = cumulants_.indices->at(i);
        term["value"] = cumulants_.values[i];
        cums.push_back(term);
    }
    j["cumulants"] = cums;
    j["q3"] = poly_json(q3_);
    j["q4"] = poly_json(q4_);
    j["q33"] = poly_json(q33_);
    j["P3"] = poly_json(p3_);
    j["P6"] = poly_json(p6_);
    j["L"] = L_;
    return j.dump(2);
}

}  // namespace lclt

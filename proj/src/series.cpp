#include "lclt/series.hpp"

#include <cmath>
#include <cstdlib>

#include "lclt/errors.hpp"

namespace lclt {

TruncatedSeries::TruncatedSeries(int dim, int max_degree)
    : table_(MultiIndexTable::get(dim, max_degree)), coeffs_(table_->size(), 0.0) {}

TruncatedSeries TruncatedSeries::constant(int dim, int max_degree, double c) {
    TruncatedSeries s(dim, max_degree);
    s.coeffs_[0] = c;
    return s;
}

double TruncatedSeries::coeff(const MultiIndex& nu) const {
    return coeffs_[table_->index_of(nu)];
}

void TruncatedSeries::set_coeff(const MultiIndex& nu, double c) {
    coeffs_[table_->index_of(nu)] = c;
}

namespace {

void require_same_shape(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.dim() != b.dim() || a.max_degree() != b.max_degree())
        throw PreconditionError("series shape mismatch");
}

}  // namespace

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& other) const {
    require_same_shape(*this, other);
    const auto& tab = *table_;
    TruncatedSeries out(dim(), max_degree());
    const int R = max_degree();
    MultiIndex sum(dim());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        const MultiIndex& a = tab.at(i);
        const int da = order_of(a);
        for (std::size_t j = 0; j < other.coeffs_.size(); ++j) {
            if (other.coeffs_[j] == 0.0) continue;
            const MultiIndex& b = tab.at(j);
            if (da + order_of(b) > R) continue;
            for (int k = 0; k < dim(); ++k) sum[k] = a[k] + b[k];
            out.coeffs_[tab.index_of(sum)] += coeffs_[i] * other.coeffs_[j];
        }
    }
    return out;
}

TruncatedSeries TruncatedSeries::derivative(int axis) const {
    if (axis < 0 || axis >= dim()) throw PreconditionError("derivative axis out of range");
    TruncatedSeries out(dim(), max_degree());
    MultiIndex down(dim());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const MultiIndex& nu = table_->at(i);
        if (nu[axis] == 0 || coeffs_[i] == 0.0) continue;
        down = nu;
        down[axis] -= 1;
        out.coeffs_[table_->index_of(down)] += nu[axis] * coeffs_[i];
    }
    return out;
}

double TruncatedSeries::evaluate(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim()) throw DimensionMismatch("evaluate: wrong point dimension");
    // Per-axis power tables, then a dense monomial sum.
    const int R = max_degree();
    std::vector<double> powers(static_cast<std::size_t>(dim()) * (R + 1));
    for (int j = 0; j < dim(); ++j) {
        powers[j * (R + 1)] = 1.0;
        for (int e = 1; e <= R; ++e) powers[j * (R + 1) + e] = powers[j * (R + 1) + e - 1] * x[j];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        double mono = coeffs_[i];
        const MultiIndex& nu = table_->at(i);
        for (int j = 0; j < dim(); ++j) mono *= powers[j * (R + 1) + nu[j]];
        acc += mono;
    }
    return acc;
}

double TruncatedSeries::max_abs_coeff_of_parity(int parity) const {
    double m = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (order_of(table_->at(i)) % 2 == parity) m = std::max(m, std::abs(coeffs_[i]));
    return m;
}

bool TruncatedSeries::is_zero(double tol) const {
    for (double c : coeffs_)
        if (std::abs(c) > tol) return false;
    return true;
}

TruncatedSeries series_log(const TruncatedSeries& s) {
    MultiIndex zero(s.dim(), 0);
    if (std::abs(s.coeff(zero) - 1.0) > 1e-12)
        throw PreconditionError("series_log: constant term must be 1");
    const int R = s.max_degree();
    if (R < 1) throw PreconditionError("series_log: max_degree must be >= 1");

    TruncatedSeries y = s;  // y = s - 1, no constant term
    y.set_coeff(zero, 0.0);

    // log s = sum_{k=1..R} (-1)^{k+1} y^k / k; y^k has minimal degree k.
    TruncatedSeries result(s.dim(), R);
    TruncatedSeries ypow = y;
    for (int k = 1; k <= R; ++k) {
        double c = ((k % 2) ? 1.0 : -1.0) / k;
        result += ypow * c;
        if (k < R) ypow = ypow * y;
    }
    return result;
}

}  // namespace lclt

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lclt/errors.hpp"
#include "lclt/multi_index.hpp"

namespace lclt {

using LatticePoint = std::vector<std::int64_t>;

/// Finitely supported probability measure on Z^d with a declared
/// steplength bound: every support point x satisfies |x| <= steplength
/// (Euclidean norm). Entries are kept sorted lexicographically; the
/// object is immutable after construction.
class LatticeMeasure {
  public:
    using Entry = std::pair<LatticePoint, double>;

    /// Builds a measure from (point, probability) pairs. Zero-probability
    /// entries are dropped, duplicates accumulate. With check_invariants,
    /// enforces: nonnegative probabilities, mass within 1e-12 of 1,
    /// support inside the steplength ball, non-empty support.
    LatticeMeasure(int dim, std::int64_t steplength, std::vector<Entry> entries,
                   bool check_invariants = true);

    int dim() const { return dim_; }
    std::int64_t steplength() const { return steplength_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }

    double at(const LatticePoint& x) const;  // 0 when x not in the support
    double mass() const;
    std::vector<double> mean() const;
    bool is_centered(double tol = 1e-12) const;

  private:
    int dim_;
    std::int64_t steplength_;
    std::vector<Entry> entries_;
};

/// Parses the measure file format:
///   dim <d>
///   steplength <l>
///   <c1> ... <cd> <prob>     (prob decimal or exact rational p/q)
/// Lines starting with '#' are comments.
LatticeMeasure load_measure(const std::string& text);
LatticeMeasure load_measure_file(const std::string& path);

/// Serializes in the same file format; when n_steps is given, a
/// "# n = <n>" comment header is included.
std::string serialize(const LatticeMeasure& m, std::optional<std::int64_t> n_steps = std::nullopt);

/// All moments mu_nu = sum_x x^nu m(x) with |nu| <= max_order, plus the
/// mean vector E.
struct MomentTable {
    std::shared_ptr<const MultiIndexTable> indices;
    std::vector<double> values;  // parallel to indices
    std::vector<double> mean;

    double moment(const MultiIndex& nu) const { return values[indices->index_of(nu)]; }
};

struct CovarianceMatrix {
    Eigen::MatrixXd matrix;
    double smallest_eigenvalue = 0.0;  // gamma
    double determinant = 0.0;
    std::optional<Eigen::MatrixXd> inverse;  // present iff positive definite

    bool positive_definite() const { return inverse.has_value(); }
    const Eigen::MatrixXd& inv() const;  // throws SingularCovariance when absent
};

struct SupportHull {
    struct Facet {
        std::vector<std::int64_t> normal;  // integer, gcd-normalized
        std::int64_t offset;               // hull = { y : normal . y <= offset  for all facets }
    };

    int dim = 0;
    int affine_rank = 0;                // rank of the affine hull of the support
    std::vector<LatticePoint> points;   // full support
    std::vector<LatticePoint> vertices; // extreme points of the convex hull
    std::vector<Facet> facets;          // exact enumeration, d <= 3 only
};

enum class Aperiodicity { yes, no, undetermined };

struct ValidationReport {
    bool mass_ok = false;
    bool steplength_ok = false;
    bool maximal = false;
    Aperiodicity aperiodic = Aperiodicity::undetermined;
    std::int64_t period = 0;  // > 1 iff aperiodic == no
    std::vector<double> mean;
    double gamma = 0.0;

    bool all_ok() const {
        return mass_ok && steplength_ok && maximal && aperiodic == Aperiodicity::yes;
    }
};

/// Structural checks. Maximality is decided by the exact integer rank of
/// the affine hull of the support (equivalent to a positive definite
/// covariance). Aperiodicity runs the gcd of observed return times
/// n <= cap; "no(period p)" is only reported with a residue-class
/// certificate proving p divides every return time.
ValidationReport validate(const LatticeMeasure& m, int aperiodicity_cap = 64);

MomentTable moments(const LatticeMeasure& m, int max_order);
CovarianceMatrix covariance(const LatticeMeasure& m);
SupportHull support_hull(const LatticeMeasure& m);

/// True iff xi lies in the topological interior of the hull. Facets are
/// checked with a strictness margin of 1e-12 (Euclidean distance); for
/// d > 3 a linear-feasibility subroutine replaces the facet list.
/// Throws DegenerateHull when the hull has empty interior.
bool hull_contains_interior(const SupportHull& hull, const std::vector<double>& xi);

}  // namespace lclt

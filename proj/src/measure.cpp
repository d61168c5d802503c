#include "lclt/measure.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "lclt/linprog.hpp"

namespace lclt {

namespace {

double sq_norm(const LatticePoint& x) {
    double s = 0.0;
    for (auto c : x) s += static_cast<double>(c) * static_cast<double>(c);
    return s;
}

}  // namespace

LatticeMeasure::LatticeMeasure(int dim, std::int64_t steplength, std::vector<Entry> entries,
                               bool check_invariants)
    : dim_(dim), steplength_(steplength) {
    if (dim < 1) throw InvariantError("dimension must be a positive integer");
    if (steplength < 1) throw InvariantError("steplength must be a positive integer");
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    // Accumulate duplicates, drop zeros.
    for (auto& e : entries) {
        if (static_cast<int>(e.first.size()) != dim)
            throw InvariantError("support point has wrong dimension");
        if (!entries_.empty() && entries_.back().first == e.first)
            entries_.back().second += e.second;
        else
            entries_.push_back(std::move(e));
    }
    std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });

    if (check_invariants) {
        if (entries_.empty()) throw InvariantError("support is empty");
        double total = 0.0;
        const double l2 = static_cast<double>(steplength_) * static_cast<double>(steplength_);
        for (const auto& [x, p] : entries_) {
            if (p < 0.0) throw InvariantError("negative probability");
            if (sq_norm(x) > l2) throw InvariantError("support point outside the steplength ball");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            std::ostringstream os;
            os << "total mass " << total << " differs from 1 beyond 1e-12";
            throw InvariantError(os.str());
        }
    }
}

double LatticeMeasure::at(const LatticePoint& x) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                               [](const Entry& e, const LatticePoint& p) { return e.first < p; });
    if (it != entries_.end() && it->first == x) return it->second;
    return 0.0;
}

double LatticeMeasure::mass() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.second;
    return s;
}

std::vector<double> LatticeMeasure::mean() const {
    std::vector<double> mu(dim_, 0.0);
    for (const auto& [x, p] : entries_)
        for (int j = 0; j < dim_; ++j) mu[j] += p * static_cast<double>(x[j]);
    return mu;
}

bool LatticeMeasure::is_centered(double tol) const {
    for (double m : mean())
        if (std::abs(m) > tol) return false;
    return true;
}

// ---------------------------------------------------------------------------
// File format

namespace {

bool parse_int64(const std::string& tok, std::int64_t& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Probability token: decimal or exact rational "p/q".
bool parse_probability(const std::string& tok, double& out) {
    auto slash = tok.find('/');
    if (slash != std::string::npos) {
        std::int64_t p = 0, q = 0;
        if (!parse_int64(tok.substr(0, slash), p)) return false;
        if (!parse_int64(tok.substr(slash + 1), q)) return false;
        if (q == 0) return false;
        out = static_cast<double>(p) / static_cast<double>(q);
        return true;
    }
    char* end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size() && !tok.empty();
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> toks;
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

}  // namespace

LatticeMeasure load_measure(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int dim = -1;
    std::int64_t steplength = -1;
    std::vector<LatticeMeasure::Entry> entries;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        if (dim < 0) {
            std::int64_t d = 0;
            if (toks.size() != 2 || toks[0] != "dim" || !parse_int64(toks[1], d))
                throw ParseError("line " + std::to_string(lineno) + ": expected 'dim <d>'");
            if (d < 1) throw InvariantError("dimension must be a positive integer");
            dim = static_cast<int>(d);
            continue;
        }
        if (steplength < 0) {
            std::int64_t l = 0;
            if (toks.size() != 2 || toks[0] != "steplength" || !parse_int64(toks[1], l))
                throw ParseError("line " + std::to_string(lineno) + ": expected 'steplength <l>'");
            if (l < 1) throw InvariantError("steplength must be a positive integer");
            steplength = l;
            continue;
        }
        if (static_cast<int>(toks.size()) != dim + 1)
            throw InvariantError("line " + std::to_string(lineno) +
                                 ": dimension mismatch (expected " + std::to_string(dim) +
                                 " coordinates and a probability)");
        LatticePoint x(dim);
        for (int j = 0; j < dim; ++j)
            if (!parse_int64(toks[j], x[j]))
                throw ParseError("line " + std::to_string(lineno) + ": bad coordinate '" +
                                 toks[j] + "'");
        double p = 0.0;
        if (!parse_probability(toks[dim], p))
            throw ParseError("line " + std::to_string(lineno) + ": bad probability '" +
                             toks[dim] + "'");
        entries.emplace_back(std::move(x), p);
    }
    if (dim < 0 || steplength < 0) throw ParseError("missing 'dim' or 'steplength' header line");
    return LatticeMeasure(dim, steplength, std::move(entries));
}

LatticeMeasure load_measure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open measure file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return load_measure(os.str());
}

std::string serialize(const LatticeMeasure& m, std::optional<std::int64_t> n_steps) {
    std::ostringstream os;
    if (n_steps) os << "# n = " << *n_steps << "\n";
    os << "dim " << m.dim() << "\n";
    os << "steplength " << m.steplength() << "\n";
    char buf[40];
    for (const auto& [x, p] : m.entries()) {
        for (auto c : x) os << c << " ";
        std::snprintf(buf, sizeof buf, "%.17g", p);
        os << buf << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Statistics

MomentTable moments(const LatticeMeasure& m, int max_order) {
    if (max_order < 0) throw PreconditionError("moments: max_order must be >= 0");
    MomentTable table;
    table.indices = MultiIndexTable::get(m.dim(), max_order);
    table.values.assign(table.indices->size(), 0.0);
    const int d = m.dim();
    std::vector<double> powers(static_cast<std::size_t>(d) * (max_order + 1));
    for (const auto& [x, p] : m.entries()) {
        for (int j = 0; j < d; ++j) {
            powers[j * (max_order + 1)] = 1.0;
            for (int e = 1; e <= max_order; ++e)
                powers[j * (max_order + 1) + e] =
                    powers[j * (max_order + 1) + e - 1] * static_cast<double>(x[j]);
        }
        for (std::size_t i = 0; i < table.indices->size(); ++i) {
            const MultiIndex& nu = table.indices->at(i);
            double mono = p;
            for (int j = 0; j < d; ++j) mono *= powers[j * (max_order + 1) + nu[j]];
            table.values[i] += mono;
        }
    }
    table.mean.assign(d, 0.0);
    if (max_order >= 1) {
        MultiIndex e(d, 0);
        for (int j = 0; j < d; ++j) {
            e[j] = 1;
            table.mean[j] = table.values[table.indices->index_of(e)];
            e[j] = 0;
        }
    } else {
        table.mean = m.mean();
    }
    return table;
}

const Eigen::MatrixXd& CovarianceMatrix::inv() const {
    if (!inverse) throw SingularCovariance("covariance matrix is singular (measure not maximal)");
    return *inverse;
}

CovarianceMatrix covariance(const LatticeMeasure& m) {
    const int d = m.dim();
    MomentTable mom = moments(m, 2);
    Eigen::MatrixXd V(d, d);
    MultiIndex nu(d, 0);
    for (int j = 0; j < d; ++j) {
        for (int k = j; k < d; ++k) {
            nu.assign(d, 0);
            nu[j] += 1;
            nu[k] += 1;
            double second = mom.moment(nu);
            V(j, k) = V(k, j) = second - mom.mean[j] * mom.mean[k];
        }
    }
    CovarianceMatrix out;
    out.matrix = V;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
    out.smallest_eigenvalue = es.eigenvalues().minCoeff();
    out.determinant = es.eigenvalues().prod();
    const double l2 = static_cast<double>(m.steplength()) * static_cast<double>(m.steplength());
    const double pd_tol = 1e-12 * static_cast<double>(d) * l2;
    if (out.smallest_eigenvalue > pd_tol) out.inverse = V.inverse();
    return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

// Exact rank of an integer matrix (rows x cols), fraction-free Bareiss.
int integer_rank(std::vector<std::vector<std::int64_t>> a) {
    const std::size_t rows = a.size();
    if (rows == 0) return 0;
    const std::size_t cols = a[0].size();
    std::size_t rank = 0;
    std::int64_t prev = 1;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[rank], a[pivot]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            for (std::size_t c = col + 1; c < cols; ++c)
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            a[r][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return static_cast<int>(rank);
}

int affine_rank(const std::vector<LatticePoint>& pts, int dim) {
    if (pts.size() <= 1) return 0;
    std::vector<std::vector<std::int64_t>> diffs;
    diffs.reserve(pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        std::vector<std::int64_t> row(dim);
        for (int j = 0; j < dim; ++j) row[j] = pts[i][j] - pts[0][j];
        diffs.push_back(std::move(row));
    }
    return integer_rank(std::move(diffs));
}

// Dense boolean grid over [-cap*l, cap*l]^d for Minkowski powers of the
// support; scans stay cheap at desk scale (d <= 3, small caps).
class SupportGrid {
  public:
    SupportGrid(int dim, std::int64_t radius) : dim_(dim), radius_(radius) {
        std::size_t cells = 1;
        for (int j = 0; j < dim_; ++j) cells *= extent();
        data_.assign(cells, false);
    }

    std::size_t extent() const { return static_cast<std::size_t>(2 * radius_ + 1); }

    std::size_t index(const LatticePoint& x) const {
        std::size_t idx = 0;
        for (int j = 0; j < dim_; ++j)
            idx = idx * extent() + static_cast<std::size_t>(x[j] + radius_);
        return idx;
    }

    bool in_range(const LatticePoint& x) const {
        for (int j = 0; j < dim_; ++j)
            if (x[j] < -radius_ || x[j] > radius_) return false;
        return true;
    }

    void set(const LatticePoint& x) { data_[index(x)] = true; }
    bool get(const LatticePoint& x) const { return data_[index(x)]; }

    std::vector<LatticePoint> points() const {
        std::vector<LatticePoint> out;
        LatticePoint x(dim_, -radius_);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (data_[i]) out.push_back(x);
            for (int j = dim_ - 1; j >= 0; --j) {
                if (++x[j] <= radius_) break;
                x[j] = -radius_;
            }
        }
        return out;
    }

  private:
    int dim_;
    std::int64_t radius_;
    std::vector<bool> data_;
};

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a < 0 ? -a : a;
}

// Residue-class certificate: a homomorphism lambda in (Z_p)^d with
// lambda . x = r (mod p) for every support point and gcd(r, p) = 1
// forces p | n for every return time n.
bool certify_period(const std::vector<LatticePoint>& support, int dim, std::int64_t p) {
    std::vector<std::int64_t> lambda(dim, 0);
    while (true) {
        int j = 0;
        while (j < dim && ++lambda[j] == p) lambda[j++] = 0;
        if (j == dim) return false;  // exhausted
        std::int64_t r = -1;
        bool uniform = true;
        for (const auto& x : support) {
            std::int64_t v = 0;
            for (int k = 0; k < dim; ++k) v += lambda[k] * x[k];
            v = ((v % p) + p) % p;
            if (r < 0)
                r = v;
            else if (v != r) {
                uniform = false;
                break;
            }
        }
        if (uniform && r > 0 && gcd64(r, p) == 1) return true;
    }
}

}  // namespace

ValidationReport validate(const LatticeMeasure& m, int aperiodicity_cap) {
    ValidationReport report;
    report.mean = m.mean();
    report.mass_ok = std::abs(m.mass() - 1.0) <= 1e-12;
    const double l2 = static_cast<double>(m.steplength()) * static_cast<double>(m.steplength());
    report.steplength_ok = true;
    std::vector<LatticePoint> support;
    support.reserve(m.support_size());
    for (const auto& [x, p] : m.entries()) {
        support.push_back(x);
        if (sq_norm(x) > l2) report.steplength_ok = false;
    }
    report.maximal = affine_rank(support, m.dim()) == m.dim();
    report.gamma = covariance(m).smallest_eigenvalue;

    // Running gcd of observed return times via boolean Minkowski powers.
    const std::int64_t radius = m.steplength() * aperiodicity_cap;
    SupportGrid current(m.dim(), radius);
    for (const auto& x : support) current.set(x);
    LatticePoint origin(m.dim(), 0);
    std::int64_t g = 0;
    for (int n = 1; n <= aperiodicity_cap; ++n) {
        if (n > 1) {
            SupportGrid next(m.dim(), radius);
            for (const auto& y : current.points()) {
                LatticePoint z(m.dim());
                for (const auto& x : support) {
                    for (int j = 0; j < m.dim(); ++j) z[j] = y[j] + x[j];
                    if (next.in_range(z)) next.set(z);
                }
            }
            current = std::move(next);
        }
        if (current.get(origin)) g = gcd64(g, n);
        if (g == 1) break;
    }
    if (g == 1) {
        report.aperiodic = Aperiodicity::yes;
        report.period = 1;
    } else if (g > 1 && certify_period(support, m.dim(), g)) {
        report.aperiodic = Aperiodicity::no;
        report.period = g;
    } else {
        report.aperiodic = Aperiodicity::undetermined;
        report.period = 0;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Convex hull of the support

namespace {

std::int64_t dot64(const std::vector<std::int64_t>& a, const LatticePoint& b) {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

void add_facet(std::set<std::pair<std::vector<std::int64_t>, std::int64_t>>& facets,
               std::vector<std::int64_t> normal, std::int64_t offset) {
    std::int64_t g = 0;
    for (auto c : normal) g = gcd64(g, c);
    if (g == 0) return;
    for (auto& c : normal) c /= g;
    // offset must stay exact under the same scaling
    if (offset % g == 0)
        offset /= g;
    else
        return;  // cannot renormalize exactly; caller passes gcd-consistent data
    facets.insert({std::move(normal), offset});
}

// Brute-force exact facet enumeration for d <= 3: a tuple of support
// points spans a facet plane when every point lies weakly on one side.
std::vector<SupportHull::Facet> enumerate_facets(const std::vector<LatticePoint>& pts, int dim) {
    std::set<std::pair<std::vector<std::int64_t>, std::int64_t>> found;
    const std::size_t n = pts.size();
    if (dim == 1) {
        std::int64_t lo = pts[0][0], hi = pts[0][0];
        for (const auto& p : pts) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        found.insert({{1}, hi});
        found.insert({{-1}, -lo});
    } else if (dim == 2) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const std::int64_t ex = pts[j][0] - pts[i][0];
                const std::int64_t ey = pts[j][1] - pts[i][1];
                std::vector<std::int64_t> nrm{ey, -ex};
                if (nrm[0] == 0 && nrm[1] == 0) continue;
                const std::int64_t off = dot64(nrm, pts[i]);
                bool all_below = true;
                for (const auto& p : pts)
                    if (dot64(nrm, p) > off) {
                        all_below = false;
                        break;
                    }
                if (all_below) add_facet(found, nrm, off);
            }
    } else if (dim == 3) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k) {
                    std::int64_t ux = pts[j][0] - pts[i][0], uy = pts[j][1] - pts[i][1],
                                 uz = pts[j][2] - pts[i][2];
                    std::int64_t vx = pts[k][0] - pts[i][0], vy = pts[k][1] - pts[i][1],
                                 vz = pts[k][2] - pts[i][2];
                    std::vector<std::int64_t> nrm{uy * vz - uz * vy, uz * vx - ux * vz,
                                                  ux * vy - uy * vx};
                    if (nrm[0] == 0 && nrm[1] == 0 && nrm[2] == 0) continue;
                    for (int sign = 0; sign < 2; ++sign) {
                        std::vector<std::int64_t> cand = nrm;
                        if (sign) for (auto& c : cand) c = -c;
                        const std::int64_t off = dot64(cand, pts[i]);
                        bool all_below = true;
                        for (const auto& p : pts)
                            if (dot64(cand, p) > off) {
                                all_below = false;
                                break;
                            }
                        if (all_below) add_facet(found, cand, off);
                    }
                }
    }
    std::vector<SupportHull::Facet> out;
    out.reserve(found.size());
    for (const auto& [nrm, off] : found) out.push_back({nrm, off});
    return out;
}

std::vector<std::vector<double>> as_double_points(const std::vector<LatticePoint>& pts) {
    std::vector<std::vector<double>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        std::vector<double> v(p.size());
        for (std::size_t j = 0; j < p.size(); ++j) v[j] = static_cast<double>(p[j]);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

SupportHull support_hull(const LatticeMeasure& m) {
    SupportHull hull;
    hull.dim = m.dim();
    for (const auto& [x, p] : m.entries()) hull.points.push_back(x);
    hull.affine_rank = affine_rank(hull.points, m.dim());
    auto dpts = as_double_points(hull.points);
    for (std::size_t i = 0; i < hull.points.size(); ++i)
        if (is_extreme_point(dpts, i)) hull.vertices.push_back(hull.points[i]);
    if (m.dim() <= 3 && hull.affine_rank == m.dim())
        hull.facets = enumerate_facets(hull.points, m.dim());
    return hull;
}

bool hull_contains_interior(const SupportHull& hull, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != hull.dim)
        throw DimensionMismatch("hull_contains_interior: wrong point dimension");
    if (hull.affine_rank < hull.dim)
        throw DegenerateHull("support hull has empty interior (measure not maximal)");
    constexpr double kMargin = 1e-12;
    if (!hull.facets.empty()) {
        for (const auto& f : hull.facets) {
            double nx = 0.0, nn = 0.0;
            for (int j = 0; j < hull.dim; ++j) {
                nx += static_cast<double>(f.normal[j]) * xi[j];
                nn += static_cast<double>(f.normal[j]) * static_cast<double>(f.normal[j]);
            }
            // strict feasibility with a Euclidean-distance margin
            if (static_cast<double>(f.offset) - nx <= kMargin * std::sqrt(nn)) return false;
        }
        return true;
    }
    return relative_interior_margin(as_double_points(hull.points), xi) > kMargin;
}

}  // namespace lclt

#include <doctest.h>

#include <cmath>
#include <set>

#include "lclt/errors.hpp"
#include "lclt/linprog.hpp"
#include "lclt/measure.hpp"

using namespace lclt;

namespace {

LatticeMeasure lazy() {
    return load_measure("dim 1\nsteplength 1\n-1 1/4\n0 1/2\n1 1/4\n");
}

LatticeMeasure simple_walk() {
    return load_measure("dim 1\nsteplength 1\n-1 1/2\n1 1/2\n");
}

LatticeMeasure asym() {
    return load_measure("dim 1\nsteplength 2\n-1 0.4\n0 0.3\n1 0.2\n2 0.1\n");
}

LatticeMeasure lazy2d() {
    std::vector<LatticeMeasure::Entry> e;
    const double p1[3] = {0.25, 0.5, 0.25};
    for (std::int64_t a = -1; a <= 1; ++a)
        for (std::int64_t b = -1; b <= 1; ++b)
            e.push_back({{a, b}, p1[a + 1] * p1[b + 1]});
    return LatticeMeasure(2, 2, e);
}

}  // namespace

TEST_CASE("load_measure parses rationals, decimals and comments") {
    LatticeMeasure m = load_measure("# lazy\ndim 1\nsteplength 1\n-1 1/4\n0 0.5\n1 1/4\n");
    CHECK(m.dim() == 1);
    CHECK(m.steplength() == 1);
    CHECK(m.support_size() == 3);
    CHECK(m.at({0}) == 0.5);
    CHECK(m.at({-1}) == 0.25);
    CHECK(m.at({7}) == 0.0);
    CHECK(m.mass() == 1.0);
}

TEST_CASE("load_measure rejects bad input") {
    CHECK_THROWS_AS(load_measure("dim 1\nsteplength 1\n-1 0.3\n1 0.3\n"), InvariantError);
    CHECK_THROWS_AS(load_measure("dim 1\nsteplength 1\n-1 -0.5\n1 1.5\n"), InvariantError);
    CHECK_THROWS_AS(load_measure("dim 1\nsteplength 1\n-2 1/2\n1 1/2\n"), InvariantError);
    CHECK_THROWS_AS(load_measure("dim 2\nsteplength 1\n1 1/2\n-1 1/2\n"), InvariantError);
    CHECK_THROWS_AS(load_measure("dim 1\nsteplength 1\nx 1/2\n1 1/2\n"), ParseError);
    CHECK_THROWS_AS(load_measure("dim 1\n-1 1/2\n1 1/2\n"), ParseError);
    CHECK_THROWS_AS(load_measure("steplength 1\n"), ParseError);
    CHECK_THROWS_AS(load_measure("dim 1\nsteplength 1\n"), InvariantError);  // empty support
    CHECK_THROWS_AS(load_measure("dim 1\nsteplength 1\n0 1/0\n"), ParseError);
    CHECK_THROWS_AS(load_measure("dim 0\nsteplength 1\n0 1\n"), InvariantError);
}

TEST_CASE("duplicate support points accumulate") {
    LatticeMeasure m = load_measure("dim 1\nsteplength 1\n0 1/4\n0 1/4\n1 1/2\n");
    CHECK(m.support_size() == 2);
    CHECK(m.at({0}) == 0.5);
}

TEST_CASE("serialize round-trips") {
    LatticeMeasure m = lazy();
    std::string text = serialize(m, 4);
    CHECK(text.find("# n = 4") != std::string::npos);
    LatticeMeasure back = load_measure(text);
    CHECK(back.entries() == m.entries());
}

TEST_CASE("validate lazy walk") {
    ValidationReport r = validate(lazy());
    CHECK(r.mass_ok);
    CHECK(r.steplength_ok);
    CHECK(r.maximal);
    CHECK(r.aperiodic == Aperiodicity::yes);
    CHECK(r.mean[0] == 0.0);
    CHECK(r.gamma == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.all_ok());
}

TEST_CASE("validate simple walk: period 2 with certificate") {
    ValidationReport r = validate(simple_walk());
    CHECK(r.aperiodic == Aperiodicity::no);
    CHECK(r.period == 2);
    CHECK_FALSE(r.all_ok());
}

TEST_CASE("validate degenerate 2d support") {
    LatticeMeasure m = load_measure("dim 2\nsteplength 1\n-1 0 1/4\n0 0 1/2\n1 0 1/4\n");
    ValidationReport r = validate(m);
    CHECK_FALSE(r.maximal);
    CHECK(r.gamma == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("validate mean-one measure with G(0) > 0 is aperiodic") {
    LatticeMeasure m = load_measure("dim 1\nsteplength 2\n0 1/2\n2 1/2\n");
    ValidationReport r = validate(m);
    CHECK(r.aperiodic == Aperiodicity::yes);
    CHECK(r.mean[0] == doctest::Approx(1.0));
}

TEST_CASE("validate period-3 measure via certificate") {
    // support {-1, 2}: returns only at multiples of 3
    LatticeMeasure m = load_measure("dim 1\nsteplength 2\n-1 2/3\n2 1/3\n");
    ValidationReport r = validate(m);
    CHECK(r.aperiodic == Aperiodicity::no);
    CHECK(r.period == 3);
}

TEST_CASE("validate 2d diagonal walk: period 2") {
    LatticeMeasure m =
        load_measure("dim 2\nsteplength 1\n1 0 1/4\n-1 0 1/4\n0 1 1/4\n0 -1 1/4\n");
    ValidationReport r = validate(m);
    CHECK(r.maximal);
    CHECK(r.aperiodic == Aperiodicity::no);
    CHECK(r.period == 2);
}

TEST_CASE("moments of the lazy walk") {
    MomentTable t = moments(lazy(), 4);
    CHECK(t.moment({0}) == 1.0);
    CHECK(t.moment({1}) == 0.0);
    CHECK(t.moment({2}) == 0.5);
    CHECK(t.moment({3}) == 0.0);
    CHECK(t.moment({4}) == 0.5);
    CHECK(t.mean[0] == 0.0);
}

TEST_CASE("moment bound |mu_nu| <= l^{|nu|}") {
    for (const auto& m : {lazy(), asym(), lazy2d()}) {
        MomentTable t = moments(m, 4);
        for (std::size_t i = 0; i < t.indices->size(); ++i) {
            const double bound =
                std::pow(static_cast<double>(m.steplength()), order_of(t.indices->at(i)));
            CHECK(std::abs(t.values[i]) <= bound + 1e-12);
        }
    }
}

TEST_CASE("covariance of lazy walk") {
    CovarianceMatrix V = covariance(lazy());
    CHECK(V.matrix(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(V.smallest_eigenvalue == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(V.positive_definite());
    CHECK(V.inv()(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(V.determinant == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("covariance of a product measure is diagonal") {
    CovarianceMatrix V = covariance(lazy2d());
    CHECK(V.matrix(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(V.matrix(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(V.matrix(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("covariance of non-maximal measure has no inverse") {
    LatticeMeasure m = load_measure("dim 2\nsteplength 1\n-1 0 1/4\n0 0 1/2\n1 0 1/4\n");
    CovarianceMatrix V = covariance(m);
    CHECK_FALSE(V.positive_definite());
    CHECK_THROWS_AS(V.inv(), SingularCovariance);
}

TEST_CASE("covariance entries and eigenvalues bounded by steplength") {
    for (const auto& m : {lazy(), asym(), lazy2d(), simple_walk()}) {
        CovarianceMatrix V = covariance(m);
        const double l2 =
            static_cast<double>(m.steplength()) * static_cast<double>(m.steplength());
        for (Eigen::Index r = 0; r < V.matrix.rows(); ++r)
            for (Eigen::Index c = 0; c < V.matrix.cols(); ++c)
                CHECK(std::abs(V.matrix(r, c)) <= l2 + 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V.matrix);
        CHECK(es.eigenvalues().maxCoeff() <= m.dim() * l2 + 1e-12);
        CHECK(std::abs(V.matrix(0, 0) - V.matrix.transpose()(0, 0)) <= 1e-12);
    }
}

TEST_CASE("maximal iff gamma positive, both paths agree") {
    std::vector<LatticeMeasure> measures = {
        lazy(), asym(), lazy2d(), simple_walk(),
        load_measure("dim 2\nsteplength 1\n-1 0 1/4\n0 0 1/2\n1 0 1/4\n")};
    for (const auto& m : measures) {
        ValidationReport r = validate(m);
        CHECK(r.maximal == (r.gamma > 1e-10));
    }
}

TEST_CASE("support hull in one dimension") {
    SupportHull h = support_hull(lazy());
    CHECK(h.affine_rank == 1);
    REQUIRE(h.vertices.size() == 2);
    CHECK(h.vertices.front()[0] == -1);
    CHECK(h.vertices.back()[0] == 1);
    CHECK(hull_contains_interior(h, {0.0}));
    CHECK(hull_contains_interior(h, {0.999}));
    CHECK_FALSE(hull_contains_interior(h, {1.0}));
    CHECK_FALSE(hull_contains_interior(h, {1.5}));
    CHECK_FALSE(hull_contains_interior(h, {1.0 - 1e-13}));  // inside the strictness margin
}

TEST_CASE("support hull of the diamond") {
    LatticeMeasure m = load_measure(
        "dim 2\nsteplength 1\n1 0 1/5\n-1 0 1/5\n0 1 1/5\n0 -1 1/5\n0 0 1/5\n");
    SupportHull h = support_hull(m);
    CHECK(h.affine_rank == 2);
    CHECK(h.vertices.size() == 4);  // the center is not extreme
    CHECK(h.facets.size() == 4);
    CHECK(hull_contains_interior(h, {0.0, 0.0}));
    CHECK(hull_contains_interior(h, {0.2, 0.2}));
    CHECK_FALSE(hull_contains_interior(h, {0.5, 0.5}));   // on an edge
    CHECK_FALSE(hull_contains_interior(h, {0.75, 0.75}));
    CHECK_FALSE(hull_contains_interior(h, {1.0, 0.0}));   // vertex
}

TEST_CASE("degenerate hull throws on interior test") {
    LatticeMeasure m = load_measure("dim 1\nsteplength 1\n0 1\n");
    SupportHull h = support_hull(m);
    CHECK(h.affine_rank == 0);
    CHECK_THROWS_AS(hull_contains_interior(h, {0.0}), DegenerateHull);
}

TEST_CASE("hull dimension mismatch") {
    SupportHull h = support_hull(lazy());
    CHECK_THROWS_AS(hull_contains_interior(h, {0.0, 0.0}), DimensionMismatch);
}

TEST_CASE("facet decision agrees with the LP relative-interior margin on rational grids") {
    // d = 1 and d = 2 instances; grid denominators up to 4.
    auto check_measure = [](const LatticeMeasure& m) {
        SupportHull h = support_hull(m);
        std::vector<std::vector<double>> pts;
        for (const auto& p : h.points) {
            std::vector<double> v(p.begin(), p.end());
            pts.push_back(v);
        }
        const std::int64_t R = m.steplength() + 1;
        const int q = 4;
        std::vector<std::vector<double>> grid;
        if (m.dim() == 1) {
            for (std::int64_t num = -R * q; num <= R * q; ++num)
                grid.push_back({static_cast<double>(num) / q});
        } else {
            for (std::int64_t a = -R * q; a <= R * q; ++a)
                for (std::int64_t b = -R * q; b <= R * q; ++b)
                    grid.push_back({static_cast<double>(a) / q, static_cast<double>(b) / q});
        }
        for (const auto& xi : grid) {
            const bool facet_says = hull_contains_interior(h, xi);
            const bool lp_says = relative_interior_margin(pts, xi) > 1e-12;
            CHECK(facet_says == lp_says);
        }
    };
    check_measure(lazy());
    check_measure(load_measure(
        "dim 2\nsteplength 1\n1 0 1/5\n-1 0 1/5\n0 1 1/5\n0 -1 1/5\n0 0 1/5\n"));
    check_measure(load_measure("dim 2\nsteplength 2\n-1 -1 1/4\n2 0 1/4\n0 2 1/4\n1 1 1/4\n"));
}

TEST_CASE("asymmetric hull interior") {
    SupportHull h = support_hull(asym());
    CHECK(hull_contains_interior(h, {1.9}));
    CHECK(hull_contains_interior(h, {-0.9}));
    CHECK_FALSE(hull_contains_interior(h, {2.0}));
    CHECK_FALSE(hull_contains_interior(h, {-1.1}));
}

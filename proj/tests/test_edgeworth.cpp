#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "fd.hpp"
#include "lclt/edgeworth.hpp"
#include "lclt/errors.hpp"
#include "lclt/oracle.hpp"

using namespace lclt;

namespace {

LatticeMeasure lazy() {
    return load_measure("dim 1\nsteplength 1\n-1 1/4\n0 1/2\n1 1/4\n");
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

// product of two distinct 1-d measures (lazy x asym)
LatticeMeasure mixed2d() {
    std::vector<LatticeMeasure::Entry> e;
    const double p1[3] = {0.25, 0.5, 0.25};
    const double p2[4] = {0.4, 0.3, 0.2, 0.1};
    for (std::int64_t a = -1; a <= 1; ++a)
        for (std::int64_t b = -1; b <= 2; ++b)
            e.push_back({{a, b}, p1[a + 1] * p2[b + 1]});
    return LatticeMeasure(2, 3, e);
}

// {-1: 1/6, 0: 2/3, 1: 1/6} has chi_3 = chi_4 = 0, so L = 0.
LatticeMeasure flat_kurtosis() {
    return load_measure("dim 1\nsteplength 1\n-1 1/6\n0 2/3\n1 1/6\n");
}

CovarianceMatrix make_cov(const Eigen::MatrixXd& V) {
    CovarianceMatrix out;
    out.matrix = V;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
    out.smallest_eigenvalue = es.eigenvalues().minCoeff();
    out.determinant = es.eigenvalues().prod();
    out.inverse = V.inverse();
    return out;
}

}  // namespace

TEST_CASE("cumulants of the lazy walk") {
    CumulantTable c = cumulants(moments(lazy(), 4));
    CHECK(c.cumulant({1}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.cumulant({2}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.cumulant({3}) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.cumulant({4}) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(c.mean()[0] == 0.0);
    CHECK(c.covariance()(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("cumulants of the asymmetric walk") {
    CumulantTable c = cumulants(moments(asym(), 4));
    CHECK(c.cumulant({2}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.cumulant({3}) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(c.cumulant({4}) == doctest::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("mixed cumulants of a product measure vanish") {
    CumulantTable c = cumulants(moments(lazy2d(), 4));
    for (std::size_t i = 0; i < c.indices->size(); ++i) {
        const MultiIndex& nu = c.indices->at(i);
        if (nu.size() == 2 && nu[0] > 0 && nu[1] > 0)
            CHECK(std::abs(c.values[i]) <= 1e-14);
    }
}

TEST_CASE("cumulants need order-4 moments") {
    CHECK_THROWS_AS(cumulants(moments(lazy(), 2)), PreconditionError);
}

TEST_CASE("cumulants match finite differences of log char_fn") {
    // i^{|nu|} chi_nu = D^nu log H-hat (0)
    for (const auto& m : {lazy(), asym()}) {
        CumulantTable c = cumulants(moments(m, 4));
        auto logH = [&](const std::vector<double>& t) {
            return std::log(char_fn(m, t));
        };
        for (std::size_t i = 1; i < c.indices->size(); ++i) {
            const MultiIndex& nu = c.indices->at(i);
            std::complex<double> d = fd::derivative<std::complex<double>>(logH, {0.0}, nu, 0.02);
            const std::complex<double> ipow = std::pow(std::complex<double>(0.0, 1.0), order_of(nu));
            CHECK(std::abs((d / ipow).real() - c.values[i]) <= 1e-6);
        }
    }
    // mixed derivatives in d = 2
    CumulantTable c2 = cumulants(moments(mixed2d(), 4));
    auto logH2 = [&](const std::vector<double>& t) { return std::log(char_fn(mixed2d(), t)); };
    for (MultiIndex nu : {MultiIndex{1, 1}, MultiIndex{2, 2}, MultiIndex{1, 3}, MultiIndex{0, 4}}) {
        std::complex<double> d = fd::derivative<std::complex<double>>(logH2, {0.0, 0.0}, nu, 0.02);
        const std::complex<double> ipow = std::pow(std::complex<double>(0.0, 1.0), order_of(nu));
        CHECK(std::abs((d / ipow).real() - c2.cumulant(nu)) <= 1e-6);
    }
}

TEST_CASE("cumulant polynomials at orders 1 and 2") {
    LatticeMeasure shift = load_measure("dim 1\nsteplength 2\n0 1/2\n2 1/2\n");
    CumulantTable c = cumulants(moments(shift, 4));
    CumulantPolynomial p1 = cumulant_polynomial(c, 1);
    CHECK(p1.poly.coeff({1}) == doctest::Approx(1.0));  // E . z with E = 1

    CumulantTable c2 = cumulants(moments(lazy2d(), 4));
    CumulantPolynomial p2 = cumulant_polynomial(c2, 2);
    CHECK(p2.poly.coeff({2, 0}) == doctest::Approx(0.5).epsilon(1e-13));  // z . (V z)
    CHECK(p2.poly.coeff({0, 2}) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(p2.poly.coeff({1, 1})) <= 1e-14);

    CumulantPolynomial p3 = cumulant_polynomial(cumulants(moments(lazy(), 4)), 3);
    CHECK(p3.poly.is_zero(1e-15));

    CHECK_THROWS_AS(cumulant_polynomial(c, 5), PreconditionError);
}

TEST_CASE("gaussian density closed forms") {
    CovarianceMatrix v1 = make_cov(Eigen::MatrixXd::Identity(1, 1));
    CHECK(gaussian_density(v1, {0.0}) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CovarianceMatrix vhalf = make_cov(Eigen::MatrixXd::Identity(1, 1) * 0.5);
    CHECK(gaussian_density(vhalf, {0.0}) == doctest::Approx(0.5641895835477563).epsilon(1e-14));
    CHECK(gaussian_density(vhalf, {0.7}) == gaussian_density(vhalf, {-0.7}));
    CovarianceMatrix sing;
    sing.matrix = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(gaussian_density(sing, {0.0}), SingularCovariance);
}

TEST_CASE("hermite factor closed forms") {
    CovarianceMatrix v1 = make_cov(Eigen::MatrixXd::Identity(1, 1));
    TruncatedSeries h1 = hermite_factor(v1, {1});
    CHECK(h1.coeff({1}) == doctest::Approx(-1.0));
    TruncatedSeries h2 = hermite_factor(v1, {2});
    CHECK(h2.coeff({2}) == doctest::Approx(1.0));
    CHECK(h2.coeff({0}) == doctest::Approx(-1.0));

    CovarianceMatrix vhalf = make_cov(Eigen::MatrixXd::Identity(1, 1) * 0.5);
    TruncatedSeries h4 = hermite_factor(vhalf, {4});
    CHECK(h4.coeff({0}) == doctest::Approx(12.0).epsilon(1e-13));
    CHECK(h4.coeff({2}) == doctest::Approx(-48.0).epsilon(1e-13));
    CHECK(h4.coeff({4}) == doctest::Approx(16.0).epsilon(1e-13));

    CHECK_THROWS_AS(hermite_factor(v1, {7}), PreconditionError);
}

TEST_CASE("hermite factors match finite differences of the density") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    Eigen::MatrixXd V(2, 2);
    V << 1.0, 0.3, 0.3, 0.7;
    CovarianceMatrix cov = make_cov(V);
    auto phi = [&](const std::vector<double>& x) { return gaussian_density(cov, x); };
    auto t4 = MultiIndexTable::get(2, 4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x{unif(rng), unif(rng)};
        const double fx = phi(x);
        for (std::size_t i = 1; i < t4->size(); ++i) {
            const MultiIndex& nu = t4->at(i);
            const double lhs = hermite_factor(cov, nu).evaluate(x) * fx;
            const double rhs = fd::derivative<double>(phi, x, nu, 0.02);
            CHECK(std::abs(lhs - rhs) <= 1e-5);
        }
    }
}

TEST_CASE("apply_operator basics") {
    CovarianceMatrix vhalf = make_cov(Eigen::MatrixXd::Identity(1, 1) * 0.5);
    TruncatedSeries one = TruncatedSeries::constant(1, 6, 1.0);
    CHECK(apply_operator(one, vhalf, {0.3}) ==
          doctest::Approx(gaussian_density(vhalf, {0.3})).epsilon(1e-14));

    CumulantPolynomial chi3 = cumulant_polynomial(cumulants(moments(lazy(), 4)), 3);
    CHECK(apply_operator(chi3.poly, vhalf, {0.4}) == doctest::Approx(0.0));

    // odd-order operators vanish at the origin
    TruncatedSeries odd(1, 6);
    odd.set_coeff({3}, 1.7);
    odd.set_coeff({1}, -0.2);
    CHECK(apply_operator(odd, vhalf, {0.0}) == doctest::Approx(0.0));
}

TEST_CASE("squared operator of a monomial") {
    CumulantPolynomial chi3 = cumulant_polynomial(cumulants(moments(asym(), 4)), 3);
    CHECK(chi3.poly.coeff({3}) == doctest::Approx(0.6).epsilon(1e-12));
    TruncatedSeries q = squared_operator(chi3);
    CHECK(q.coeff({6}) == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(q.max_abs_coeff_of_parity(1) == 0.0);

    CumulantPolynomial zero = cumulant_polynomial(cumulants(moments(lazy(), 4)), 3);
    CHECK(squared_operator(zero).is_zero(1e-15));
}

TEST_CASE("squared operator reproduces the numerical self-convolution") {
    // (chi3(D) phi_V * chi3(D) phi_V)(x) equals the squared-symbol operator
    // applied to the Gaussian with doubled covariance (transforms multiply,
    // and phi_V-hat squared is phi_{2V}-hat).
    CovarianceMatrix v1 = make_cov(Eigen::MatrixXd::Identity(1, 1));
    CumulantTable c = cumulants(moments(asym(), 4));
    CumulantPolynomial chi3 = cumulant_polynomial(c, 3);
    TruncatedSeries sq = squared_operator(chi3);
    CovarianceMatrix v2 = make_cov(Eigen::MatrixXd::Identity(1, 1) * 2.0);

    auto g = [&](double y) { return apply_operator(chi3.poly, v1, {y}); };
    for (double x : {0.0, 0.5, 1.0, 1.7, 2.3}) {
        // composite Simpson over [-12, 12]
        const int N = 4800;
        const double a = -12.0, h = 24.0 / N;
        double acc = 0.0;
        for (int i = 0; i <= N; ++i) {
            const double y = a + i * h;
            const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * g(y) * g(x - y);
        }
        acc *= h / 3.0;
        CHECK(std::abs(acc - apply_operator(sq, v2, {x})) <= 1e-6);
    }
}

TEST_CASE("lemma approximant frozen value for the lazy walk") {
    EdgeworthModel model = EdgeworthModel::build(lazy());
    CHECK(model.lemma_approximant(100, {0}) ==
          doctest::Approx(0.05634843465683216).epsilon(1e-13));
    // bracket at the mean is exactly 1 + L/n
    for (std::int64_t n : {10, 100, 1000})
        CHECK(model.lemma_approximant(n, {0}) ==
              doctest::Approx(std::pow(M_PI * n, -0.5) * (1.0 + model.corollary_constant() / n))
                  .epsilon(1e-14));
}

TEST_CASE("lemma approximant symmetry for symmetric measures") {
    EdgeworthModel model = EdgeworthModel::build(lazy());
    for (std::int64_t x : {1, 3, 7, 19})
        CHECK(model.lemma_approximant(50, {x}) == model.lemma_approximant(50, {-x}));
}

TEST_CASE("corollary constant") {
    CHECK(EdgeworthModel::build(lazy()).corollary_constant() ==
          doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(EdgeworthModel::build(asym()).corollary_constant() ==
          doctest::Approx(-0.175).epsilon(1e-12));
    CHECK(std::abs(EdgeworthModel::build(flat_kurtosis()).corollary_constant()) <= 1e-15);
}

TEST_CASE("corollary constant is additive over products") {
    const double l1 = EdgeworthModel::build(lazy()).corollary_constant();
    const double l2 = EdgeworthModel::build(asym()).corollary_constant();
    CHECK(EdgeworthModel::build(lazy2d()).corollary_constant() ==
          doctest::Approx(2 * l1).epsilon(1e-13));
    CHECK(EdgeworthModel::build(mixed2d()).corollary_constant() ==
          doctest::Approx(l1 + l2).epsilon(1e-12));
}

TEST_CASE("theorem polynomials of the lazy walk") {
    EdgeworthModel model = EdgeworthModel::build(lazy());
    auto [p3, p6] = model.theorem_polynomials();
    CHECK(p3.is_zero(1e-15));
    // P6(y) = chi4 h4(y) / 24 with h4 = 16 y^4 - 48 y^2 + 12 at V = 1/2
    CHECK(p6.coeff({4}) == doctest::Approx(-16.0 / 96.0).epsilon(1e-13));
    CHECK(p6.coeff({2}) == doctest::Approx(48.0 / 96.0).epsilon(1e-13));
    CHECK(p6.coeff({0}) == doctest::Approx(-12.0 / 96.0).epsilon(1e-13));
    CHECK(p6.coeff({0}) == doctest::Approx(model.corollary_constant()).epsilon(1e-14));
}

TEST_CASE("theorem polynomials of the asymmetric walk") {
    EdgeworthModel model = EdgeworthModel::build(asym());
    auto [p3, p6] = model.theorem_polynomials();
    // q3 = 0.6 (3y - y^3) at V = 1, so P3 = 0.1 y^3 - 0.3 y
    CHECK(p3.coeff({3}) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p3.coeff({1}) == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("flat-kurtosis measure reduces to the plain Gaussian") {
    EdgeworthModel model = EdgeworthModel::build(flat_kurtosis());
    auto [p3, p6] = model.theorem_polynomials();
    CHECK(p3.is_zero(1e-15));
    CHECK(p6.is_zero(1e-14));
    for (std::int64_t x : {0, 2, 5})
        CHECK(model.lemma_approximant(64, {x}) ==
              doctest::Approx(model.gaussian_approximant(64, {x})).epsilon(1e-13));
}

TEST_CASE("structural parity of the correction polynomials") {
    for (const auto& m : {lazy(), asym(), lazy2d(), mixed2d(), flat_kurtosis()}) {
        EdgeworthModel model = EdgeworthModel::build(m);
        auto [p3, p6] = model.theorem_polynomials();
        CHECK(p3.max_abs_coeff_of_parity(0) <= 1e-12);
        CHECK(p6.max_abs_coeff_of_parity(1) <= 1e-12);
        CHECK(model.q3().max_abs_coeff_of_parity(0) <= 1e-12);
        CHECK(model.q4().max_abs_coeff_of_parity(1) <= 1e-12);
        CHECK(model.q33().max_abs_coeff_of_parity(1) <= 1e-12);
    }
}

TEST_CASE("theorem and lemma approximants are algebraically identical") {
    for (const auto& m : {lazy(), asym(), lazy2d()}) {
        EdgeworthModel model = EdgeworthModel::build(m);
        for (std::int64_t n : {1, 7, 100, 999}) {
            const std::int64_t R = m.steplength() * n;
            const std::int64_t step = std::max<std::int64_t>(1, R / 40);
            for (std::int64_t x0 = -R; x0 <= R; x0 += step) {
                LatticePoint x(m.dim(), 0);
                x[0] = x0;
                const double a = model.theorem_approximant(n, x);
                const double b = model.lemma_approximant(n, x);
                const double scale = std::max(std::abs(a), std::abs(b));
                if (scale > 0.0) CHECK(std::abs(a - b) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("theorem path requires a centered measure") {
    LatticeMeasure shift = load_measure("dim 1\nsteplength 2\n0 1/2\n2 1/2\n");
    EdgeworthModel model = EdgeworthModel::build(shift);
    CHECK_THROWS_AS(model.theorem_approximant(10, {10}), PreconditionError);
    CHECK_THROWS_AS(model.theorem_polynomials(), PreconditionError);
    // the lemma path accepts any mean
    CHECK(model.lemma_approximant(10, {10}) > 0.0);
}

TEST_CASE("model requires a maximal measure") {
    LatticeMeasure m = load_measure("dim 2\nsteplength 1\n-1 0 1/4\n0 0 1/2\n1 0 1/4\n");
    CHECK_THROWS_AS(EdgeworthModel::build(m), SingularCovariance);
}

TEST_CASE("approximant mass approaches 1") {
    for (const auto& m : {lazy(), asym()}) {
        EdgeworthModel model = EdgeworthModel::build(m);
        double drift100 = 0.0, drift400 = 0.0;
        for (std::int64_t n : {100, 400}) {
            const std::int64_t R = m.steplength() * n;
            double sum = 0.0;
            for (std::int64_t x = -R; x <= R; ++x) sum += model.lemma_approximant(n, {x});
            const double drift = std::abs(sum - 1.0);
            CHECK(drift <= 1e-9);
            (n == 100 ? drift100 : drift400) = drift;
        }
        CHECK(drift400 <= drift100 + 1e-12);
    }
}

TEST_CASE("model dump has fixed key order and consistent values") {
    EdgeworthModel model = EdgeworthModel::build(lazy());
    const std::string text = model.dump();
    CHECK(text == model.dump());  // deterministic
    auto j = nlohmann::ordered_json::parse(text);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    const std::vector<std::string> expected{"dimension", "E",  "V",  "V_inv", "det_V", "gamma",
                                            "cumulants", "q3", "q4", "q33",   "P3",    "P6",
                                            "L"};
    CHECK(keys == expected);
    CHECK(j["L"].get<double>() == doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(j["V"][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(j["P3"].size() == 0);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "degcausal/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace degcausal;

namespace {

DataMatrix columns(std::initializer_list<Eigen::VectorXd> cols) {
    DataMatrix m;
    m.values.resize(cols.begin()->size(), static_cast<Eigen::Index>(cols.size()));
    Eigen::Index c = 0;
    for (const auto& v : cols) m.values.col(c++) = v;
    m.labels = default_labels(static_cast<int>(cols.size()));
    return m;
}

Eigen::VectorXd normals(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

Eigen::VectorXd uniforms(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

// Least-squares residual of y on x with intercept.
Eigen::VectorXd residual(const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
    const Eigen::VectorXd xc = x.array() - x.mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    return yc - (xc.dot(yc) / xc.squaredNorm()) * xc;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("partial correlation examples") {
    std::mt19937_64 rng(1);
    const Eigen::VectorXd x = normals(10000, rng);
    CHECK(partial_correlation(columns({x, x}), 0, 1, {}) == doctest::Approx(1.0));
    const Eigen::VectorXd w = normals(10000, rng);
    CHECK(std::abs(partial_correlation(columns({x, w}), 0, 1, {})) < 0.05);
    const Eigen::VectorXd y = x + normals(10000, rng);
    const Eigen::VectorXd z = x + 1e-3 * normals(10000, rng);
    CHECK(std::abs(partial_correlation(columns({y, z, x}), 0, 1, {2})) < 0.05);
    CHECK(partial_correlation(columns({x, y}), 0, 1, {}) == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
}

TEST_CASE("partial correlation symmetry, affine invariance and kernel agreement") {
    std::mt19937_64 rng(2);
    const Eigen::VectorXd a = normals(300, rng);
    const Eigen::VectorXd b = a + normals(300, rng);
    const Eigen::VectorXd c = b - 0.5 * a + normals(300, rng);
    const Eigen::VectorXd d = c + normals(300, rng);
    const DataMatrix m = columns({a, b, c, d});
    const DataMatrix scaled = columns({a, Eigen::VectorXd((1e4 * b).array() + 7.0), c, Eigen::VectorXd((-3e-6 * d).array() + 1.0)});
    const PartialCorrelationKernel kernel(m);
    for (std::vector<int> s : {std::vector<int>{}, {1}, {1, 2}}) {
        const double r = partial_correlation(m, 0, 3, s);
        CHECK(r == doctest::Approx(partial_correlation(m, 3, 0, s)).epsilon(1e-12));
        CHECK(-r == doctest::Approx(partial_correlation(scaled, 0, 3, s)).epsilon(1e-9));
        CHECK(r == doctest::Approx(kernel(0, 3, s)).epsilon(1e-9));
    }
}

TEST_CASE("partial correlation errors") {
    std::mt19937_64 rng(3);
    const Eigen::VectorXd a = normals(50, rng);
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(50, 2.0);
    CHECK(kind_of([&] { partial_correlation(columns({a, flat}), 0, 1, {}); }) == ErrorKind::DegenerateInput);
    const Eigen::VectorXd b = normals(50, rng);
    CHECK(kind_of([&] { partial_correlation(columns({a, b, b, b}), 0, 1, {2, 3}); }) == ErrorKind::Numerical);
    CHECK(kind_of([&] { partial_correlation(columns({a, b}), 0, 0, {}); }) == ErrorKind::Input);
}

TEST_CASE("fisher z examples") {
    const CITestResult zero = fisher_z_test(0.0, 40, 0, 0.05);
    CHECK(zero.statistic == 0.0);
    CHECK(zero.p_value == 1.0);
    CHECK(zero.independent);

    const boost::math::normal phi;
    const CITestResult half = fisher_z_test(0.5, 100, 0, 0.05);
    CHECK(half.statistic == doctest::Approx(0.5 * std::log(3.0) * std::sqrt(97.0)).epsilon(1e-12));
    CHECK(half.statistic == doctest::Approx(5.41).epsilon(0.002));
    CHECK(half.p_value < 1e-6);
    CHECK_FALSE(half.independent);

    const CITestResult small = fisher_z_test(0.1, 50, 1, 0.05);
    CHECK(small.statistic == doctest::Approx(0.680).epsilon(0.002));
    CHECK(small.p_value == doctest::Approx(2.0 * boost::math::cdf(boost::math::complement(phi, small.statistic))).epsilon(1e-10));
    CHECK(small.p_value == doctest::Approx(0.496).epsilon(0.002));
    CHECK(small.independent);

    const CITestResult dup = fisher_z_test(1.0, 40, 0, 0.05);
    CHECK(dup.p_value == 0.0);
    CHECK_FALSE(dup.independent);
    CHECK(kind_of([] { fisher_z_test(0.1, 4, 1, 0.05); }) == ErrorKind::TestInfeasible);
}

TEST_CASE("fisher z monotone in |r|") {
    double prev = 2.0;
    for (int t = 0; t <= 100; ++t) {
        const double p = fisher_z_test(-0.0099 * t, 60, 2, 0.05).p_value;
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("BIC deltas") {
    std::mt19937_64 rng(4);
    const Eigen::VectorXd x = normals(1000, rng);
    const Eigen::VectorXd y = 2.0 * x + 0.1 * normals(1000, rng);
    const Eigen::VectorXd w = normals(1000, rng);
    const DataMatrix m = columns({x, y, w});
    CHECK(bic_local_delta(m, 1, {0}, {0}) == 0.0);
    CHECK(bic_local_delta(m, 1, {}, {0}) > 0.0);

    const double d1 = bic_local_delta(m, 1, {}, {2});
    const double d2 = bic_local_delta(m, 1, {2}, {0, 2});
    CHECK(std::abs(d1 + d2 - bic_local_delta(m, 1, {}, {0, 2})) < 1e-8);

    // Oracle: RSS from an explicit regression.
    Eigen::MatrixXd design(1000, 2);
    design.col(0).setOnes();
    design.col(1) = x;
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
    const double rss = (y - design * coef).squaredNorm();
    CHECK(bic_local_score(m, 1, {0}) == doctest::Approx(-1000.0 * std::log(rss / 1000.0) - std::log(1000.0)).epsilon(1e-9));
    const GaussianBicScore cached(m);
    CHECK(cached.local_score(1, {0}) == doctest::Approx(bic_local_score(m, 1, {0})).epsilon(1e-12));

    int negative = 0;
    for (unsigned s = 0; s < 100; ++s) {
        std::mt19937_64 r2(100 + s);
        const Eigen::VectorXd a = normals(1000, r2);
        const Eigen::VectorXd b = normals(1000, r2);
        if (bic_local_delta(columns({a, b}), 0, {}, {1}) < 0.0) ++negative;
    }
    CHECK(negative >= 95);
}

TEST_CASE("pairwise likelihood ratio") {
    std::mt19937_64 rng(5);
    const Eigen::VectorXd g = normals(2000, rng);
    CHECK(std::abs(pairwise_lr(g, g)) < 1e-6);

    const Eigen::VectorXd x = uniforms(10000, rng);
    const Eigen::VectorXd y = x + 0.3 * uniforms(10000, rng);
    const double forward = pairwise_lr(x, y);
    CHECK(forward > 0.0);
    CHECK(pairwise_lr(y, x) < 0.0);
    CHECK(std::abs(forward + pairwise_lr(y, x)) < 1e-8);

    // Residual-independence oracle on a subsample: the causal regression leaves
    // a residual less dependent on its regressor.
    const Eigen::VectorXd xs = x.head(1500);
    const Eigen::VectorXd ys = y.head(1500);
    const double dc_forward = oracle::distance_correlation(residual(ys, xs), xs);
    const double dc_backward = oracle::distance_correlation(residual(xs, ys), ys);
    CHECK(dc_forward < dc_backward);
    CHECK((pairwise_lr(xs, ys) > 0.0) == (dc_forward < dc_backward));

    CHECK(kind_of([&] { pairwise_lr(x, Eigen::VectorXd::Zero(10000)); }) == ErrorKind::DegenerateInput);
    CHECK(kind_of([&] { pairwise_lr(x.head(10), y.head(10)); }) == ErrorKind::Input);
}

TEST_CASE("maxent entropy orders gaussian above uniform") {
    std::mt19937_64 rng(6);
    Eigen::VectorXd g = normals(20000, rng);
    Eigen::VectorXd u = uniforms(20000, rng);
    g = (g.array() - g.mean()) / std::sqrt((g.array() - g.mean()).square().mean());
    u = (u.array() - u.mean()) / std::sqrt((u.array() - u.mean()).square().mean());
    CHECK(maxent_entropy(g) == doctest::Approx(0.5 * std::log(2.0 * M_PI * M_E)).epsilon(0.01));
    CHECK(maxent_entropy(u) < maxent_entropy(g));
}

}  // TEST_SUITE

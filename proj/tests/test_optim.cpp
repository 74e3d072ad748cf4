#include <doctest.h>

#include <limits>

#include "degcausal/optim.hpp"
#include "support.hpp"

using namespace degcausal;

TEST_SUITE("optim") {

TEST_CASE("unconstrained Rosenbrock") {
    const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
        g(0) = -2.0 * a - 400.0 * x(0) * b;
        g(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    const double inf = std::numeric_limits<double>::infinity();
    const BoxLbfgsResult r = minimize_box_lbfgs(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d::Constant(-inf),
                                                Eigen::Vector2d::Constant(inf));
    CHECK(r.converged);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("bounded quadratic matches the clipped minimizer") {
    // Separable quadratic: the box solution is the coordinate-wise clip.
    const Eigen::VectorXd c = (Eigen::VectorXd(5) << 3.0, -2.0, 0.5, -0.5, 10.0).finished();
    const Eigen::VectorXd w = (Eigen::VectorXd(5) << 1.0, 2.0, 0.5, 4.0, 1.5).finished();
    const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = (w.array() * (x - c).array()).matrix();
        return 0.5 * (w.array() * (x - c).array().square()).sum();
    };
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(5);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(5, 1.0);
    const BoxLbfgsResult r = minimize_box_lbfgs(f, Eigen::VectorXd::Constant(5, 0.3), lo, hi);
    const Eigen::VectorXd want = c.cwiseMax(lo).cwiseMin(hi);
    CHECK(r.converged);
    CHECK((r.x - want).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((r.x.array() >= lo.array()).all());
    CHECK((r.x.array() <= hi.array()).all());
}

TEST_CASE("errors") {
    const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = x;
        return std::log(-1.0 - x.squaredNorm());
    };
    CHECK(kind_of([&] { minimize_box_lbfgs(f, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)); }) ==
          ErrorKind::Divergence);
    CHECK(kind_of([&] { minimize_box_lbfgs(f, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(2)); }) ==
          ErrorKind::Input);
}

}  // TEST_SUITE

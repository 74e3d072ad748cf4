#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "degcausal/degradation.hpp"
#include "degcausal/error.hpp"
#include "degcausal/strategy.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace degcausal;

namespace {

SystemSpec noiseless(SystemSpec s) {
    for (auto& p : s.params) {
        p.sigma_x0 = 0.0;
        p.v_a = 0.0;
        p.sigma = 0.0;
        p.sigma_eps = 0.0;
    }
    return s;
}

}  // namespace

TEST_SUITE("degradation") {

TEST_CASE("time_scale") {
    CHECK(time_scale(20.0, 1.0) == 20.0);
    CHECK(time_scale(0.0, 0.5) == 0.0);
    CHECK(time_scale(100.0, 1.5) == doctest::Approx(1000.0).epsilon(1e-14));
    CHECK(kind_of([] { time_scale(-1.0, 1.0); }) == ErrorKind::Domain);
}

TEST_CASE("preset parameters") {
    const SystemSpec a = independent_pair_spec();
    REQUIRE(a.k() == 2);
    CHECK(a.dt == 20.0);
    CHECK(a.m == 51);
    CHECK(a.params[0].mu_x0 == 200.0);
    CHECK(a.params[0].mu_a == -0.04);
    CHECK(a.params[1].mu_a == -0.05);
    CHECK(a.params[0].sigma_eps == 0.4);
    CHECK(a.params[1].sigma_a() == doctest::Approx(0.05 * 0.05));
    CHECK(a.edges.empty());

    const SystemSpec b = coupled_pair_spec();
    CHECK(b.params[1].mu_x0 == 0.0);
    CHECK(b.params[1].sigma_x0 == 0.0);
    REQUIRE(b.edges.size() == 1);
    CHECK(b.edges[0].alpha == 1.0);
    CHECK(b.edges[0].beta == 1.0);
    CHECK(b.truth_graph() == CausalGraph({{0, 1}, {0, 0}}, {"X1", "X2"}));
}

TEST_CASE("noise-free limits") {
    const DegradationDataset a = simulate_system(noiseless(independent_pair_spec()), 1, 7);
    CHECK(a.value(0, 0, 50) == doctest::Approx(160.0).epsilon(1e-12));
    for (int j = 0; j < 51; ++j) CHECK(a.value(0, 0, j) == doctest::Approx(200.0 - 0.04 * 20.0 * j).epsilon(1e-12));

    const DegradationDataset b = simulate_system(noiseless(coupled_pair_spec()), 1, 7);
    for (int j = 0; j < 51; ++j) CHECK(b.value(1, 0, j) == doctest::Approx(200.0 - 0.09 * 20.0 * j).epsilon(1e-12));
}

TEST_CASE("moments against a Monte-Carlo oracle") {
    const SystemSpec spec = independent_pair_spec();
    // Oracle: 10^4 units drawn from the model directly.
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z(0.0, 1.0);
    const auto& p = spec.params[0];
    double inc_sum = 0.0, inc_sq = 0.0;
    long count = 0;
    for (int u = 0; u < 10000; ++u) {
        const double a = p.mu_a + p.sigma_a() * z(rng);
        double prev = p.mu_x0 + p.sigma_x0 * z(rng);
        double eps_prev = p.sigma_eps * z(rng);
        double latent = prev;
        for (int j = 1; j < spec.m; ++j) {
            latent += a * spec.dt + p.sigma * std::sqrt(spec.dt) * z(rng);
            const double eps = p.sigma_eps * z(rng);
            const double d = latent + eps - (prev + eps_prev);
            inc_sum += d;
            inc_sq += d * d;
            ++count;
            prev = latent;
            eps_prev = eps;
        }
    }
    const double oracle_var = inc_sq / count - (inc_sum / count) * (inc_sum / count);
    const double model_var = p.sigma * p.sigma * spec.dt + 2.0 * p.sigma_eps * p.sigma_eps;
    CHECK(std::abs(oracle_var - model_var) / model_var < 0.02);

    const DegradationDataset d = simulate_system(spec, 10, 2024);
    double mean0 = 0.0;
    for (int i = 0; i < 10; ++i) mean0 += d.value(0, i, 0) / 10.0;
    CHECK(std::abs(mean0 - 200.0) < 3.0 / std::sqrt(10.0));
    const DataMatrix s2 = build_s2(d);
    const Eigen::VectorXd c = s2.values.col(0).array() - s2.values.col(0).mean();
    const double var = c.squaredNorm() / static_cast<double>(c.size() - 1);
    CHECK(std::abs(var - model_var) / model_var < 0.2);
    CHECK(std::abs(var - oracle_var) / oracle_var < 0.2);
}

TEST_CASE("noise-only increments converge to the diffusion variance") {
    SystemSpec s = independent_pair_spec();
    for (auto& p : s.params) {
        p.mu_a = 0.0;
        p.sigma_eps = 0.0;
        p.sigma_x0 = 0.0;
        p.gamma = 1.0;
    }
    const DataMatrix m = build_s2(simulate_system(s, 400, 1));
    const double expected = 0.1 * 0.1 * 20.0;
    for (int l = 0; l < 2; ++l) {
        const Eigen::VectorXd col = m.values.col(l);
        CHECK(std::abs(col.mean()) < 4.0 * std::sqrt(expected / col.size()));
        const double var = (col.array() - col.mean()).square().sum() / (col.size() - 1);
        CHECK(std::abs(var - expected) / expected < 0.05);
    }
}

TEST_CASE("determinism and seed sensitivity") {
    const SystemSpec s = coupled_pair_spec();
    CHECK(simulate_system(s, 5, 42) == simulate_system(s, 5, 42));
    CHECK_FALSE(simulate_system(s, 5, 42) == simulate_system(s, 5, 43));
    // Unit substreams do not depend on how many units are simulated.
    const DegradationDataset small = simulate_system(s, 3, 42);
    const DegradationDataset large = simulate_system(s, 6, 42);
    for (int i = 0; i < 3; ++i) CHECK(small.unit(i).values == large.unit(i).values);
}

TEST_CASE("observed equals latent plus measurement error; coupling uses latent parent") {
    SystemSpec s = coupled_pair_spec();
    const SimulatedPaths p = simulate_paths(s, 2, 5);
    const double resid = (p.observed.unit(0).values - p.latent.unit(0).values).array().abs().maxCoeff();
    CHECK(resid > 0.0);
    CHECK(resid < 5.0 * 0.4);
    SystemSpec obs = s;
    obs.coupling = CouplingInput::Observed;
    const SimulatedPaths q = simulate_paths(obs, 2, 5);
    CHECK(q.observed.unit(0).values.col(0) == p.observed.unit(0).values.col(0));
    CHECK_FALSE(q.observed.unit(0).values.col(1) == p.observed.unit(0).values.col(1));
}

TEST_CASE("causal asymmetry of increments") {
    const DegradationDataset d = simulate_system(coupled_pair_spec(), 10, 8);
    const DataMatrix m = build_s2(d);
    // Latent coupling: cov = sigma^2 dt + var(a) dt^2; var1 adds 2 sigma_eps^2,
    // var2 adds its own diffusion and 2 sigma_eps^2.
    const double shared = 0.1 * 0.1 * 20.0 + std::pow(0.05 * 0.04 * 20.0, 2);
    const double noise = 2.0 * 0.4 * 0.4;
    const double expected = shared / std::sqrt((shared + noise) * (shared + 0.1 * 0.1 * 20.0 + noise));
    const double r = oracle::pearson(m.values.col(0), m.values.col(1));
    CHECK(std::abs(r - expected) < 0.12);

    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::rotate(perm.begin(), perm.begin() + 3, perm.end());
    Eigen::VectorXd x1(m.rows()), x2(m.rows());
    const int per = d.m() - 1;
    for (int i = 0; i < 10; ++i) {
        x1.segment(i * per, per) = m.values.col(0).segment(perm[static_cast<std::size_t>(i)] * per, per);
        x2.segment(i * per, per) = m.values.col(1).segment(i * per, per);
    }
    CHECK(std::abs(oracle::pearson(x1, x2)) < 0.1);

    // Literal observed-parent coupling shares the measurement error too.
    SystemSpec obs = coupled_pair_spec();
    obs.coupling = CouplingInput::Observed;
    const DataMatrix mo = build_s2(simulate_system(obs, 10, 8));
    CHECK(oracle::pearson(mo.values.col(0), mo.values.col(1)) > 0.5);
}

TEST_CASE("coupling domain error") {
    CausalEdgeFunction g{0, 1, 1.0, 0.5};
    CHECK(g.evaluate(4.0) == doctest::Approx(2.0));
    CHECK(kind_of([&] { g.evaluate(-1.0); }) == ErrorKind::Domain);
    CausalEdgeFunction integer{0, 1, 2.0, 2.0};
    CHECK(integer.evaluate(-3.0) == doctest::Approx(18.0));

    SystemSpec s = coupled_pair_spec(1.0, 0.5);
    s.params[0].mu_x0 = -5.0;
    CHECK(kind_of([&] { simulate_system(s, 1, 1); }) == ErrorKind::Domain);
}

TEST_CASE("spec validation") {
    SystemSpec s = coupled_pair_spec();
    s.edges.push_back({1, 0, 1.0, 1.0});
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::Config);
    SystemSpec t = independent_pair_spec();
    t.dt = 0.0;
    CHECK(kind_of([&] { t.validate(); }) == ErrorKind::Config);
    WienerParams w;
    w.sigma = -1.0;
    CHECK(kind_of([&] { w.validate(); }) == ErrorKind::Config);
    w.sigma = 0.0;
    w.gamma = 0.0;
    CHECK(kind_of([&] { w.validate(); }) == ErrorKind::Config);
}

TEST_CASE("filter case closed forms") {
    const double f0 = filter_center_frequency(5000, 15000, 25000, 8e-10, 1.2e-9);
    const double gain = filter_peak_gain_db(5000, 25000, 8e-10, 1.2e-9);
    CHECK(std::abs(f0 - 16780.0) / 16780.0 < 0.005);
    CHECK(std::abs(gain - 9.54) / 9.54 < 0.005);
    CHECK(filter_peak_gain_db(5000, 50000, 8e-10, 1.2e-9) - gain == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("filter case dataset") {
    FilterComponentSpec spec = filter_table_spec();
    CHECK(spec.measurements() == 21);
    const DegradationDataset d = simulate_filter_case(spec, 3);
    CHECK(d.n() == 20);
    CHECK(d.m() == 21);
    CHECK(d.labels() == std::vector<std::string>{"R1", "R2", "R3", "C1", "C2", "f0", "Gain"});
    CHECK(d.unit(0).times.back() == doctest::Approx(10.0));

    spec.emit_latent_components = true;
    const DegradationDataset lat = simulate_filter_case(spec, 3);
    for (const auto& u : lat.units())
        for (Eigen::Index j = 0; j < u.values.rows(); ++j) {
            const auto r = u.values.row(j);
            CHECK(std::abs(filter_center_frequency(r(0), r(1), r(2), r(3), r(4)) - r(5)) <= 1e-9 * std::abs(r(5)));
            CHECK(std::abs(filter_peak_gain_db(r(0), r(2), r(3), r(4)) - r(6)) <= 1e-9 * std::abs(r(6)));
        }
    // Latent-driven performance columns do not depend on the emission mode.
    CHECK(lat.unit(4).values.col(5) == d.unit(4).values.col(5));

    const CausalGraph truth = filter_truth_graph();
    CHECK(truth.parents(5).size() == 5);
    CHECK(truth.parents(6) == std::vector<int>{0, 2, 3, 4});

    FilterComponentSpec broken = filter_table_spec();
    broken.components[3].mu_a = -1e-10;  // C1 crosses zero within ten years
    CHECK(kind_of([&] { simulate_filter_case(broken, 1); }) == ErrorKind::Domain);
}

}  // TEST_SUITE

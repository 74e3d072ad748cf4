#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "degcausal/discovery.hpp"
#include "degcausal/strategy.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace degcausal;

namespace {

DataMatrix from_columns(const std::vector<Eigen::VectorXd>& cols) {
    DataMatrix m;
    m.values.resize(cols[0].size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) m.values.col(static_cast<Eigen::Index>(c)) = cols[c];
    m.labels = default_labels(static_cast<int>(cols.size()));
    return m;
}

Eigen::VectorXd draw(int n, std::mt19937_64& rng, bool uniform) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform ? u(rng) : z(rng);
    return v;
}

DataMatrix permute_columns(const DataMatrix& m, const std::vector<int>& perm) {
    DataMatrix out = m;
    for (std::size_t c = 0; c < perm.size(); ++c) {
        out.values.col(static_cast<Eigen::Index>(c)) = m.values.col(perm[c]);
        out.labels[c] = m.labels[static_cast<std::size_t>(perm[c])];
    }
    return out;
}

DataMatrix shuffle_rows(const DataMatrix& m, unsigned seed) {
    std::vector<int> idx(static_cast<std::size_t>(m.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    DataMatrix out = m;
    for (int r = 0; r < m.rows(); ++r) out.values.row(r) = m.values.row(idx[static_cast<std::size_t>(r)]);
    return out;
}

// Graph over the permuted columns expressed back in the original order.
CausalGraph unpermute(const CausalGraph& g, const std::vector<int>& perm, const std::vector<std::string>& labels) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.k()), std::vector<int>(static_cast<std::size_t>(g.k()), 0));
    for (int a = 0; a < g.k(); ++a)
        for (int b = 0; b < g.k(); ++b)
            if (g.at(a, b)) adj[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])][static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])] = 1;
    return CausalGraph(adj, labels);
}

DegradationDataset series_dataset(const std::vector<Eigen::MatrixXd>& blocks) {
    std::vector<UnitSeries> units;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        UnitSeries u;
        u.id = std::to_string(i + 1);
        for (Eigen::Index j = 0; j < blocks[i].rows(); ++j) u.times.push_back(static_cast<double>(j));
        u.values = blocks[i];
        units.push_back(std::move(u));
    }
    return DegradationDataset(default_labels(static_cast<int>(blocks[0].cols())), std::move(units));
}

}  // namespace

TEST_SUITE("discovery") {

TEST_CASE("method names and defaults") {
    CHECK(parse_method("stable-pc") == Method::StablePc);
    CHECK(parse_method("notears-mlp") == Method::NotearsMlp);
    CHECK(kind_of([] { parse_method("caps"); }) == ErrorKind::EnumeratedChoice);
    CHECK(all_methods().size() == 6);
    CHECK(non_temporal_methods().size() == 5);
    for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);

    const MethodConfig c;
    CHECK(c.pc.alpha == 0.05);
    CHECK(c.lingam.edge_threshold == 0.1);
    CHECK(c.notears_linear.l1 == 0.1);
    CHECK(c.notears_linear.max_outer_iter == 100);
    CHECK(c.notears_linear.h_tol == 1e-8);
    CHECK(c.notears_linear.rho_max == 1e16);
    CHECK(c.notears_linear.edge_threshold == 0.1);
    CHECK(c.notears_mlp.l1 == 0.01);
    CHECK(c.notears_mlp.l2 == 0.01);
    CHECK(c.notears_mlp.hidden_units == 10);
    CHECK(c.notears_mlp.edge_threshold == 0.1);
    CHECK(c.granger.max_lag == 2);

    MethodConfig bad;
    bad.notears_linear.h_tol = 0.0;
    CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::Config);
}

TEST_CASE("stable-pc on independent columns keeps the type-I rate") {
    int empty = 0;
    for (unsigned s = 0; s < 100; ++s) {
        std::mt19937_64 rng(s);
        const DataMatrix m = from_columns({draw(500, rng, false), draw(500, rng, false)});
        if (stable_pc(m, {}).graph.edge_count() == 0) ++empty;
    }
    CHECK(empty >= 88);
}

TEST_CASE("stable-pc and ges recover a v-structure") {
    std::mt19937_64 rng(7);
    const Eigen::VectorXd x = draw(1000, rng, false);
    const Eigen::VectorXd y = draw(1000, rng, false);
    const Eigen::VectorXd z = x + y + draw(1000, rng, false);
    const DataMatrix m = from_columns({x, y, z});
    CausalGraph want(3);
    want.add_directed(0, 2);
    want.add_directed(1, 2);
    CHECK(stable_pc(m, {}).graph == want);
    CHECK(ges(m, {}).graph == want);
}

TEST_CASE("stable-pc and ges match the enumerated CPDAG for every 3-node DAG") {
    // Large samples and a strict alpha so that CI decisions follow d-separation;
    // what is checked here is the search, not the test's power.
    unsigned seed = 1000;
    const PcConfig strict{1e-4};
    for (const auto& dag : oracle::all_dags(3)) {
        const DataMatrix m = oracle::sample_linear_sem(dag, 100000, seed++);
        const CausalGraph want = oracle::brute_force_cpdag(dag);
        CAPTURE(want);
        CHECK(stable_pc(m, strict).graph == want);
        CHECK(ges(m, {}).graph == want);
    }
}

TEST_CASE("column permutation and row shuffle invariance") {
    CausalGraph dag(4);
    dag.add_directed(0, 1);
    dag.add_directed(1, 2);
    dag.add_directed(3, 2);
    const DataMatrix m = oracle::sample_linear_sem(dag, 2000, 77);
    const std::vector<int> perm{2, 0, 3, 1};
    const DataMatrix p = permute_columns(m, perm);
    const DataMatrix s = shuffle_rows(m, 3);
    const MethodConfig cfg;
    CHECK(unpermute(stable_pc(p, cfg.pc).graph, perm, m.labels) == stable_pc(m, cfg.pc).graph);
    CHECK(unpermute(ges(p, cfg.ges).graph, perm, m.labels) == ges(m, cfg.ges).graph);
    for (Method method : non_temporal_methods()) {
        CAPTURE(to_string(method));
        CHECK(discover(method, s, cfg, 5).graph == discover(method, m, cfg, 5).graph);
    }
}

TEST_CASE("pc and ges reject too few rows") {
    std::mt19937_64 rng(1);
    const DataMatrix m = from_columns({draw(4, rng, false), draw(4, rng, false)});
    CHECK(kind_of([&] { stable_pc(m, {}); }) == ErrorKind::TestInfeasible);
    CHECK(kind_of([&] { ges(m, {}); }) == ErrorKind::TestInfeasible);
}

TEST_CASE("independent pair under S2 gives an empty graph for pc and ges") {
    const DataMatrix m = build_s2(simulate_system(independent_pair_spec(), 10, 31));
    CHECK(stable_pc(m, {}).graph.edge_count() == 0);
    CHECK(ges(m, {}).graph.edge_count() == 0);
}

TEST_CASE("coupled pair under S2: pc and ges give an undirected edge") {
    const DataMatrix m = build_s2(simulate_system(coupled_pair_spec(), 10, 12));
    CHECK(classify_pairwise(stable_pc(m, {}).graph) == PairwiseOutcome::Undirected);
    CHECK(classify_pairwise(ges(m, {}).graph) == PairwiseOutcome::Undirected);
}

TEST_CASE("direct-lingam examples") {
    std::mt19937_64 rng(9);
    const DataMatrix indep = from_columns({draw(1000, rng, true), draw(1000, rng, true)});
    const DiscoveryResult e = direct_lingam(indep, {});
    CHECK(e.graph.edge_count() == 0);
    CHECK(e.is_dag);

    const Eigen::VectorXd x = draw(10000, rng, true);
    const Eigen::VectorXd y = 0.8 * x + 0.3 * draw(10000, rng, true);
    const DiscoveryResult r = direct_lingam(from_columns({y, x}), {});
    CHECK(lingam_causal_order(from_columns({y, x})) == std::vector<int>{1, 0});
    CHECK(r.graph.directed(1, 0));
    CHECK(r.graph.edge_count() == 1);
    CHECK(r.weights(1, 0) == doctest::Approx(0.8).epsilon(0.02));

    CHECK(kind_of([&] { direct_lingam(from_columns({x.head(10), y.head(10)}), {}); }) == ErrorKind::Input);
}

TEST_CASE("matrix exponential and acyclicity") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.0, 0.7);
    for (int k = 1; k <= 5; ++k) {
        Eigen::MatrixXd a(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) a(i, j) = z(rng);
        const Eigen::MatrixXd want = a.exp();
        CHECK((matrix_exponential(a) - want).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());
    }

    const AcyclicityValue zero = acyclicity_h(Eigen::MatrixXd::Zero(3, 3));
    CHECK(zero.h == 0.0);
    CHECK(zero.gradient.isZero());

    Eigen::Matrix2d two_cycle;
    two_cycle << 0, 1, 1, 0;
    CHECK(acyclicity_h(two_cycle).h == doctest::Approx(std::exp(1.0) + std::exp(-1.0) - 2.0).epsilon(1e-12));

    for (const auto& dag : oracle::all_dags(4)) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (dag.directed(i, j)) w(i, j) = 1.0 + z(rng);
        CHECK(std::abs(acyclicity_h(w).h) <= 1e-12);
    }
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 1) = std::nan("");
    CHECK(kind_of([&] { acyclicity_h(bad); }) == ErrorKind::Numerical);
}

TEST_CASE("acyclicity gradient matches central differences") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 0.5);
    for (int k = 2; k <= 5; ++k) {
        Eigen::MatrixXd w(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) w(i, j) = i == j ? 0.0 : z(rng);
        const Eigen::MatrixXd g = acyclicity_h(w).gradient;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const double eps = 1e-6;
                Eigen::MatrixXd up = w, dn = w;
                up(i, j) += eps;
                dn(i, j) -= eps;
                const double fd = (acyclicity_h(up).h - acyclicity_h(dn).h) / (2 * eps);
                CHECK(std::abs(fd - g(i, j)) <= 1e-6 * std::max(1.0, std::abs(g(i, j))));
            }
    }
}

TEST_CASE("notears-linear smooth objective gradient") {
    std::mt19937_64 rng(10);
    const DataMatrix m = oracle::sample_linear_sem(oracle::all_dags(3)[7], 60, 3);
    const Eigen::MatrixXd x = m.values.rowwise() - m.values.colwise().mean();
    std::normal_distribution<double> z(0.0, 0.4);
    Eigen::MatrixXd w(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) w(i, j) = i == j ? 0.0 : z(rng);
    Eigen::MatrixXd g, scratch;
    notears_linear_smooth(x, w, 10.0, 0.5, g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double eps = 1e-6;
            Eigen::MatrixXd up = w, dn = w;
            up(i, j) += eps;
            dn(i, j) -= eps;
            const double fd = (notears_linear_smooth(x, up, 10.0, 0.5, scratch) - notears_linear_smooth(x, dn, 10.0, 0.5, scratch)) / (2 * eps);
            CHECK(std::abs(fd - g(i, j)) <= 1e-6 * std::max(1.0, std::abs(g(i, j))));
        }
}

TEST_CASE("notears-linear recovery") {
    std::mt19937_64 rng(11);
    const Eigen::VectorXd x = draw(1000, rng, false);
    const Eigen::VectorXd y = 0.9 * x + draw(1000, rng, false);
    const DiscoveryResult r = notears_linear(from_columns({x, y}), {});
    CHECK(r.converged);
    CHECK(r.is_dag);
    CHECK(r.final_h <= 1e-8);
    CHECK(r.weights(0, 1) == doctest::Approx(0.9).epsilon(0.15));
    CHECK(std::abs(r.weights(1, 0)) <= 0.1);
    CHECK(r.graph.directed(0, 1));

    const DiscoveryResult exact = notears_linear(from_columns({x, 1.7 * x}), {});
    CHECK(exact.graph.edge_count() == 1);
    CHECK(is_acyclic(exact.graph));

    const DataMatrix indep = build_s2(simulate_system(independent_pair_spec(), 10, 4));
    CHECK(notears_linear(indep, {}).graph.edge_count() == 0);
}

TEST_CASE("notears-mlp gradient matches central differences") {
    std::mt19937_64 rng(12);
    Eigen::MatrixXd x(50, 2);
    x.col(0) = draw(50, rng, false);
    x.col(1) = x.col(0).array().tanh().matrix() + 0.3 * draw(50, rng, false);
    x = x.rowwise() - x.colwise().mean();
    MlpParameters p = MlpParameters::initial(2, 5, 99);
    // move W1 off zero so every term is active
    std::uniform_real_distribution<double> u(0.05, 0.5);
    for (Eigen::Index t = 0; t < p.size(); ++t) p.theta(t) += u(rng);
    NotearsMlpConfig cfg;
    cfg.hidden_units = 5;
    Eigen::VectorXd g(p.size()), scratch(p.size());
    notears_mlp_objective(x, p, cfg, 3.0, 0.7, g);
    double worst = 0.0;
    for (Eigen::Index t = 0; t < p.size(); ++t) {
        const double eps = 1e-6;
        MlpParameters up = p, dn = p;
        up.theta(t) += eps;
        dn.theta(t) -= eps;
        const double fd = (notears_mlp_objective(x, up, cfg, 3.0, 0.7, scratch) - notears_mlp_objective(x, dn, cfg, 3.0, 0.7, scratch)) / (2 * eps);
        worst = std::max(worst, std::abs(fd - g(t)) / std::max(1.0, std::abs(g(t))));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("notears-mlp is deterministic in its seed and returns a DAG") {
    const DataMatrix m = build_s2(simulate_system(coupled_pair_spec(), 3, 6));
    NotearsMlpConfig cfg;
    const DiscoveryResult a = notears_mlp(m, cfg, 21);
    const DiscoveryResult b = notears_mlp(m, cfg, 21);
    CHECK(a.graph == b.graph);
    CHECK(a.weights == b.weights);
    CHECK(is_acyclic(a.graph));
    CHECK(a.is_dag);
}

TEST_CASE("threshold_to_dag") {
    Eigen::Matrix2d w;
    w << 0, 0.5, -0.3, 0;
    const CausalGraph g = threshold_to_dag(w, 0.1, default_labels(2));
    CHECK(g.directed(0, 1));
    CHECK(g.edge_count() == 1);
    Eigen::Matrix3d c;
    c << 0, 0.9, 0, 0, 0, 0.8, 0.2, 0, 0;
    const CausalGraph h = threshold_to_dag(c, 0.1, default_labels(3));
    CHECK(h.directed(0, 1));
    CHECK(h.directed(1, 2));
    CHECK_FALSE(h.adjacent(2, 0));
    CHECK(threshold_to_dag(c, 0.85, default_labels(3)).edge_count() == 1);
}

TEST_CASE("granger examples") {
    int empty = 0;
    for (unsigned s = 0; s < 200; ++s) {
        std::mt19937_64 rng(s);
        Eigen::MatrixXd b(200, 2);
        b.col(0) = draw(200, rng, false);
        b.col(1) = draw(200, rng, false);
        if (granger_pairwise(series_dataset({b}), {}).graph.edge_count() == 0) ++empty;
    }
    // (1 - 0.05)^2 = 0.9025; 4 binomial sd at 200 draws is about 0.084.
    CHECK(std::abs(empty / 200.0 - 0.9025) < 0.084);

    std::mt19937_64 rng(3);
    Eigen::MatrixXd b(1000, 2);
    b.col(0) = draw(1000, rng, false);
    const Eigen::VectorXd e = draw(1000, rng, false);
    b(0, 1) = e(0);
    for (int t = 1; t < 1000; ++t) b(t, 1) = 0.8 * b(t - 1, 0) + e(t);
    const CausalGraph g = granger_pairwise(series_dataset({b}), {}).graph;
    CHECK(g.directed(0, 1));

    CHECK(kind_of([&] { granger_pairwise(series_dataset({b.topRows(6)}), {}); }) == ErrorKind::TestInfeasible);
    GrangerConfig aic;
    aic.aic_lag_selection = true;
    CHECK(kind_of([&] { granger_pairwise(series_dataset({b.topRows(12)}), aic); }) == ErrorKind::TestInfeasible);
    CHECK(granger_pairwise(series_dataset({b}), aic).graph.directed(0, 1));
}

TEST_CASE("every DAG-flagged result is acyclic") {
    const DegradationDataset d = simulate_system(coupled_pair_spec(), 4, 2);
    const MethodConfig cfg;
    for (Method m : all_methods()) {
        const DiscoveryResult r = discover(m, d, Strategy::IncrementStacking, cfg, 1);
        if (r.is_dag) CHECK(is_acyclic(r.graph));
    }
}

}  // TEST_SUITE

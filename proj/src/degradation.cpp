#include "degcausal/degradation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "degcausal/error.hpp"
#include "degcausal/rng.hpp"

namespace degcausal {

double WienerParams::sigma_a() const noexcept { return v_a * std::abs(mu_a); }

void WienerParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::Config, what);
    };
    require(std::isfinite(mu_x0) && std::isfinite(mu_a), "wiener params: non-finite mean");
    require(sigma_x0 >= 0.0, "wiener params: sigma_x0 must be >= 0");
    require(v_a >= 0.0, "wiener params: v_a must be >= 0");
    require(sigma >= 0.0, "wiener params: sigma must be >= 0");
    require(sigma_eps >= 0.0, "wiener params: sigma_eps must be >= 0");
    require(gamma > 0.0, "wiener params: gamma must be > 0");
}

double CausalEdgeFunction::evaluate(double x) const {
    const bool integral_beta = std::floor(beta) == beta;
    if ((x < 0.0 && !integral_beta) || (x == 0.0 && beta < 0.0)) {
        std::ostringstream msg;
        msg << "coupling " << parent << "->" << child << ": x^" << beta << " undefined at x=" << x;
        throw Error(ErrorKind::Domain, msg.str());
    }
    return alpha * std::pow(x, beta);
}

void SystemSpec::validate() const {
    if (params.empty()) throw Error(ErrorKind::Config, "system spec: no parameters");
    for (const auto& p : params) p.validate();
    if (!(dt > 0.0)) throw Error(ErrorKind::Config, "system spec: dt must be > 0");
    if (m < 2) throw Error(ErrorKind::Config, "system spec: m must be >= 2");
    if (!labels.empty() && static_cast<int>(labels.size()) != k())
        throw Error(ErrorKind::Config, "system spec: label count does not match parameter count");
    for (const auto& e : edges) {
        if (e.parent < 0 || e.parent >= k() || e.child < 0 || e.child >= k() || e.parent == e.child)
            throw Error(ErrorKind::Config, "system spec: edge endpoint out of range");
    }
    if (!is_acyclic(truth_graph())) throw Error(ErrorKind::Config, "system spec: edge list is cyclic");
    (void)topological_order();
}

CausalGraph SystemSpec::truth_graph() const {
    CausalGraph g(k(), labels.empty() ? default_labels(k()) : labels);
    for (const auto& e : edges) g.add_directed(e.parent, e.child);
    return g;
}

std::vector<int> SystemSpec::topological_order() const {
    const int kk = k();
    std::vector<int> indegree(static_cast<std::size_t>(kk), 0);
    for (const auto& e : edges) ++indegree[static_cast<std::size_t>(e.child)];
    std::vector<int> order;
    std::vector<char> done(static_cast<std::size_t>(kk), 0);
    while (static_cast<int>(order.size()) < kk) {
        int pick = -1;
        for (int v = 0; v < kk; ++v)
            if (!done[static_cast<std::size_t>(v)] && indegree[static_cast<std::size_t>(v)] == 0) {
                pick = v;
                break;
            }
        if (pick < 0) throw Error(ErrorKind::Config, "system spec: edge list is cyclic");
        done[static_cast<std::size_t>(pick)] = 1;
        order.push_back(pick);
        for (const auto& e : edges)
            if (e.parent == pick) --indegree[static_cast<std::size_t>(e.child)];
    }
    return order;
}

SystemSpec independent_pair_spec() {
    SystemSpec s;
    WienerParams x1{200.0, 1.0, -0.04, 0.05, 0.1, 0.4, 1.0};
    WienerParams x2{200.0, 1.0, -0.05, 0.05, 0.1, 0.4, 1.0};
    s.params = {x1, x2};
    s.dt = 20.0;
    s.m = 51;
    s.labels = {"X1", "X2"};
    return s;
}

SystemSpec coupled_pair_spec(double alpha, double beta) {
    SystemSpec s = independent_pair_spec();
    s.params[1].mu_x0 = 0.0;
    s.params[1].sigma_x0 = 0.0;
    s.edges = {CausalEdgeFunction{0, 1, alpha, beta}};
    return s;
}

DegradationDataset::DegradationDataset(std::vector<std::string> labels, std::vector<UnitSeries> units, std::uint64_t seed)
    : labels_(std::move(labels)), units_(std::move(units)), seed_(seed) {
    for (const auto& u : units_) {
        if (u.values.cols() != static_cast<Eigen::Index>(labels_.size()))
            throw Error(ErrorKind::Input, "unit " + u.id + ": column count does not match labels");
        if (u.values.rows() != static_cast<Eigen::Index>(u.times.size()))
            throw Error(ErrorKind::Input, "unit " + u.id + ": time count does not match rows");
        if (!u.values.allFinite()) throw Error(ErrorKind::Input, "unit " + u.id + ": non-finite value");
    }
}

bool DegradationDataset::is_rectangular() const {
    if (units_.empty()) return true;
    const auto& t0 = units_.front().times;
    for (const auto& u : units_)
        if (u.times != t0) return false;
    return true;
}

int DegradationDataset::m() const {
    if (units_.empty()) return 0;
    if (!is_rectangular()) throw Error(ErrorKind::Input, "dataset is not rectangular");
    return static_cast<int>(units_.front().times.size());
}

double DegradationDataset::value(int l, int i, int j) const { return unit(i).values(j, l); }

DegradationDataset DegradationDataset::select_units(const std::vector<int>& indices) const {
    std::vector<UnitSeries> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(unit(i));
    return DegradationDataset(labels_, std::move(out), seed_);
}

bool operator==(const DegradationDataset& a, const DegradationDataset& b) {
    if (a.labels_ != b.labels_ || a.units_.size() != b.units_.size()) return false;
    for (std::size_t i = 0; i < a.units_.size(); ++i) {
        const auto& ua = a.units_[i];
        const auto& ub = b.units_[i];
        if (ua.id != ub.id || ua.times != ub.times) return false;
        if (ua.values.rows() != ub.values.rows() || ua.values.cols() != ub.values.cols()) return false;
        if (ua.values != ub.values) return false;
    }
    return true;
}

double time_scale(double t, double gamma) {
    if (t < 0.0) throw Error(ErrorKind::Domain, "time scale: negative time");
    return std::pow(t, gamma);
}

SimulatedPaths simulate_paths(const SystemSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw Error(ErrorKind::Config, "unit count must be >= 1");
    const int k = spec.k();
    const int m = spec.m;
    const auto order = spec.topological_order();
    const auto labels = spec.labels.empty() ? default_labels(k) : spec.labels;

    std::vector<double> times(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) times[static_cast<std::size_t>(j)] = j * spec.dt;

    std::vector<UnitSeries> observed;
    std::vector<UnitSeries> latent;
    observed.reserve(static_cast<std::size_t>(n));
    latent.reserve(static_cast<std::size_t>(n));
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd lat(m, k);
        Eigen::MatrixXd obs(m, k);
        for (int l : order) {
            const auto& p = spec.params[static_cast<std::size_t>(l)];
            Rng rng = make_rng(seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(l)});
            const double x0 = p.mu_x0 + p.sigma_x0 * normal(rng);
            const double a = p.mu_a + p.sigma_a() * normal(rng);
            double brownian = 0.0;
            for (int j = 0; j < m; ++j) {
                if (j > 0) brownian += std::sqrt(spec.dt) * normal(rng);
                lat(j, l) = x0 + a * time_scale(times[static_cast<std::size_t>(j)], p.gamma) + p.sigma * brownian;
            }
            for (const auto& e : spec.edges) {
                if (e.child != l) continue;
                const auto& src = spec.coupling == CouplingInput::Latent ? lat : obs;
                for (int j = 0; j < m; ++j) {
                    try {
                        lat(j, l) += e.evaluate(src(j, e.parent));
                    } catch (const Error& err) {
                        std::ostringstream msg;
                        msg << "simulation domain error at unit " << i << ", time " << times[static_cast<std::size_t>(j)]
                            << ": " << err.what();
                        throw Error(ErrorKind::Domain, msg.str());
                    }
                }
            }
            for (int j = 0; j < m; ++j) obs(j, l) = lat(j, l) + p.sigma_eps * normal(rng);
        }
        const std::string id = std::to_string(i + 1);
        observed.push_back(UnitSeries{id, times, std::move(obs)});
        latent.push_back(UnitSeries{id, times, std::move(lat)});
    }
    return SimulatedPaths{DegradationDataset(labels, std::move(observed), seed),
                          DegradationDataset(labels, std::move(latent), seed)};
}

DegradationDataset simulate_system(const SystemSpec& spec, int n, std::uint64_t seed) {
    return simulate_paths(spec, n, seed).observed;
}

int FilterComponentSpec::measurements() const {
    return static_cast<int>(std::llround(horizon / interval)) + 1;
}

void FilterComponentSpec::validate() const {
    for (const auto& c : components) c.validate();
    if (units < 1) throw Error(ErrorKind::Config, "filter case: units must be >= 1");
    if (!(interval > 0.0) || !(horizon > 0.0)) throw Error(ErrorKind::Config, "filter case: interval and horizon must be > 0");
    if (measurements() < 2) throw Error(ErrorKind::Config, "filter case: fewer than two measurements");
}

FilterComponentSpec filter_table_spec() {
    FilterComponentSpec s;
    s.components = {
        WienerParams{5000.0, 250.0, 100.0, 0.01, 100.0, 25.0, 1.0},
        WienerParams{15000.0, 750.0, 300.0, 0.01, 300.0, 75.0, 1.0},
        WienerParams{25000.0, 1250.0, 500.0, 0.01, 500.0, 125.0, 1.0},
        WienerParams{8e-10, 8e-11, -2.4e-11, 0.01, 1.6e-11, 4e-12, 1.0},
        WienerParams{1.2e-9, 1.2e-10, -3.6e-11, 0.01, 2.4e-11, 6e-12, 1.0},
    };
    return s;
}

double filter_center_frequency(double r1, double r2, double r3, double c1, double c2) {
    return std::sqrt((r1 + r2) / (r1 * r2 * r3 * c1 * c2)) / (2.0 * std::numbers::pi);
}

double filter_peak_gain_db(double r1, double r3, double c1, double c2) {
    return 20.0 * std::log10(c2 * r3 / (r1 * (c1 + c2)));
}

DegradationDataset simulate_filter_case(const FilterComponentSpec& spec, std::uint64_t seed) {
    spec.validate();
    SystemSpec sys;
    sys.params.assign(spec.components.begin(), spec.components.end());
    sys.dt = spec.interval;
    sys.m = spec.measurements();
    sys.labels = {"R1", "R2", "R3", "C1", "C2"};
    const SimulatedPaths paths = simulate_paths(sys, spec.units, seed);
    const auto& perf = spec.performance_input == CouplingInput::Latent ? paths.latent : paths.observed;
    const auto& emitted = spec.emit_latent_components ? paths.latent : paths.observed;

    std::vector<UnitSeries> units;
    for (int i = 0; i < spec.units; ++i) {
        const auto& src = perf.unit(i);
        const auto& comp = emitted.unit(i);
        const Eigen::Index m = src.values.rows();
        Eigen::MatrixXd values(m, 7);
        values.leftCols(5) = comp.values;
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto row = src.values.row(j);
            for (Eigen::Index c = 0; c < 5; ++c) {
                if (!(row(c) > 0.0) || !(comp.values(j, c) > 0.0)) {
                    std::ostringstream msg;
                    msg << "filter case: non-physical " << sys.labels[static_cast<std::size_t>(c)] << " at unit " << i
                        << ", time " << src.times[static_cast<std::size_t>(j)];
                    throw Error(ErrorKind::Domain, msg.str());
                }
            }
            values(j, 5) = filter_center_frequency(row(0), row(1), row(2), row(3), row(4));
            values(j, 6) = filter_peak_gain_db(row(0), row(2), row(3), row(4));
        }
        units.push_back(UnitSeries{src.id, src.times, std::move(values)});
    }
    return DegradationDataset({"R1", "R2", "R3", "C1", "C2", "f0", "Gain"}, std::move(units), seed);
}

CausalGraph filter_truth_graph() {
    CausalGraph g(7, {"R1", "R2", "R3", "C1", "C2", "f0", "Gain"});
    for (int c = 0; c < 5; ++c) g.add_directed(c, 5);
    for (int c : {0, 2, 3, 4}) g.add_directed(c, 6);
    return g;
}

}  // namespace degcausal

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degcausal/graph.hpp"

namespace degcausal {

/// One Wiener-process degradation component:
///   X(t) = X0 + a * t^gamma + sigma * B(t) + eps,
///   X0 ~ N(mu_x0, sigma_x0^2), a ~ N(mu_a, (v_a*|mu_a|)^2), eps ~ N(0, sigma_eps^2).
struct WienerParams {
    double mu_x0 = 0.0;
    double sigma_x0 = 0.0;
    double mu_a = 0.0;
    double v_a = 0.0;  // coefficient of variation of the drift
    double sigma = 0.0;
    double sigma_eps = 0.0;
    double gamma = 1.0;

    double sigma_a() const noexcept;
    void validate() const;
};

/// Coupling g(x) = alpha * x^beta from `parent` into `child`.
struct CausalEdgeFunction {
    int parent = 0;
    int child = 1;
    double alpha = 1.0;
    double beta = 1.0;

    /// Throws ErrorKind::Domain for a negative base with fractional beta.
    double evaluate(double x) const;
};

/// Which parent value enters a coupling function.
enum class CouplingInput {
    Latent,    // measurement-error-free parent path
    Observed,  // parent path including its measurement error
};

struct SystemSpec {
    std::vector<WienerParams> params;
    std::vector<CausalEdgeFunction> edges;
    double dt = 20.0;
    int m = 51;
    std::vector<std::string> labels;
    CouplingInput coupling = CouplingInput::Latent;

    int k() const noexcept { return static_cast<int>(params.size()); }
    /// Throws ErrorKind::Config on any violated invariant (cyclic edges, dt<=0, m<2, ...).
    void validate() const;
    /// Parameters in an order where every edge parent precedes its child.
    std::vector<int> topological_order() const;
    /// DAG implied by the edge list.
    CausalGraph truth_graph() const;
};

/// Independent pair (mu_a = -0.04 / -0.05, v_a = 0.05, sigma = 0.1,
/// sigma_eps = 0.4, gamma = 1, dt = 20, m = 51).
SystemSpec independent_pair_spec();
/// X1 -> X2 through g(x) = alpha x^beta; X2 starts at 0 without initial spread.
SystemSpec coupled_pair_spec(double alpha = 1.0, double beta = 1.0);

/// Measurements of k parameters over n units. Each unit owns its own time
/// grid and an (m_i x k) value block; simulated datasets are rectangular.
struct UnitSeries {
    std::string id;
    std::vector<double> times;
    Eigen::MatrixXd values;  // rows = measurement times, cols = parameters
};

class DegradationDataset {
public:
    DegradationDataset() = default;
    DegradationDataset(std::vector<std::string> labels, std::vector<UnitSeries> units, std::uint64_t seed = 0);

    int k() const noexcept { return static_cast<int>(labels_.size()); }
    int n() const noexcept { return static_cast<int>(units_.size()); }
    /// Shared measurement count; throws ErrorKind::Input when ragged.
    int m() const;
    bool is_rectangular() const;

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<UnitSeries>& units() const noexcept { return units_; }
    const UnitSeries& unit(int i) const { return units_.at(static_cast<std::size_t>(i)); }
    std::uint64_t seed() const noexcept { return seed_; }

    /// x_{l i j}: parameter l, unit i, measurement j (all zero-based).
    double value(int l, int i, int j) const;

    DegradationDataset select_units(const std::vector<int>& indices) const;

    friend bool operator==(const DegradationDataset& a, const DegradationDataset& b);

private:
    std::vector<std::string> labels_;
    std::vector<UnitSeries> units_;
    std::uint64_t seed_ = 0;
};

/// Lambda(t) = t^gamma. Throws ErrorKind::Domain for t < 0.
double time_scale(double t, double gamma);

/// Latent and observed paths side by side; observed = latent + measurement error.
struct SimulatedPaths {
    DegradationDataset observed;
    DegradationDataset latent;
};

SimulatedPaths simulate_paths(const SystemSpec& spec, int n, std::uint64_t seed);

/// Deterministic in (spec, n, seed); unit i / parameter l draws from substream (seed, i, l).
DegradationDataset simulate_system(const SystemSpec& spec, int n, std::uint64_t seed);

/// Band-pass filter built from three resistors and two capacitors.
struct FilterComponentSpec {
    std::array<WienerParams, 5> components{};  // R1, R2, R3 (ohm), C1, C2 (farad)
    int units = 20;
    double interval = 0.5;  // years
    double horizon = 10.0;  // years
    /// Component values fed into the closed forms for f0 and gain.
    CouplingInput performance_input = CouplingInput::Latent;
    /// When true the emitted component columns are the latent values.
    bool emit_latent_components = false;

    int measurements() const;
    void validate() const;
};

FilterComponentSpec filter_table_spec();

double filter_center_frequency(double r1, double r2, double r3, double c1, double c2);
double filter_peak_gain_db(double r1, double r3, double c1, double c2);

/// Columns R1,R2,R3,C1,C2,f0,Gain. Throws ErrorKind::Domain if a component
/// value is non-positive at any time.
DegradationDataset simulate_filter_case(const FilterComponentSpec& spec, std::uint64_t seed);

/// R1,R2,R3,C1,C2 -> f0 and R1,R3,C1,C2 -> Gain.
CausalGraph filter_truth_graph();

}  // namespace degcausal

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degcausal/degradation.hpp"
#include "degcausal/graph.hpp"
#include "degcausal/strategy.hpp"

namespace degcausal {

enum class Method { StablePc, Ges, DirectLingam, NotearsLinear, NotearsMlp, Granger };

const char* to_string(Method m) noexcept;  // CLI names: stable-pc, ges, ...
/// Throws ErrorKind::EnumeratedChoice for anything outside the six methods.
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();
const std::vector<Method>& non_temporal_methods();

struct PcConfig {
    double alpha = 0.05;  // Fisher z
};

struct GesConfig {};  // Gaussian BIC score

struct LingamConfig {
    double edge_threshold = 0.1;
};

struct NotearsLinearConfig {
    double l1 = 0.1;
    int max_outer_iter = 100;
    double h_tol = 1e-8;
    double rho_max = 1e16;
    double edge_threshold = 0.1;
};

struct NotearsMlpConfig {
    double l1 = 0.01;
    double l2 = 0.01;
    int max_outer_iter = 100;
    double h_tol = 1e-8;
    double rho_max = 1e16;
    int hidden_units = 10;
    double edge_threshold = 0.1;
};

struct GrangerConfig {
    int max_lag = 2;
    double alpha = 0.05;
    bool aic_lag_selection = false;  // pick the lag in 1..aic_max_lag by AIC
    int aic_max_lag = 5;
};

struct MethodConfig {
    PcConfig pc;
    GesConfig ges;
    LingamConfig lingam;
    NotearsLinearConfig notears_linear;
    NotearsMlpConfig notears_mlp;
    GrangerConfig granger;

    /// Throws ErrorKind::Config on negative thresholds or non-positive tolerances.
    void validate() const;
};

struct DiscoveryResult {
    CausalGraph graph;
    bool is_dag = false;      // methods returning DAGs (LiNGAM, NOTEARS, Granger never set this for CPDAGs)
    bool converged = true;    // false when NOTEARS stopped at rho_max with h > h_tol
    double final_h = 0.0;
    Eigen::MatrixXd weights;  // continuous-optimization weights, empty otherwise
};

DiscoveryResult stable_pc(const DataMatrix& m, const PcConfig& cfg);
DiscoveryResult ges(const DataMatrix& m, const GesConfig& cfg);
DiscoveryResult direct_lingam(const DataMatrix& m, const LingamConfig& cfg);

/// Causal order estimated by Direct-LiNGAM (most exogenous first).
std::vector<int> lingam_causal_order(const DataMatrix& m);

struct AcyclicityValue {
    double h = 0.0;
    Eigen::MatrixXd gradient;
};

/// exp(A) for a square matrix by scaling and squaring of the Taylor series.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

/// h(W) = tr(exp(W o W)) - k with gradient exp(W o W)^T o 2W.
AcyclicityValue acyclicity_h(const Eigen::MatrixXd& w);

/// Smooth part of the NOTEARS-Linear objective for centered data x:
/// 1/(2n)||x - xW||^2 + rho/2 h^2 + alpha h, and its gradient in W.
double notears_linear_smooth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, double rho, double alpha,
                             Eigen::MatrixXd& grad);

DiscoveryResult notears_linear(const DataMatrix& m, const NotearsLinearConfig& cfg);

/// Parameters of the per-variable MLPs; W1[j] is (hidden x k) for network j.
struct MlpParameters {
    int k = 0;
    int hidden = 0;
    Eigen::VectorXd theta;  // [W1+ | W1- | b1 | W2 | b2]

    static MlpParameters initial(int k, int hidden, std::uint64_t seed);
    Eigen::Index size() const noexcept { return theta.size(); }
    /// Surrogate weights: norm of the first-layer weights from input i into network j.
    Eigen::MatrixXd adjacency() const;
    void bounds(Eigen::VectorXd& lower, Eigen::VectorXd& upper) const;
};

/// Full NOTEARS-MLP objective (fit + penalties + augmented Lagrangian) and its
/// backpropagated gradient with respect to theta.
double notears_mlp_objective(const Eigen::MatrixXd& x, const MlpParameters& p, const NotearsMlpConfig& cfg, double rho,
                             double alpha, Eigen::VectorXd& grad);

DiscoveryResult notears_mlp(const DataMatrix& m, const NotearsMlpConfig& cfg, std::uint64_t seed);

/// Keeps |w(i,j)| > threshold as i->j, then drops the smallest-|weight| edge
/// lying on a directed cycle until none remain.
CausalGraph threshold_to_dag(const Eigen::MatrixXd& w, double threshold, const std::vector<std::string>& labels);

/// Pairwise Granger F-tests per unit on raw series, pooled over units with
/// Fisher's method; i->j when the pooled p-value is below alpha.
DiscoveryResult granger_pairwise(const DegradationDataset& d, const GrangerConfig& cfg);

/// Runs one method. Granger ignores the strategy and uses the raw dataset.
DiscoveryResult discover(Method method, const DegradationDataset& d, Strategy strategy, const MethodConfig& cfg,
                         std::uint64_t seed, bool standardize = false);
DiscoveryResult discover(Method method, const DataMatrix& m, const MethodConfig& cfg, std::uint64_t seed);

}  // namespace degcausal

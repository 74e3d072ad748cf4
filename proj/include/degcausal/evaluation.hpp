#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "degcausal/degradation.hpp"
#include "degcausal/discovery.hpp"
#include "degcausal/graph.hpp"
#include "degcausal/strategy.hpp"

namespace degcausal {

/// Fraction of results equal to truth. Throws ErrorKind::Metric on an empty list.
double exact_match_rate(const std::vector<CausalGraph>& results, const CausalGraph& truth);

/// Counts indexed by PairwiseOutcome. Throws ErrorKind::Arity unless every graph has k = 2.
using OutcomeTally = std::array<int, 5>;
OutcomeTally tally_outcomes(const std::vector<CausalGraph>& results);

struct BenchmarkCell {
    Method method = Method::StablePc;
    Strategy strategy = Strategy::IncrementStacking;
    int n = 0;
    int replication = 0;
    std::uint64_t seed = 0;  // discovery seed of this cell
    CausalGraph graph;
    bool match = false;
    bool converged = true;
    double seconds = 0.0;
    std::string error;  // empty on success
};

struct BenchmarkConfig {
    std::vector<Method> methods = non_temporal_methods();
    std::vector<Strategy> strategies{Strategy::IncrementStacking};
    int n_min = 1;
    int n_max = 10;
    int replications = 20;
    MethodConfig method_config;
    bool standardize = false;
    int jobs = 0;  // 0: OpenMP default
    bool record_timing = true;  // false writes zero seconds so outputs are byte-reproducible

    void validate() const;
};

struct EmrRow {
    Method method = Method::StablePc;
    Strategy strategy = Strategy::IncrementStacking;
    int n = 0;
    double emr = 0.0;
    int failures = 0;       // cells that threw
    int nonconverged = 0;
    bool has_tally = false;  // only for two-parameter systems
    OutcomeTally tally{};
};

struct BenchmarkResult {
    std::vector<BenchmarkCell> cells;  // ordered by (n, replication, method, strategy)
    std::vector<EmrRow> emr;           // ordered by (method, strategy, n)
};

/// Dataset seed for replication r at sample size n.
std::uint64_t dataset_seed(std::uint64_t seed, int replication, int n);

/// One cell computed in isolation from its derived seeds.
BenchmarkCell run_cell(const SystemSpec& spec, const CausalGraph& truth, const BenchmarkConfig& cfg, Method method,
                       Strategy strategy, int n, int replication, std::uint64_t seed);

/// Parallel over cells; aggregation does not depend on completion order.
BenchmarkResult run_benchmark(const SystemSpec& spec, const CausalGraph& truth, const BenchmarkConfig& cfg,
                              std::uint64_t seed);
/// Single-threaded reference with identical output.
BenchmarkResult run_benchmark_serial(const SystemSpec& spec, const CausalGraph& truth, const BenchmarkConfig& cfg,
                                     std::uint64_t seed);

std::vector<EmrRow> aggregate_cells(const std::vector<BenchmarkCell>& cells, const BenchmarkConfig& cfg, int k);

struct SweepConfig {
    std::string factor;  // beta, gamma, v_a, sigma_eps, sigma
    std::vector<double> levels;
    SystemSpec base;
    BenchmarkConfig benchmark;

    void validate() const;
};

bool is_sweep_factor(const std::string& factor);
/// Levels used in the sensitivity studies. Throws ErrorKind::Config for an unknown factor.
std::vector<double> default_levels(const std::string& factor);
/// Base spec with the factor set to `level`, including the paired drift (gamma)
/// or coupling scale (beta) adjustment.
SystemSpec apply_level(const SystemSpec& base, const std::string& factor, double level);

struct SweepLevel {
    double level = 0.0;
    BenchmarkResult result;
};

struct SweepResult {
    std::string factor;
    std::vector<SweepLevel> levels;
};

SweepResult run_sweep(const SweepConfig& cfg, std::uint64_t seed);

/// Tidy CSV `factor,level,method,strategy,n,replication,outcome,match,seconds`.
/// A benchmark without a sweep writes an empty factor and level.
std::string cells_csv(const BenchmarkResult& r, const std::string& factor = "", const std::string& level = "");
std::string cells_csv(const SweepResult& r);
/// `factor,level,method,strategy,n,emr,failures,nonconverged,empty,x1->x2,x2->x1,undirected,other`.
std::string emr_csv(const BenchmarkResult& r, const std::string& factor = "", const std::string& level = "");
std::string emr_csv(const SweepResult& r);

/// Deterministic text for a level value, e.g. 0.2 -> "0.2".
std::string format_level(double level);

}  // namespace degcausal

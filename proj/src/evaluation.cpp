#include "degcausal/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <omp.h>

#include "degcausal/error.hpp"
#include "degcausal/rng.hpp"

namespace degcausal {

double exact_match_rate(const std::vector<CausalGraph>& results, const CausalGraph& truth) {
    if (results.empty()) throw Error(ErrorKind::Metric, "exact match rate of an empty result list");
    int hits = 0;
    for (const auto& g : results)
        if (graphs_equal(g, truth)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

OutcomeTally tally_outcomes(const std::vector<CausalGraph>& results) {
    OutcomeTally t{};
    for (const auto& g : results) ++t[static_cast<std::size_t>(classify_pairwise(g))];
    return t;
}

void BenchmarkConfig::validate() const {
    if (methods.empty()) throw Error(ErrorKind::Config, "benchmark: methods must not be empty");
    if (strategies.empty()) throw Error(ErrorKind::Config, "benchmark: strategies must not be empty");
    if (n_min < 1 || n_max < n_min) throw Error(ErrorKind::Config, "benchmark: n range must satisfy 1 <= n_min <= n_max");
    if (replications < 1) throw Error(ErrorKind::Config, "benchmark: replications must be >= 1");
    if (jobs < 0) throw Error(ErrorKind::Config, "benchmark: jobs must be >= 0");
    method_config.validate();
}

std::uint64_t dataset_seed(std::uint64_t seed, int replication, int n) {
    return derive_seed(seed, {static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(n)});
}

namespace {

std::uint64_t cell_seed(std::uint64_t seed, int replication, int n, Method m, Strategy s) {
    return derive_seed(seed, {static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(m) + 1, static_cast<std::uint64_t>(s) + 1});
}

struct CellKey {
    int n;
    int replication;
    Method method;
    Strategy strategy;
};

std::vector<CellKey> enumerate_cells(const BenchmarkConfig& cfg) {
    std::vector<CellKey> keys;
    for (int n = cfg.n_min; n <= cfg.n_max; ++n)
        for (int r = 0; r < cfg.replications; ++r)
            for (Method m : cfg.methods)
                for (Strategy s : cfg.strategies) keys.push_back({n, r, m, s});
    return keys;
}

std::string adjacency_string(const CausalGraph& g) {
    std::string out;
    for (int i = 0; i < g.k(); ++i)
        for (int j = 0; j < g.k(); ++j) out += g.at(i, j) ? '1' : '0';
    return out;
}

std::string cell_outcome(const BenchmarkCell& c) {
    if (!c.error.empty()) return "error";
    if (c.graph.k() == 2) return to_string(classify_pairwise(c.graph));
    return adjacency_string(c.graph);
}

BenchmarkResult finish(std::vector<BenchmarkCell> cells, const BenchmarkConfig& cfg, int k) {
    BenchmarkResult out;
    out.emr = aggregate_cells(cells, cfg, k);
    out.cells = std::move(cells);
    return out;
}

}  // namespace

BenchmarkCell run_cell(const SystemSpec& spec, const CausalGraph& truth, const BenchmarkConfig& cfg, Method method,
                       Strategy strategy, int n, int replication, std::uint64_t seed) {
    BenchmarkCell cell;
    cell.method = method;
    cell.strategy = strategy;
    cell.n = n;
    cell.replication = replication;
    cell.seed = cell_seed(seed, replication, n, method, strategy);
    const auto start = std::chrono::steady_clock::now();
    try {
        const DegradationDataset d = simulate_system(spec, n, dataset_seed(seed, replication, n));
        DiscoveryResult res = discover(method, d, strategy, cfg.method_config, cell.seed, cfg.standardize);
        cell.graph = std::move(res.graph);
        cell.converged = res.converged;
        cell.match = cell.converged && graphs_equal(cell.graph, truth);
    } catch (const std::exception& e) {
        cell.error = e.what();
        cell.match = false;
        cell.graph = CausalGraph(truth.k(), truth.labels());
    }
    if (cfg.record_timing)
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cell;
}

BenchmarkResult run_benchmark(const SystemSpec& spec, const CausalGraph& truth, const BenchmarkConfig& cfg,
                              std::uint64_t seed) {
    cfg.validate();
    spec.validate();
    const std::vector<CellKey> keys = enumerate_cells(cfg);
    std::vector<BenchmarkCell> cells(keys.size());
    const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
    const auto count = static_cast<std::ptrdiff_t>(keys.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
        const CellKey& key = keys[static_cast<std::size_t>(c)];
        cells[static_cast<std::size_t>(c)] =
            run_cell(spec, truth, cfg, key.method, key.strategy, key.n, key.replication, seed);
    }
    return finish(std::move(cells), cfg, truth.k());
}

BenchmarkResult run_benchmark_serial(const SystemSpec& spec, const CausalGraph& truth, const BenchmarkConfig& cfg,
                                     std::uint64_t seed) {
    cfg.validate();
    spec.validate();
    std::vector<BenchmarkCell> cells;
    for (const CellKey& key : enumerate_cells(cfg))
        cells.push_back(run_cell(spec, truth, cfg, key.method, key.strategy, key.n, key.replication, seed));
    return finish(std::move(cells), cfg, truth.k());
}

std::vector<EmrRow> aggregate_cells(const std::vector<BenchmarkCell>& cells, const BenchmarkConfig& cfg, int k) {
    std::vector<EmrRow> rows;
    for (Method m : cfg.methods) {
        for (Strategy s : cfg.strategies) {
            for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
                EmrRow row;
                row.method = m;
                row.strategy = s;
                row.n = n;
                row.has_tally = k == 2;
                int total = 0;
                int hits = 0;
                for (const auto& c : cells) {
                    if (c.method != m || c.strategy != s || c.n != n) continue;
                    ++total;
                    if (c.match) ++hits;
                    if (!c.error.empty()) ++row.failures;
                    if (c.error.empty() && !c.converged) ++row.nonconverged;
                    if (row.has_tally && c.error.empty()) ++row.tally[static_cast<std::size_t>(classify_pairwise(c.graph))];
                }
                if (total == 0) throw Error(ErrorKind::Metric, "benchmark aggregation: no cells for a configured combination");
                row.emr = static_cast<double>(hits) / static_cast<double>(total);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Sweeps

bool is_sweep_factor(const std::string& factor) {
    return factor == "beta" || factor == "gamma" || factor == "v_a" || factor == "sigma_eps" || factor == "sigma";
}

std::vector<double> default_levels(const std::string& factor) {
    if (factor == "beta") return {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8};
    if (factor == "gamma") return {0.5, 0.75, 1.0, 1.25, 1.5};
    if (factor == "v_a") return {0.0, 0.025, 0.05, 0.1, 0.2};
    if (factor == "sigma_eps") return {0.0, 0.2, 0.4, 0.8, 1.6};
    if (factor == "sigma") return {0.0, 0.05, 0.1, 0.2, 0.4};
    throw Error(ErrorKind::Config, "unknown sweep factor '" + factor + "' (expected beta, gamma, v_a, sigma_eps, sigma)");
}

namespace {

bool same_level(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

double paired_alpha(double beta) {
    static const std::map<double, double> table{{0.2, 70.0},  {0.4, 24.0},  {0.6, 8.4},    {0.8, 2.9},  {1.0, 1.0},
                                                {1.2, 0.345}, {1.4, 0.119}, {1.6, 0.042}, {1.8, 0.014}};
    for (const auto& [b, a] : table)
        if (same_level(beta, b)) return a;
    throw Error(ErrorKind::Config, "beta level " + format_level(beta) + " has no paired alpha (levels 0.2..1.8 step 0.2)");
}

std::pair<double, double> paired_drifts(double gamma) {
    static const std::map<double, std::pair<double, double>> table{{0.5, {-0.8, -1.0}},
                                                                   {0.75, {-0.2, -0.25}},
                                                                   {1.0, {-0.04, -0.05}},
                                                                   {1.25, {-0.008, -0.01}},
                                                                   {1.5, {-0.0008, -0.001}}};
    for (const auto& [g, mu] : table)
        if (same_level(gamma, g)) return mu;
    throw Error(ErrorKind::Config, "gamma level " + format_level(gamma) + " has no paired drift (levels 0.5..1.5 step 0.25)");
}

}  // namespace

SystemSpec apply_level(const SystemSpec& base, const std::string& factor, double level) {
    SystemSpec s = base;
    if (factor == "beta") {
        if (s.edges.empty()) throw Error(ErrorKind::Config, "beta sweep needs a spec with a causal edge");
        const double alpha = paired_alpha(level);
        for (auto& e : s.edges) {
            e.beta = level;
            e.alpha = alpha;
        }
    } else if (factor == "gamma") {
        if (s.k() != 2) throw Error(ErrorKind::Config, "gamma sweep pairs drifts for two-parameter systems only");
        const auto [mu1, mu2] = paired_drifts(level);
        for (auto& p : s.params) p.gamma = level;
        s.params[0].mu_a = mu1;
        s.params[1].mu_a = mu2;
    } else if (factor == "v_a") {
        for (auto& p : s.params) p.v_a = level;
    } else if (factor == "sigma_eps") {
        for (auto& p : s.params) p.sigma_eps = level;
    } else if (factor == "sigma") {
        for (auto& p : s.params) p.sigma = level;
    } else {
        default_levels(factor);  // throws
    }
    s.validate();
    return s;
}

void SweepConfig::validate() const {
    if (!is_sweep_factor(factor)) default_levels(factor);
    if (levels.empty()) throw Error(ErrorKind::Config, "sweep: levels must not be empty");
    for (double l : levels) apply_level(base, factor, l);
    benchmark.validate();
}

SweepResult run_sweep(const SweepConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SweepResult out;
    out.factor = cfg.factor;
    const CausalGraph truth = cfg.base.truth_graph();
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
        const SystemSpec spec = apply_level(cfg.base, cfg.factor, cfg.levels[i]);
        SweepLevel level;
        level.level = cfg.levels[i];
        level.result = run_benchmark(spec, truth, cfg.benchmark, derive_seed(seed, {static_cast<std::uint64_t>(i)}));
        out.levels.push_back(std::move(level));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_level(double level) {
    std::ostringstream os;
    os.precision(15);
    os << level;
    return os.str();
}

namespace {

void append_cells(std::ostringstream& os, const BenchmarkResult& r, const std::string& factor, const std::string& level) {
    for (const auto& c : r.cells) {
        os << factor << ',' << level << ',' << to_string(c.method) << ',' << to_string(c.strategy) << ',' << c.n << ','
           << c.replication << ',' << cell_outcome(c) << ',' << (c.match ? 1 : 0) << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", c.seconds);
        os << buf << '\n';
    }
}

void append_emr(std::ostringstream& os, const BenchmarkResult& r, const std::string& factor, const std::string& level) {
    for (const auto& row : r.emr) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", row.emr);
        os << factor << ',' << level << ',' << to_string(row.method) << ',' << to_string(row.strategy) << ',' << row.n
           << ',' << buf << ',' << row.failures << ',' << row.nonconverged;
        for (int t : row.tally) {
            os << ',';
            if (row.has_tally) os << t;
        }
        os << '\n';
    }
}

constexpr const char* kCellsHeader = "factor,level,method,strategy,n,replication,outcome,match,seconds\n";
constexpr const char* kEmrHeader =
    "factor,level,method,strategy,n,emr,failures,nonconverged,empty,x1->x2,x2->x1,undirected,other\n";

}  // namespace

std::string cells_csv(const BenchmarkResult& r, const std::string& factor, const std::string& level) {
    std::ostringstream os;
    os << kCellsHeader;
    append_cells(os, r, factor, level);
    return os.str();
}

std::string cells_csv(const SweepResult& r) {
    std::ostringstream os;
    os << kCellsHeader;
    for (const auto& l : r.levels) append_cells(os, l.result, r.factor, format_level(l.level));
    return os.str();
}

std::string emr_csv(const BenchmarkResult& r, const std::string& factor, const std::string& level) {
    std::ostringstream os;
    os << kEmrHeader;
    append_emr(os, r, factor, level);
    return os.str();
}

std::string emr_csv(const SweepResult& r) {
    std::ostringstream os;
    os << kEmrHeader;
    for (const auto& l : r.levels) append_emr(os, l.result, r.factor, format_level(l.level));
    return os.str();
}

}  // namespace degcausal

#include "degcausal/config.hpp"

#include <boost/version.hpp>
#include <Eigen/Core>
#include <ostream>
#include <set>

#include "degcausal/error.hpp"
#include "degcausal/io.hpp"
#include "degcausal/rng.hpp"

namespace degcausal {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

const char* kKindNames[] = {"simulate", "discover", "benchmark", "sweep", "cmapss", "filter-case"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorKind::Config, where + ": expected a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw Error(ErrorKind::Config, (where.empty() ? "" : where + ".") + "'" + key + "': unknown key");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::Config, (where.empty() ? "" : where + ".") + key + ": wrong type");
    }
}

CouplingInput parse_input(const std::string& s, const std::string& field) {
    if (s == "latent") return CouplingInput::Latent;
    if (s == "observed") return CouplingInput::Observed;
    throw Error(ErrorKind::EnumeratedChoice, field + ": expected latent or observed, got '" + s + "'");
}

const char* input_name(CouplingInput c) { return c == CouplingInput::Latent ? "latent" : "observed"; }

SystemSpec preset_spec(const std::string& name) {
    if (name == "independent-pair") return independent_pair_spec();
    if (name == "coupled-pair") return coupled_pair_spec();
    throw Error(ErrorKind::EnumeratedChoice, "system: unknown preset '" + name + "' (expected independent-pair, coupled-pair)");
}

void read_hyperparameters(const json& j, MethodConfig& mc) {
    reject_unknown(j, {"stable-pc", "ges", "direct-lingam", "notears-linear", "notears-mlp", "granger"}, "hyperparameters");
    if (j.contains("stable-pc")) {
        const json& h = j.at("stable-pc");
        reject_unknown(h, {"alpha"}, "hyperparameters.stable-pc");
        read(h, "alpha", mc.pc.alpha, "hyperparameters.stable-pc");
    }
    if (j.contains("ges")) reject_unknown(j.at("ges"), {}, "hyperparameters.ges");
    if (j.contains("direct-lingam")) {
        const json& h = j.at("direct-lingam");
        reject_unknown(h, {"edge_threshold"}, "hyperparameters.direct-lingam");
        read(h, "edge_threshold", mc.lingam.edge_threshold, "hyperparameters.direct-lingam");
    }
    if (j.contains("notears-linear")) {
        const json& h = j.at("notears-linear");
        const std::string w = "hyperparameters.notears-linear";
        reject_unknown(h, {"l1", "max_outer_iter", "h_tol", "rho_max", "edge_threshold"}, w);
        read(h, "l1", mc.notears_linear.l1, w);
        read(h, "max_outer_iter", mc.notears_linear.max_outer_iter, w);
        read(h, "h_tol", mc.notears_linear.h_tol, w);
        read(h, "rho_max", mc.notears_linear.rho_max, w);
        read(h, "edge_threshold", mc.notears_linear.edge_threshold, w);
    }
    if (j.contains("notears-mlp")) {
        const json& h = j.at("notears-mlp");
        const std::string w = "hyperparameters.notears-mlp";
        reject_unknown(h, {"l1", "l2", "max_outer_iter", "h_tol", "rho_max", "hidden_units", "edge_threshold"}, w);
        read(h, "l1", mc.notears_mlp.l1, w);
        read(h, "l2", mc.notears_mlp.l2, w);
        read(h, "max_outer_iter", mc.notears_mlp.max_outer_iter, w);
        read(h, "h_tol", mc.notears_mlp.h_tol, w);
        read(h, "rho_max", mc.notears_mlp.rho_max, w);
        read(h, "hidden_units", mc.notears_mlp.hidden_units, w);
        read(h, "edge_threshold", mc.notears_mlp.edge_threshold, w);
    }
    if (j.contains("granger")) {
        const json& h = j.at("granger");
        const std::string w = "hyperparameters.granger";
        reject_unknown(h, {"max_lag", "alpha", "aic_lag_selection", "aic_max_lag"}, w);
        read(h, "max_lag", mc.granger.max_lag, w);
        read(h, "alpha", mc.granger.alpha, w);
        read(h, "aic_lag_selection", mc.granger.aic_lag_selection, w);
        read(h, "aic_max_lag", mc.granger.aic_max_lag, w);
    }
}

json hyperparameters_json(const MethodConfig& mc) {
    return json{{"stable-pc", {{"alpha", mc.pc.alpha}}},
                {"ges", json::object()},
                {"direct-lingam", {{"edge_threshold", mc.lingam.edge_threshold}}},
                {"notears-linear",
                 {{"l1", mc.notears_linear.l1},
                  {"max_outer_iter", mc.notears_linear.max_outer_iter},
                  {"h_tol", mc.notears_linear.h_tol},
                  {"rho_max", mc.notears_linear.rho_max},
                  {"edge_threshold", mc.notears_linear.edge_threshold}}},
                {"notears-mlp",
                 {{"l1", mc.notears_mlp.l1},
                  {"l2", mc.notears_mlp.l2},
                  {"max_outer_iter", mc.notears_mlp.max_outer_iter},
                  {"h_tol", mc.notears_mlp.h_tol},
                  {"rho_max", mc.notears_mlp.rho_max},
                  {"hidden_units", mc.notears_mlp.hidden_units},
                  {"edge_threshold", mc.notears_mlp.edge_threshold}}},
                {"granger",
                 {{"max_lag", mc.granger.max_lag},
                  {"alpha", mc.granger.alpha},
                  {"aic_lag_selection", mc.granger.aic_lag_selection},
                  {"aic_max_lag", mc.granger.aic_max_lag}}}};
}

}  // namespace

const char* to_string(ExperimentKind k) noexcept { return kKindNames[static_cast<int>(k)]; }

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (int i = 0; i < 6; ++i)
        if (name == kKindNames[i]) return static_cast<ExperimentKind>(i);
    throw Error(ErrorKind::EnumeratedChoice,
                "kind: unknown experiment '" + name + "' (expected simulate, discover, benchmark, sweep, cmapss, filter-case)");
}

RunConfig parse_config(const json& j) {
    reject_unknown(j,
                   {"kind", "seed", "system", "data", "units", "methods", "strategies", "n_min", "n_max", "replications",
                    "standardize", "jobs", "record_timing", "hyperparameters", "sweep", "filter", "cmapss", "output"},
                   "");
    RunConfig c;
    if (j.contains("kind")) {
        std::string kind;
        read(j, "kind", kind, "");
        c.kind = parse_experiment_kind(kind);
    }
    read(j, "seed", c.seed, "");
    if (j.contains("system")) {
        const json& s = j.at("system");
        if (s.is_string()) {
            c.system_preset = s.get<std::string>();
            c.system = preset_spec(c.system_preset);
        } else {
            c.system_preset.clear();
            c.system = system_spec_from_json(s);
        }
    }
    read(j, "data", c.data_path, "");
    read(j, "units", c.units, "");
    if (c.units < 1) throw Error(ErrorKind::Config, "units: must be >= 1");

    BenchmarkConfig& b = c.benchmark;
    if (j.contains("methods")) {
        std::vector<std::string> names;
        read(j, "methods", names, "");
        b.methods.clear();
        for (const auto& n : names) b.methods.push_back(parse_method(n));
    }
    if (j.contains("strategies")) {
        std::vector<std::string> names;
        read(j, "strategies", names, "");
        b.strategies.clear();
        for (const auto& n : names) b.strategies.push_back(parse_strategy(n));
    }
    read(j, "n_min", b.n_min, "");
    read(j, "n_max", b.n_max, "");
    read(j, "replications", b.replications, "");
    read(j, "standardize", b.standardize, "");
    read(j, "jobs", b.jobs, "");
    read(j, "record_timing", b.record_timing, "");
    if (j.contains("hyperparameters")) read_hyperparameters(j.at("hyperparameters"), b.method_config);
    b.validate();

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, {"factor", "levels"}, "sweep");
        read(s, "factor", c.sweep_factor, "sweep");
        read(s, "levels", c.sweep_levels, "sweep");
    }
    if (c.kind == ExperimentKind::Sweep) {
        if (c.sweep_factor.empty()) throw Error(ErrorKind::Config, "sweep.factor: required for a sweep");
        if (c.sweep_levels.empty()) c.sweep_levels = default_levels(c.sweep_factor);
        SweepConfig sc{c.sweep_factor, c.sweep_levels, c.system, b};
        sc.validate();
    }

    if (j.contains("filter")) {
        const json& f = j.at("filter");
        const std::string w = "filter";
        reject_unknown(f, {"units", "interval", "horizon", "performance_input", "emit_latent_components", "replications"}, w);
        read(f, "units", c.filter.units, w);
        read(f, "interval", c.filter.interval, w);
        read(f, "horizon", c.filter.horizon, w);
        read(f, "emit_latent_components", c.filter.emit_latent_components, w);
        read(f, "replications", c.filter_replications, w);
        if (f.contains("performance_input")) {
            std::string s;
            read(f, "performance_input", s, w);
            c.filter.performance_input = parse_input(s, "filter.performance_input");
        }
    }
    c.filter.validate();
    if (c.filter_replications < 1) throw Error(ErrorKind::Config, "filter.replications: must be >= 1");

    if (j.contains("cmapss")) {
        const json& f = j.at("cmapss");
        const std::string w = "cmapss";
        reject_unknown(f, {"path", "window", "fraction", "repeats"}, w);
        read(f, "path", c.cmapss_path, w);
        read(f, "window", c.cmapss.window, w);
        read(f, "fraction", c.cmapss.fraction, w);
        read(f, "repeats", c.cmapss.repeats, w);
    }
    if (c.cmapss.window < 1) throw Error(ErrorKind::Config, "cmapss.window: must be >= 1");
    if (!(c.cmapss.fraction > 0.0 && c.cmapss.fraction <= 1.0)) throw Error(ErrorKind::Config, "cmapss.fraction: must lie in (0, 1]");
    if (c.cmapss.repeats < 1) throw Error(ErrorKind::Config, "cmapss.repeats: must be >= 1");
    c.cmapss.methods = b.methods;
    c.cmapss.method_config = b.method_config;
    c.cmapss.strategy = b.strategies.front();
    c.cmapss.standardize = b.standardize;

    read(j, "output", c.output_dir, "");
    if (c.output_dir.empty()) throw Error(ErrorKind::Config, "output: must not be empty");
    return c;
}

json RunConfig::to_json() const {
    json methods = json::array();
    for (Method m : benchmark.methods) methods.push_back(to_string(m));
    json strategies = json::array();
    for (Strategy s : benchmark.strategies) strategies.push_back(to_string(s));
    json j{{"kind", to_string(kind)},
           {"seed", seed},
           {"units", units},
           {"methods", methods},
           {"strategies", strategies},
           {"n_min", benchmark.n_min},
           {"n_max", benchmark.n_max},
           {"replications", benchmark.replications},
           {"standardize", benchmark.standardize},
           {"jobs", benchmark.jobs},
           {"record_timing", benchmark.record_timing},
           {"hyperparameters", hyperparameters_json(benchmark.method_config)},
           {"filter",
            {{"units", filter.units},
             {"interval", filter.interval},
             {"horizon", filter.horizon},
             {"performance_input", input_name(filter.performance_input)},
             {"emit_latent_components", filter.emit_latent_components},
             {"replications", filter_replications}}},
           {"cmapss", {{"path", cmapss_path}, {"window", cmapss.window}, {"fraction", cmapss.fraction}, {"repeats", cmapss.repeats}}},
           {"output", output_dir}};
    j["system"] = system_preset.empty() ? system_spec_to_json(system) : json(system_preset);
    if (!data_path.empty()) j["data"] = data_path;
    if (!sweep_factor.empty()) j["sweep"] = json{{"factor", sweep_factor}, {"levels", sweep_levels}};
    return j;
}

RunConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, "config '" + path.string() + "': " + e.what());
    }
    if (j.is_object() && j.contains("manifest_version") && j.contains("config")) return parse_config(j.at("config"));
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Runner

namespace {

namespace fs = std::filesystem;

class Run {
public:
    Run(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log), root_(cfg.output_dir) {}

    void write(const std::string& rel, const std::string& text) {
        write_text_file(root_ / rel, text);
        outputs_.push_back(rel);
    }
    void write_json(const std::string& rel, const json& j) { write(rel, j.dump(2) + "\n"); }

    void manifest(const std::string& status, const json& error = nullptr) {
        json m{{"manifest_version", 1},
               {"tool", "degcausal"},
               {"version", kVersion},
               {"libraries",
                {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION)},
                 {"boost", BOOST_LIB_VERSION}}},
               {"status", status},
               {"seed", cfg_.seed},
               {"config", cfg_.to_json()},
               {"outputs", outputs_}};
        if (!error.is_null()) m["error"] = error;
        write_text_file(root_ / "manifest.json", m.dump(2) + "\n");
    }

    std::ostream& log() { return log_; }
    const RunConfig& cfg() const { return cfg_; }

private:
    const RunConfig& cfg_;
    std::ostream& log_;
    fs::path root_;
    std::vector<std::string> outputs_;
};

std::string graph_name(Method m, Strategy s) { return std::string(to_string(m)) + "-" + to_string(s); }

void write_matrix(Run& run, const std::string& stem, const DataMatrix& m) {
    run.write("data/" + stem + ".csv", matrix_to_csv(m));
    run.write_json("data/" + stem + ".meta.json", matrix_metadata(m));
}

void run_simulate(Run& run) {
    const RunConfig& c = run.cfg();
    const SimulatedPaths paths = simulate_paths(c.system, c.units, c.seed);
    run.write_json("data/system.json", system_spec_to_json(c.system));
    run.write("data/dataset.csv", dataset_to_csv(paths.observed));
    run.write("data/latent.csv", dataset_to_csv(paths.latent));
    run.write_json("graphs/truth.json", graph_to_json(c.system.truth_graph()));
    for (Strategy s : c.benchmark.strategies)
        write_matrix(run, std::string("matrix-") + to_string(s), build_matrix(paths.observed, s, c.benchmark.standardize));
    run.log() << "simulated " << c.units << " units x " << c.system.m << " measurements x " << c.system.k() << " parameters\n";
}

void run_discover(Run& run) {
    const RunConfig& c = run.cfg();
    DegradationDataset d;
    if (!c.data_path.empty()) {
        d = dataset_from_csv(read_text_file(c.data_path));
    } else {
        d = simulate_system(c.system, c.units, c.seed);
        run.write_json("graphs/truth.json", graph_to_json(c.system.truth_graph()));
    }
    run.write("data/dataset.csv", dataset_to_csv(d));
    std::string summary = "method,strategy,edges,is_dag,converged,error\n";
    for (Strategy s : c.benchmark.strategies) {
        write_matrix(run, std::string("matrix-") + to_string(s), build_matrix(d, s, c.benchmark.standardize));
        for (Method m : c.benchmark.methods) {
            if (m == Method::Granger && s != c.benchmark.strategies.front()) continue;
            const std::string name = m == Method::Granger ? to_string(m) : graph_name(m, s);
            const std::string strat = m == Method::Granger ? "raw" : to_string(s);
            try {
                const DiscoveryResult r = discover(m, d, s, c.benchmark.method_config,
                                                   derive_seed(c.seed, {static_cast<std::uint64_t>(m) + 1}),
                                                   c.benchmark.standardize);
                run.write_json("graphs/" + name + ".json", graph_to_json(r.graph));
                summary += std::string(to_string(m)) + "," + strat + "," + std::to_string(skeleton_of(r.graph).edge_count()) +
                           "," + (r.is_dag ? "1" : "0") + "," + (r.converged ? "1" : "0") + ",\n";
                run.log() << name << ": " << skeleton_of(r.graph).edge_count() << " adjacencies\n";
            } catch (const Error& e) {
                summary += std::string(to_string(m)) + "," + strat + ",,,," + to_string(e.kind()) + "\n";
                run.log() << name << ": failed (" << e.what() << ")\n";
            }
        }
    }
    run.write("metrics/discovery.csv", summary);
}

void run_benchmark_kind(Run& run) {
    const RunConfig& c = run.cfg();
    const CausalGraph truth = c.system.truth_graph();
    run.write_json("data/system.json", system_spec_to_json(c.system));
    run.write_json("graphs/truth.json", graph_to_json(truth));
    const BenchmarkResult r = run_benchmark(c.system, truth, c.benchmark, c.seed);
    run.write("metrics/cells.csv", cells_csv(r));
    run.write("metrics/emr.csv", emr_csv(r));
    run.log() << "benchmark: " << r.cells.size() << " cells\n";
}

void run_sweep_kind(Run& run) {
    const RunConfig& c = run.cfg();
    SweepConfig sc{c.sweep_factor, c.sweep_levels, c.system, c.benchmark};
    run.write_json("data/system.json", system_spec_to_json(c.system));
    run.write_json("graphs/truth.json", graph_to_json(c.system.truth_graph()));
    const SweepResult r = run_sweep(sc, c.seed);
    run.write("metrics/cells.csv", cells_csv(r));
    run.write("metrics/emr.csv", emr_csv(r));
    run.log() << "sweep over " << c.sweep_factor << ": " << r.levels.size() << " levels\n";
}

void run_filter(Run& run) {
    const RunConfig& c = run.cfg();
    const CausalGraph truth = filter_truth_graph();
    const CausalGraph skeleton = skeleton_of(truth);
    run.write_json("graphs/truth.json", graph_to_json(truth));
    std::string metrics = "replication,method,strategy,skeleton_match,edges,error\n";
    const Strategy s = c.benchmark.strategies.front();
    for (int rep = 0; rep < c.filter_replications; ++rep) {
        const DegradationDataset d = simulate_filter_case(c.filter, derive_seed(c.seed, {static_cast<std::uint64_t>(rep)}));
        const std::string suffix = c.filter_replications > 1 ? "-" + std::to_string(rep) : "";
        run.write("data/filter" + suffix + ".csv", dataset_to_csv(d));
        for (Method m : c.benchmark.methods) {
            const std::string name = (m == Method::Granger ? std::string(to_string(m)) : graph_name(m, s)) + suffix;
            try {
                const DiscoveryResult r = discover(m, d, s, c.benchmark.method_config,
                                                   derive_seed(c.seed, {static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(m) + 1}),
                                                   c.benchmark.standardize);
                run.write_json("graphs/" + name + ".json", graph_to_json(r.graph));
                const bool match = graphs_equal(skeleton_of(r.graph), skeleton);
                metrics += std::to_string(rep) + "," + to_string(m) + "," + to_string(s) + "," + (match ? "1" : "0") + "," +
                           std::to_string(skeleton_of(r.graph).edge_count()) + ",\n";
            } catch (const Error& e) {
                metrics += std::to_string(rep) + "," + to_string(m) + "," + to_string(s) + ",0,," + to_string(e.kind()) + "\n";
            }
        }
    }
    run.write("metrics/filter.csv", metrics);
    run.log() << "filter case: " << c.filter_replications << " datasets\n";
}

void run_cmapss(Run& run) {
    const RunConfig& c = run.cfg();
    if (c.cmapss_path.empty()) throw Error(ErrorKind::Config, "cmapss.path: required for the cmapss experiment");
    const DegradationDataset d = parse_cmapss(c.cmapss_path);
    const std::vector<CmapssMethodResult> results = run_cmapss_case(d, c.cmapss, c.seed);
    std::string metrics = "method,edges,replicates,failures\n";
    for (const auto& r : results) {
        run.write_json(std::string("graphs/") + to_string(r.method) + ".json", graph_to_json(r.aggregated));
        for (std::size_t i = 0; i < r.replicates.size(); ++i)
            run.write_json(std::string("graphs/") + to_string(r.method) + "-rep" + std::to_string(i) + ".json",
                           graph_to_json(r.replicates[i]));
        metrics += std::string(to_string(r.method)) + "," + std::to_string(skeleton_of(r.aggregated).edge_count()) + "," +
                   std::to_string(r.replicates.size()) + "," + std::to_string(r.errors.size()) + "\n";
    }
    run.write("metrics/cmapss.csv", metrics);
    run.log() << "cmapss: " << d.n() << " units\n";
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& log) {
    Run run(cfg, log);
    try {
        fs::create_directories(cfg.output_dir);
        run.manifest("incomplete");
        switch (cfg.kind) {
            case ExperimentKind::Simulate: run_simulate(run); break;
            case ExperimentKind::Discover: run_discover(run); break;
            case ExperimentKind::Benchmark: run_benchmark_kind(run); break;
            case ExperimentKind::Sweep: run_sweep_kind(run); break;
            case ExperimentKind::FilterCase: run_filter(run); break;
            case ExperimentKind::Cmapss: run_cmapss(run); break;
        }
        run.manifest("complete");
        return 0;
    } catch (const std::exception& e) {
        const auto* err = dynamic_cast<const Error*>(&e);
        const json report{{"kind", err ? to_string(err->kind()) : "internal"}, {"message", e.what()}};
        try {
            write_text_file(fs::path(cfg.output_dir) / "error.json", report.dump(2) + "\n");
            run.manifest("incomplete", report);
        } catch (const std::exception&) {
        }
        log << report.dump() << "\n";
        return err && err->kind() == ErrorKind::Config ? 2 : 1;
    }
}

}  // namespace degcausal

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degcausal/degradation.hpp"
#include "degcausal/evaluation.hpp"
#include "degcausal/ingest.hpp"

namespace degcausal {

enum class ExperimentKind { Simulate, Discover, Benchmark, Sweep, Cmapss, FilterCase };

const char* to_string(ExperimentKind k) noexcept;
ExperimentKind parse_experiment_kind(const std::string& name);

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct RunConfig {
    ExperimentKind kind = ExperimentKind::Benchmark;
    std::uint64_t seed = kDefaultSeed;
    std::string system_preset = "independent-pair";  // empty when given inline
    SystemSpec system = independent_pair_spec();
    std::string data_path;  // discover: dataset CSV instead of simulation
    int units = 10;         // simulate / discover: units to simulate
    BenchmarkConfig benchmark;
    std::string sweep_factor;
    std::vector<double> sweep_levels;
    FilterComponentSpec filter = filter_table_spec();
    int filter_replications = 1;
    std::string cmapss_path;
    CmapssCaseConfig cmapss;
    std::string output_dir = "out";

    /// Canonical JSON with every default filled in; parse_config(to_json()) is the identity.
    nlohmann::json to_json() const;
};

/// Fully validated config. Unknown keys and ill-typed fields throw ErrorKind::Config
/// naming the field; unknown method or strategy names throw ErrorKind::EnumeratedChoice.
RunConfig parse_config(const nlohmann::json& j);
/// Accepts a config file or a manifest written by run_command.
RunConfig load_config(const std::filesystem::path& path);

/// Executes the experiment and writes manifest.json, data/, graphs/ and metrics/
/// under cfg.output_dir. Returns 0 on success; on failure writes error.json,
/// marks the manifest incomplete and returns nonzero.
int run_command(const RunConfig& cfg, std::ostream& log);

}  // namespace degcausal

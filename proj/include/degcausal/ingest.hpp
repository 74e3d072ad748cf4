#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "degcausal/degradation.hpp"
#include "degcausal/discovery.hpp"
#include "degcausal/graph.hpp"

namespace degcausal {

struct CmapssRecord {
    int unit = 0;
    int cycle = 0;
    std::array<double, 3> settings{};
    std::array<double, 21> sensors{};  // sensors[0] is sensor 1
};

/// One record per non-blank line of the whitespace-delimited C-MAPSS text layout.
/// Throws ErrorKind::Parse naming the line on a wrong column count or a bad number.
std::vector<CmapssRecord> parse_cmapss_records(const std::string& text);

/// 1-based sensor numbers kept for analysis, in output column order.
const std::array<int, 14>& cmapss_kept_sensors();
/// 1-based sensor numbers treated as constant.
const std::array<int, 7>& cmapss_constant_sensors();
/// T24, T30, T50, P30, Nf, Nc, Ps30, phi, NRf, NRc, BPR, htBleed, W31, W32.
const std::vector<std::string>& cmapss_labels();

/// Groups records by unit (cycles must run 1..m_i) and keeps the 14 varying
/// sensors. Throws ErrorKind::MappingValidation when an excluded sensor is not
/// constant within a unit (sample sd >= 1e-9 * |mean|).
DegradationDataset cmapss_dataset(const std::vector<CmapssRecord>& records);
DegradationDataset parse_cmapss_text(const std::string& text);
/// Throws ErrorKind::Io when the file cannot be read.
DegradationDataset parse_cmapss(const std::filesystem::path& path);

/// Last w measurements of every unit, re-timed 1..w. Throws ErrorKind::Window
/// for w < 1 or a unit shorter than w.
DegradationDataset extract_last_window(const DegradationDataset& d, int w);

/// Each replicate keeps floor(fraction * n) distinct units, in their original order.
std::vector<DegradationDataset> bootstrap_units(const DegradationDataset& d, double fraction, int repeats,
                                                std::uint64_t seed);

/// Adjacency entries present in more than half of the graphs.
CausalGraph majority_vote(const std::vector<CausalGraph>& graphs);

struct CmapssMethodResult {
    Method method = Method::StablePc;
    std::vector<CausalGraph> replicates;
    std::vector<std::string> errors;  // one entry per failed replicate
    CausalGraph aggregated;
};

struct CmapssCaseConfig {
    int window = 40;
    double fraction = 0.8;
    int repeats = 20;
    Strategy strategy = Strategy::IncrementStacking;
    std::vector<Method> methods = non_temporal_methods();
    MethodConfig method_config;
    bool standardize = false;
};

std::vector<CmapssMethodResult> run_cmapss_case(const DegradationDataset& d, const CmapssCaseConfig& cfg,
                                                std::uint64_t seed);

}  // namespace degcausal

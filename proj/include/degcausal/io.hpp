#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "degcausal/degradation.hpp"
#include "degcausal/graph.hpp"
#include "degcausal/strategy.hpp"

namespace degcausal {

/// {"labels": [...], "adj": [[...]]}
nlohmann::json graph_to_json(const CausalGraph& g);
/// Throws ErrorKind::Parse on a malformed document and StructuralInput on a bad matrix.
CausalGraph graph_from_json(const nlohmann::json& j);

nlohmann::json system_spec_to_json(const SystemSpec& s);
/// Missing fields take the defaults of SystemSpec; unknown keys throw ErrorKind::Config.
SystemSpec system_spec_from_json(const nlohmann::json& j);

/// Long-form CSV `unit,time,<labels>`; values round-trip bit-exactly.
std::string dataset_to_csv(const DegradationDataset& d);
DegradationDataset dataset_from_csv(const std::string& text);

/// Header = labels, one observation per row.
std::string matrix_to_csv(const DataMatrix& m);
nlohmann::json matrix_metadata(const DataMatrix& m);
DataMatrix matrix_from_csv(const std::string& text, const nlohmann::json& metadata);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

}  // namespace degcausal

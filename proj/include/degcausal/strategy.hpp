#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degcausal/degradation.hpp"

namespace degcausal {

enum class Strategy { RawStacking, IncrementStacking };

const char* to_string(Strategy s) noexcept;  // "S1" / "S2"
Strategy parse_strategy(const std::string& name);

/// Observations x variables input for every non-temporal discovery method.
struct DataMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> labels;
    Strategy strategy = Strategy::RawStacking;

    int rows() const noexcept { return static_cast<int>(values.rows()); }
    int cols() const noexcept { return static_cast<int>(values.cols()); }
};

/// Raw values stacked unit-major, time-minor: n*m rows.
DataMatrix build_s1(const DegradationDataset& d);

/// Within-unit first differences stacked unit-major: n*(m-1) rows.
/// Increments never span two units.
DataMatrix build_s2(const DegradationDataset& d);

DataMatrix build_matrix(const DegradationDataset& d, Strategy s, bool standardize = false);

/// Centers every column and scales it to unit sample standard deviation.
/// Zero-variance columns are only centered.
DataMatrix standardized(DataMatrix m);

}  // namespace degcausal

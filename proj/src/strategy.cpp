#include "degcausal/strategy.hpp"

#include <cmath>

#include "degcausal/error.hpp"

namespace degcausal {

const char* to_string(Strategy s) noexcept { return s == Strategy::RawStacking ? "S1" : "S2"; }

Strategy parse_strategy(const std::string& name) {
    if (name == "S1" || name == "s1") return Strategy::RawStacking;
    if (name == "S2" || name == "s2") return Strategy::IncrementStacking;
    throw Error(ErrorKind::EnumeratedChoice, "unknown strategy '" + name + "' (expected S1 or S2)");
}

DataMatrix build_s1(const DegradationDataset& d) {
    if (d.n() == 0 || d.k() == 0) throw Error(ErrorKind::Input, "S1: empty dataset");
    const int m = d.m();
    if (m == 0) throw Error(ErrorKind::Input, "S1: empty dataset");
    DataMatrix out;
    out.labels = d.labels();
    out.strategy = Strategy::RawStacking;
    out.values.resize(static_cast<Eigen::Index>(d.n()) * m, d.k());
    for (int i = 0; i < d.n(); ++i) out.values.middleRows(static_cast<Eigen::Index>(i) * m, m) = d.unit(i).values;
    return out;
}

DataMatrix build_s2(const DegradationDataset& d) {
    if (d.n() == 0 || d.k() == 0) throw Error(ErrorKind::Input, "S2: empty dataset");
    const int m = d.m();
    if (m < 2) throw Error(ErrorKind::Input, "S2: need at least two measurements per unit");
    DataMatrix out;
    out.labels = d.labels();
    out.strategy = Strategy::IncrementStacking;
    out.values.resize(static_cast<Eigen::Index>(d.n()) * (m - 1), d.k());
    for (int i = 0; i < d.n(); ++i) {
        const auto& v = d.unit(i).values;
        out.values.middleRows(static_cast<Eigen::Index>(i) * (m - 1), m - 1) = v.bottomRows(m - 1) - v.topRows(m - 1);
    }
    return out;
}

DataMatrix build_matrix(const DegradationDataset& d, Strategy s, bool standardize) {
    DataMatrix out = s == Strategy::RawStacking ? build_s1(d) : build_s2(d);
    return standardize ? standardized(std::move(out)) : out;
}

DataMatrix standardized(DataMatrix m) {
    const Eigen::Index rows = m.values.rows();
    if (rows < 2) return m;
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
        auto col = m.values.col(c);
        col.array() -= col.mean();
        const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(rows - 1));
        if (sd > 0.0) col /= sd;
    }
    return m;
}

}  // namespace degcausal

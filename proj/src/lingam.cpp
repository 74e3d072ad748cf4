#include <algorithm>
#include <limits>

#include "degcausal/discovery.hpp"
#include "degcausal/error.hpp"
#include "degcausal/stats.hpp"

namespace degcausal {

namespace {

// x - cov(x, y) / var(y) * y
Eigen::VectorXd residual(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd yc = y.array() - y.mean();
    const Eigen::VectorXd xc = x.array() - x.mean();
    const double var = yc.squaredNorm();
    if (!(var > 0.0)) throw Error(ErrorKind::DegenerateInput, "direct-lingam: zero-variance regressor");
    return x - (xc.dot(yc) / var) * y;
}

}  // namespace

std::vector<int> lingam_causal_order(const DataMatrix& m) {
    const int k = m.cols();
    if (m.rows() < 20) throw Error(ErrorKind::Input, "direct-lingam: need at least 20 rows");
    Eigen::MatrixXd x = m.values;
    std::vector<int> remaining(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) remaining[static_cast<std::size_t>(i)] = i;
    std::vector<int> order;

    while (!remaining.empty()) {
        int pick = remaining.front();
        if (remaining.size() > 1) {
            double best = std::numeric_limits<double>::infinity();
            for (int i : remaining) {
                double penalty = 0.0;
                for (int j : remaining) {
                    if (i == j) continue;
                    const double stat = pairwise_lr(Eigen::VectorXd(x.col(i)), Eigen::VectorXd(x.col(j)));
                    const double neg = std::min(0.0, stat);
                    penalty += neg * neg;
                }
                if (penalty < best) {
                    best = penalty;
                    pick = i;
                }
            }
        }
        order.push_back(pick);
        remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
        const Eigen::VectorXd root = x.col(pick);
        for (int i : remaining) x.col(i) = residual(x.col(i), root);
    }
    return order;
}

DiscoveryResult direct_lingam(const DataMatrix& m, const LingamConfig& cfg) {
    const int k = m.cols();
    const std::vector<int> order = lingam_causal_order(m);
    const Eigen::Index rows = m.values.rows();

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k);  // b(i, j): coefficient of i in the equation of j
    for (int pos = 1; pos < k; ++pos) {
        const int target = order[static_cast<std::size_t>(pos)];
        Eigen::MatrixXd design(rows, pos + 1);
        design.col(0).setOnes();
        for (int p = 0; p < pos; ++p) design.col(p + 1) = m.values.col(order[static_cast<std::size_t>(p)]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < pos + 1) throw Error(ErrorKind::DegenerateInput, "direct-lingam: collinear predecessors");
        const Eigen::VectorXd coef = qr.solve(m.values.col(target));
        for (int p = 0; p < pos; ++p) b(order[static_cast<std::size_t>(p)], target) = coef(p + 1);
    }

    DiscoveryResult out;
    out.graph = CausalGraph(k, m.labels);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j && std::abs(b(i, j)) > cfg.edge_threshold) out.graph.add_directed(i, j);
    out.weights = b;
    out.is_dag = true;
    return out;
}

}  // namespace degcausal

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "degcausal/discovery.hpp"
#include "degcausal/error.hpp"
#include "degcausal/optim.hpp"
#include "degcausal/rng.hpp"

namespace degcausal {

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::Input, "matrix exponential: non-square input");
    if (!a.allFinite()) throw Error(ErrorKind::Numerical, "matrix exponential: non-finite entries");
    const Eigen::Index n = a.rows();
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Eigen::MatrixXd b = a / std::ldexp(1.0, squarings);

    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int p = 1; p <= 30; ++p) {
        term = term * b / static_cast<double>(p);
        result += term;
        if (term.cwiseAbs().maxCoeff() <= std::numeric_limits<double>::epsilon() * result.cwiseAbs().maxCoeff()) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    if (!result.allFinite()) throw Error(ErrorKind::Numerical, "matrix exponential overflow");
    return result;
}

AcyclicityValue acyclicity_h(const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols()) throw Error(ErrorKind::Input, "acyclicity: non-square weight matrix");
    if (!w.allFinite()) throw Error(ErrorKind::Numerical, "acyclicity: non-finite weights");
    const Eigen::MatrixXd e = matrix_exponential(w.cwiseProduct(w));
    AcyclicityValue out;
    out.h = e.trace() - static_cast<double>(w.rows());
    out.gradient = e.transpose().cwiseProduct(2.0 * w);
    return out;
}

double notears_linear_smooth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, double rho, double alpha,
                             Eigen::MatrixXd& grad) {
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd r = x - x * w;
    const double loss = 0.5 / n * r.squaredNorm();
    const AcyclicityValue h = acyclicity_h(w);
    grad = -(x.transpose() * r) / n + (rho * h.h + alpha) * h.gradient;
    return loss + 0.5 * rho * h.h * h.h + alpha * h.h;
}

CausalGraph threshold_to_dag(const Eigen::MatrixXd& w, double threshold, const std::vector<std::string>& labels) {
    const int k = static_cast<int>(w.rows());
    std::vector<std::vector<char>> edge(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j && std::abs(w(i, j)) > threshold) edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;

    auto reaches = [&](int from, int to) {
        std::vector<char> seen(static_cast<std::size_t>(k), 0);
        std::vector<int> stack{from};
        seen[static_cast<std::size_t>(from)] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            if (v == to) return true;
            for (int u = 0; u < k; ++u)
                if (edge[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] && !seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    stack.push_back(u);
                }
        }
        return false;
    };

    while (true) {
        int drop_i = -1;
        int drop_j = -1;
        double smallest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] && reaches(j, i) && std::abs(w(i, j)) < smallest) {
                    smallest = std::abs(w(i, j));
                    drop_i = i;
                    drop_j = j;
                }
        if (drop_i < 0) break;
        edge[static_cast<std::size_t>(drop_i)][static_cast<std::size_t>(drop_j)] = 0;
    }

    CausalGraph g(k, labels);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) g.add_directed(i, j);
    return g;
}

DiscoveryResult notears_linear(const DataMatrix& m, const NotearsLinearConfig& cfg) {
    const int k = m.cols();
    if (m.rows() <= k) throw Error(ErrorKind::Input, "notears-linear: need more rows than variables");
    const Eigen::MatrixXd x = m.values.rowwise() - m.values.colwise().mean();
    const Eigen::Index kk = static_cast<Eigen::Index>(k) * k;

    // w = [W+ | W-] column-major, W = W+ - W-, both nonnegative, zero diagonal.
    Eigen::VectorXd lower = Eigen::VectorXd::Zero(2 * kk);
    Eigen::VectorXd upper = Eigen::VectorXd::Constant(2 * kk, std::numeric_limits<double>::infinity());
    for (int i = 0; i < k; ++i) {
        upper(i * k + i) = 0.0;
        upper(kk + i * k + i) = 0.0;
    }

    double rho = 1.0;
    double alpha = 0.0;
    double h = std::numeric_limits<double>::infinity();
    Eigen::VectorXd w_est = Eigen::VectorXd::Zero(2 * kk);

    auto to_matrix = [&](const Eigen::VectorXd& w) -> Eigen::MatrixXd {
        return Eigen::Map<const Eigen::MatrixXd>(w.data(), k, k) - Eigen::Map<const Eigen::MatrixXd>(w.data() + kk, k, k);
    };

    for (int outer = 0; outer < cfg.max_outer_iter; ++outer) {
        Eigen::VectorXd w_new = w_est;
        double h_new = h;
        while (rho < cfg.rho_max) {
            const Objective objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
                Eigen::MatrixXd g_smooth;
                const double smooth = notears_linear_smooth(x, to_matrix(w), rho, alpha, g_smooth);
                grad.resize(2 * kk);
                const Eigen::Map<const Eigen::VectorXd> gv(g_smooth.data(), kk);
                grad.head(kk) = gv.array() + cfg.l1;
                grad.tail(kk) = -gv.array() + cfg.l1;
                return smooth + cfg.l1 * w.sum();
            };
            w_new = minimize_box_lbfgs(objective, w_est, lower, upper).x;
            h_new = acyclicity_h(to_matrix(w_new)).h;
            if (h_new > 0.25 * h) {
                rho *= 10.0;
            } else {
                break;
            }
        }
        w_est = w_new;
        h = h_new;
        alpha += rho * h;
        if (h <= cfg.h_tol || rho >= cfg.rho_max) break;
    }

    DiscoveryResult out;
    out.weights = to_matrix(w_est);
    out.final_h = h;
    out.converged = h <= cfg.h_tol;
    out.graph = threshold_to_dag(out.weights, cfg.edge_threshold, m.labels);
    out.is_dag = true;
    return out;
}

// ---------------------------------------------------------------------------
// NOTEARS-MLP

namespace {

struct MlpLayout {
    Eigen::Index k, hidden, w1, pos, neg, b1, w2, b2, total;

    MlpLayout(int k_, int hidden_) : k(k_), hidden(hidden_) {
        w1 = k * hidden * k;
        pos = 0;
        neg = w1;
        b1 = 2 * w1;
        w2 = b1 + k * hidden;
        b2 = w2 + k * hidden;
        total = b2 + k;
    }
    // Offset of first-layer weight (network j, hidden unit h, input i).
    Eigen::Index first(Eigen::Index j, Eigen::Index h, Eigen::Index i) const { return j * hidden * k + h * k + i; }
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Net first-layer weights of network j as a (hidden x k) matrix.
RowMajorMatrix first_layer(const MlpLayout& L, const Eigen::VectorXd& theta, Eigen::Index j) {
    const Eigen::Map<const RowMajorMatrix> p(theta.data() + L.pos + j * L.hidden * L.k, L.hidden, L.k);
    const Eigen::Map<const RowMajorMatrix> n(theta.data() + L.neg + j * L.hidden * L.k, L.hidden, L.k);
    return p - n;
}

// adj(i, j) = sum_h W1[j](h, i)^2
Eigen::MatrixXd squared_adjacency(const MlpLayout& L, const Eigen::VectorXd& theta) {
    Eigen::MatrixXd a(L.k, L.k);
    for (Eigen::Index j = 0; j < L.k; ++j) a.col(j) = first_layer(L, theta, j).colwise().squaredNorm().transpose();
    return a;
}

}  // namespace

MlpParameters MlpParameters::initial(int k, int hidden, std::uint64_t seed) {
    const MlpLayout L(k, hidden);
    MlpParameters p;
    p.k = k;
    p.hidden = hidden;
    p.theta.resize(L.total);
    Rng rng = make_rng(seed, {0x6d6c70ULL});
    const double b_in = 1.0 / std::sqrt(static_cast<double>(k));
    const double b_hidden = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> u_in(-b_in, b_in);
    std::uniform_real_distribution<double> u_hidden(-b_hidden, b_hidden);
    for (Eigen::Index t = 0; t < L.b1; ++t) p.theta(t) = u_in(rng);
    for (Eigen::Index t = L.b1; t < L.w2; ++t) p.theta(t) = u_in(rng);
    for (Eigen::Index t = L.w2; t < L.total; ++t) p.theta(t) = u_hidden(rng);
    Eigen::VectorXd lower, upper;
    p.bounds(lower, upper);
    p.theta = p.theta.cwiseMax(lower).cwiseMin(upper);
    return p;
}

Eigen::MatrixXd MlpParameters::adjacency() const {
    return squared_adjacency(MlpLayout(k, hidden), theta).cwiseSqrt();
}

void MlpParameters::bounds(Eigen::VectorXd& lower, Eigen::VectorXd& upper) const {
    const MlpLayout L(k, hidden);
    const double inf = std::numeric_limits<double>::infinity();
    lower = Eigen::VectorXd::Constant(L.total, -inf);
    upper = Eigen::VectorXd::Constant(L.total, inf);
    lower.head(L.b1).setZero();
    for (Eigen::Index j = 0; j < L.k; ++j)
        for (Eigen::Index h = 0; h < L.hidden; ++h) {
            upper(L.pos + L.first(j, h, j)) = 0.0;
            upper(L.neg + L.first(j, h, j)) = 0.0;
        }
}

double notears_mlp_objective(const Eigen::MatrixXd& x, const MlpParameters& p, const NotearsMlpConfig& cfg, double rho,
                             double alpha, Eigen::VectorXd& grad) {
    const MlpLayout L(p.k, p.hidden);
    const Eigen::VectorXd& theta = p.theta;
    const double n = static_cast<double>(x.rows());
    grad = Eigen::VectorXd::Zero(L.total);

    double loss = 0.0;
    std::vector<RowMajorMatrix> w1(static_cast<std::size_t>(L.k));
    for (Eigen::Index j = 0; j < L.k; ++j) {
        w1[static_cast<std::size_t>(j)] = first_layer(L, theta, j);
        const auto& wj = w1[static_cast<std::size_t>(j)];
        const Eigen::Map<const Eigen::VectorXd> b1(theta.data() + L.b1 + j * L.hidden, L.hidden);
        const Eigen::Map<const Eigen::VectorXd> w2(theta.data() + L.w2 + j * L.hidden, L.hidden);
        const double b2 = theta(L.b2 + j);

        Eigen::MatrixXd z = x * wj.transpose();
        z.rowwise() += b1.transpose();
        const Eigen::MatrixXd a = (1.0 + (-z.array()).exp()).inverse().matrix();
        const Eigen::VectorXd out = (a * w2).array() + b2;
        const Eigen::VectorXd r = out - x.col(j);
        loss += 0.5 / n * r.squaredNorm();

        const Eigen::VectorXd dout = r / n;
        grad.segment(L.w2 + j * L.hidden, L.hidden) = a.transpose() * dout;
        grad(L.b2 + j) = dout.sum();
        const Eigen::MatrixXd dz = ((dout * w2.transpose()).array() * a.array() * (1.0 - a.array())).matrix();
        grad.segment(L.b1 + j * L.hidden, L.hidden) = dz.colwise().sum().transpose();
        const RowMajorMatrix gw1 = dz.transpose() * x;  // hidden x k
        Eigen::Map<RowMajorMatrix>(grad.data() + L.pos + j * L.hidden * L.k, L.hidden, L.k) = gw1;
    }
    if (!std::isfinite(loss)) throw Error(ErrorKind::Divergence, "notears-mlp: non-finite loss");

    const Eigen::MatrixXd adj = squared_adjacency(L, theta);
    const Eigen::MatrixXd e = matrix_exponential(adj);
    const double h = e.trace() - static_cast<double>(L.k);
    const double dual = rho * h + alpha;

    double l2 = 0.0;
    double l1 = 0.0;
    for (Eigen::Index j = 0; j < L.k; ++j) {
        const auto& wj = w1[static_cast<std::size_t>(j)];
        Eigen::Map<RowMajorMatrix> gw1(grad.data() + L.pos + j * L.hidden * L.k, L.hidden, L.k);
        for (Eigen::Index hh = 0; hh < L.hidden; ++hh)
            for (Eigen::Index i = 0; i < L.k; ++i) gw1(hh, i) += dual * e(j, i) * 2.0 * wj(hh, i) + cfg.l2 * wj(hh, i);
        l2 += wj.squaredNorm();
    }
    const auto w2 = theta.segment(L.w2, L.k * L.hidden);
    l2 += w2.squaredNorm();
    grad.segment(L.w2, L.k * L.hidden) += cfg.l2 * w2;
    l1 = theta.head(2 * L.w1).sum();

    // Split the first-layer gradient into its positive and negative parts.
    const Eigen::VectorXd g_net = grad.head(L.w1);
    grad.segment(L.pos, L.w1) = g_net.array() + cfg.l1;
    grad.segment(L.neg, L.w1) = -g_net.array() + cfg.l1;

    return loss + 0.5 * rho * h * h + alpha * h + 0.5 * cfg.l2 * l2 + cfg.l1 * l1;
}

DiscoveryResult notears_mlp(const DataMatrix& m, const NotearsMlpConfig& cfg, std::uint64_t seed) {
    const int k = m.cols();
    if (m.rows() <= k) throw Error(ErrorKind::Input, "notears-mlp: need more rows than variables");
    if (cfg.hidden_units < 1) throw Error(ErrorKind::Config, "notears-mlp: hidden_units must be >= 1");
    const Eigen::MatrixXd& x = m.values;

    MlpParameters params = MlpParameters::initial(k, cfg.hidden_units, seed);
    Eigen::VectorXd lower, upper;
    params.bounds(lower, upper);

    double rho = 1.0;
    double alpha = 0.0;
    double h = std::numeric_limits<double>::infinity();
    auto h_of = [&](const MlpParameters& p) {
        return matrix_exponential(squared_adjacency(MlpLayout(p.k, p.hidden), p.theta)).trace() - static_cast<double>(k);
    };

    for (int outer = 0; outer < cfg.max_outer_iter; ++outer) {
        double h_new = h;
        // The inner solve warm-starts from the current parameters, including
        // after a penalty increase.
        while (rho < cfg.rho_max) {
            MlpParameters probe = params;
            const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
                probe.theta = theta;
                return notears_mlp_objective(x, probe, cfg, rho, alpha, grad);
            };
            params.theta = minimize_box_lbfgs(objective, params.theta, lower, upper).x;
            h_new = h_of(params);
            if (h_new > 0.25 * h) {
                rho *= 10.0;
            } else {
                break;
            }
        }
        h = h_new;
        alpha += rho * h;
        if (h <= cfg.h_tol || rho >= cfg.rho_max) break;
    }

    DiscoveryResult out;
    out.weights = params.adjacency();
    out.final_h = h;
    out.converged = h <= cfg.h_tol;
    out.graph = threshold_to_dag(out.weights, cfg.edge_threshold, m.labels);
    out.is_dag = true;
    return out;
}

}  // namespace degcausal

#include "degcausal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "degcausal/error.hpp"

namespace degcausal {

namespace {

// Residual variance below this fraction of the raw variance means the column
// is a deterministic function of the conditioning set.
constexpr double kDegenerateResidual = 1e-10;

std::string describe(int i, int j, const std::vector<int>& cond) {
    std::ostringstream os;
    os << "(" << i << "," << j << " | {";
    for (std::size_t s = 0; s < cond.size(); ++s) os << (s ? "," : "") << cond[s];
    os << "})";
    return os.str();
}

void check_columns(int cols, int i, int j, const std::vector<int>& cond) {
    auto in_range = [cols](int c) { return c >= 0 && c < cols; };
    if (!in_range(i) || !in_range(j) || i == j) throw Error(ErrorKind::Input, "invalid column pair " + describe(i, j, cond));
    for (int c : cond)
        if (!in_range(c) || c == i || c == j)
            throw Error(ErrorKind::Input, "invalid conditioning set " + describe(i, j, cond));
}

Eigen::MatrixXd population_covariance(const Eigen::MatrixXd& x) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    return (centered.transpose() * centered) / static_cast<double>(x.rows());
}

// Columns of very different magnitude (farads next to hertz) would fool the
// rank test, so regressions are solved on the correlation scale.
Eigen::MatrixXd correlation_of(const Eigen::MatrixXd& cov) {
    Eigen::VectorXd sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index i = 0; i < sd.size(); ++i)
        if (!(sd(i) > 0.0)) sd(i) = 1.0;
    const Eigen::VectorXd inv = sd.cwiseInverse();
    return inv.asDiagonal() * cov * inv.asDiagonal();
}

Eigen::MatrixXd select(const Eigen::MatrixXd& c, const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = c(rows[a], cols[b]);
    return out;
}

double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

Eigen::VectorXd standardize_or_throw(const Eigen::VectorXd& x, const char* which) {
    const double n = static_cast<double>(x.size());
    const Eigen::VectorXd centered = x.array() - x.mean();
    const double sd = std::sqrt(centered.squaredNorm() / n);
    if (!(sd > 0.0) || !std::isfinite(sd))
        throw Error(ErrorKind::DegenerateInput, std::string("pairwise likelihood ratio: zero-variance column ") + which);
    return centered / sd;
}

}  // namespace

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

double partial_correlation(const DataMatrix& m, int i, int j, const std::vector<int>& cond) {
    check_columns(m.cols(), i, j, cond);
    const Eigen::Index rows = m.values.rows();
    const auto s = static_cast<Eigen::Index>(cond.size());
    if (rows <= s + 2) throw Error(ErrorKind::Input, "too few rows for partial correlation " + describe(i, j, cond));

    Eigen::MatrixXd design(rows, s + 1);
    design.col(0).setOnes();
    for (Eigen::Index c = 0; c < s; ++c) {
        const auto col = m.values.col(cond[static_cast<std::size_t>(c)]);
        const double sd = std::sqrt((col.array() - col.mean()).square().mean());
        design.col(c + 1) = sd > 0.0 ? Eigen::VectorXd(col / sd) : Eigen::VectorXd(col);
    }

    Eigen::VectorXd xi = m.values.col(i);
    Eigen::VectorXd xj = m.values.col(j);
    const double var_i = (xi.array() - xi.mean()).square().sum();
    const double var_j = (xj.array() - xj.mean()).square().sum();
    if (!(var_i > 0.0) || !(var_j > 0.0))
        throw Error(ErrorKind::DegenerateInput, "zero-variance column in partial correlation " + describe(i, j, cond));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < s + 1)
        throw Error(ErrorKind::Numerical, "rank-deficient conditioning block in partial correlation " + describe(i, j, cond));
    const Eigen::VectorXd ri = xi - design * qr.solve(xi);
    const Eigen::VectorXd rj = xj - design * qr.solve(xj);
    const double ssi = ri.squaredNorm();
    const double ssj = rj.squaredNorm();
    if (ssi <= kDegenerateResidual * var_i || ssj <= kDegenerateResidual * var_j) return 0.0;
    return std::clamp(ri.dot(rj) / std::sqrt(ssi * ssj), -1.0, 1.0);
}

CITestResult fisher_z_test(double r, int rows, int s_size, double alpha) {
    const int dof = rows - s_size - 3;
    if (dof <= 0) {
        std::ostringstream msg;
        msg << "Fisher z test infeasible: rows=" << rows << ", |S|=" << s_size;
        throw Error(ErrorKind::TestInfeasible, msg.str());
    }
    if (!std::isfinite(r)) throw Error(ErrorKind::Numerical, "Fisher z test: non-finite correlation");
    CITestResult out;
    if (std::abs(r) >= 1.0) {
        out.statistic = std::copysign(std::numeric_limits<double>::max(), r);
        out.p_value = 0.0;
        out.independent = false;
        return out;
    }
    out.statistic = std::atanh(r) * std::sqrt(static_cast<double>(dof));
    out.p_value = std::clamp(normal_two_sided_p(out.statistic), 0.0, 1.0);
    out.independent = out.p_value > alpha;
    return out;
}

PartialCorrelationKernel::PartialCorrelationKernel(const DataMatrix& m)
    : cov_(population_covariance(m.values)), corr_(correlation_of(cov_)), rows_(m.rows()) {}

double PartialCorrelationKernel::operator()(int i, int j, const std::vector<int>& cond) const {
    check_columns(cols(), i, j, cond);
    if (!(cov_(i, i) > 0.0) || !(cov_(j, j) > 0.0))
        throw Error(ErrorKind::DegenerateInput, "zero-variance column in partial correlation " + describe(i, j, cond));
    double cii = corr_(i, i);
    double cjj = corr_(j, j);
    double cij = corr_(i, j);
    if (!cond.empty()) {
        const Eigen::MatrixXd css = select(corr_, cond, cond);
        const std::vector<int> ij{i, j};
        const Eigen::MatrixXd csx = select(corr_, cond, ij);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(css);
        if (qr.rank() < css.rows())
            throw Error(ErrorKind::Numerical, "rank-deficient conditioning block in partial correlation " + describe(i, j, cond));
        const Eigen::MatrixXd proj = csx.transpose() * qr.solve(csx);
        cii -= proj(0, 0);
        cjj -= proj(1, 1);
        cij -= proj(0, 1);
    }
    if (cii <= kDegenerateResidual || cjj <= kDegenerateResidual) return 0.0;
    return std::clamp(cij / std::sqrt(cii * cjj), -1.0, 1.0);
}

GaussianBicScore::GaussianBicScore(const DataMatrix& m)
    : cov_(population_covariance(m.values)), corr_(correlation_of(cov_)), rows_(m.rows()) {}

double GaussianBicScore::local_score(int child, const std::vector<int>& parents) const {
    const int k = static_cast<int>(cov_.rows());
    if (child < 0 || child >= k) throw Error(ErrorKind::Input, "BIC: child column out of range");
    for (int p : parents)
        if (p < 0 || p >= k || p == child) throw Error(ErrorKind::Input, "BIC: invalid parent column");
    if (rows_ <= static_cast<int>(parents.size()) + 2) throw Error(ErrorKind::Input, "BIC: too few rows");

    double explained = 0.0;
    if (!parents.empty()) {
        const Eigen::MatrixXd cpp = select(corr_, parents, parents);
        const Eigen::MatrixXd cpc = select(corr_, parents, {child});
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cpp);
        if (qr.rank() < cpp.rows()) {
            std::ostringstream msg;
            msg << "BIC: singular regression for child " << child << " on " << parents.size() << " parents";
            throw Error(ErrorKind::Numerical, msg.str());
        }
        explained = (cpc.transpose() * qr.solve(cpc))(0, 0);
    }
    const double resid = cov_(child, child) * (1.0 - explained);
    if (!(resid > 0.0) || !std::isfinite(resid)) {
        std::ostringstream msg;
        msg << "BIC: non-positive residual variance for child " << child;
        throw Error(ErrorKind::Numerical, msg.str());
    }
    const double n = static_cast<double>(rows_);
    return -n * std::log(resid) - static_cast<double>(parents.size()) * std::log(n);
}

double bic_local_score(const DataMatrix& m, int child, const std::vector<int>& parents) {
    return GaussianBicScore(m).local_score(child, parents);
}

double bic_local_delta(const DataMatrix& m, int child, const std::vector<int>& parents_before,
                       const std::vector<int>& parents_after) {
    const GaussianBicScore score(m);
    auto sorted = [](std::vector<int> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    if (sorted(parents_before) == sorted(parents_after)) return 0.0;
    return score.local_score(child, parents_after) - score.local_score(child, parents_before);
}

double maxent_entropy(const Eigen::VectorXd& u) {
    constexpr double k1 = 79.047;
    constexpr double k2 = 7.4129;
    constexpr double gamma = 0.37457;
    const double n = static_cast<double>(u.size());
    double lc = 0.0;
    double gm = 0.0;
    for (Eigen::Index t = 0; t < u.size(); ++t) {
        lc += log_cosh(u(t));
        gm += u(t) * std::exp(-0.5 * u(t) * u(t));
    }
    lc /= n;
    gm /= n;
    return 0.5 * (1.0 + std::log(2.0 * std::numbers::pi)) - k1 * (lc - gamma) * (lc - gamma) - k2 * gm * gm;
}

double pairwise_lr(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
    if (xi.size() != xj.size()) throw Error(ErrorKind::Input, "pairwise likelihood ratio: length mismatch");
    if (xi.size() < 20) throw Error(ErrorKind::Input, "pairwise likelihood ratio: need at least 20 rows");
    const Eigen::VectorXd si = standardize_or_throw(xi, "i");
    const Eigen::VectorXd sj = standardize_or_throw(xj, "j");
    const double rho = si.dot(sj) / static_cast<double>(si.size());
    const double resid_sd = std::sqrt(std::max(0.0, 1.0 - rho * rho));

    auto normalized_residual = [&](const Eigen::VectorXd& target, const Eigen::VectorXd& regressor) -> Eigen::VectorXd {
        if (resid_sd < 1e-6) return Eigen::VectorXd::Zero(target.size());
        return (target - rho * regressor) / resid_sd;
    };
    // Entropy of the decomposition "i causes j" versus "j causes i".
    const double i_first = maxent_entropy(si) + maxent_entropy(normalized_residual(sj, si));
    const double j_first = maxent_entropy(sj) + maxent_entropy(normalized_residual(si, sj));
    return j_first - i_first;
}

double pairwise_lr(const DataMatrix& m, int i, int j) {
    if (i < 0 || j < 0 || i >= m.cols() || j >= m.cols()) throw Error(ErrorKind::Input, "pairwise likelihood ratio: column out of range");
    return pairwise_lr(Eigen::VectorXd(m.values.col(i)), Eigen::VectorXd(m.values.col(j)));
}

}  // namespace degcausal

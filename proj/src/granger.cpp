#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "degcausal/discovery.hpp"
#include "degcausal/error.hpp"

namespace degcausal {

namespace {

// Residual sum of squares of y on [1, lagged columns].
double lagged_rss(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::VectorXd r = y - design * qr.solve(y);
    return r.squaredNorm();
}

Eigen::MatrixXd lag_design(const Eigen::VectorXd& target, const Eigen::VectorXd* source, int lag) {
    const Eigen::Index m = target.size();
    const Eigen::Index rows = m - lag;
    const Eigen::Index cols = 1 + lag * (source ? 2 : 1);
    Eigen::MatrixXd d(rows, cols);
    d.col(0).setOnes();
    for (int l = 1; l <= lag; ++l) {
        d.col(l) = target.segment(lag - l, rows);
        if (source) d.col(lag + l) = source->segment(lag - l, rows);
    }
    return d;
}

int select_lag_by_aic(const Eigen::VectorXd& target, int max_lag) {
    int best_lag = 1;
    double best_aic = std::numeric_limits<double>::infinity();
    // Compare on a common sample so the criteria are comparable.
    const Eigen::Index m = target.size();
    for (int lag = 1; lag <= max_lag; ++lag) {
        const Eigen::VectorXd y = target.tail(m - max_lag);
        Eigen::MatrixXd d(m - max_lag, 1 + lag);
        d.col(0).setOnes();
        for (int l = 1; l <= lag; ++l) d.col(l) = target.segment(max_lag - l, m - max_lag);
        const double rss = lagged_rss(d, y);
        const double n = static_cast<double>(y.size());
        const double aic = n * std::log(std::max(rss / n, 1e-300)) + 2.0 * (lag + 1);
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = lag;
        }
    }
    return best_lag;
}

// p-value of "lags of source improve the autoregression of target".
double granger_p(const Eigen::VectorXd& target, const Eigen::VectorXd& source, int lag) {
    const Eigen::Index rows = target.size() - lag;
    const Eigen::VectorXd y = target.tail(rows);
    const double rss_r = lagged_rss(lag_design(target, nullptr, lag), y);
    const double rss_u = lagged_rss(lag_design(target, &source, lag), y);
    const double df1 = lag;
    const double df2 = static_cast<double>(rows) - 2.0 * lag - 1.0;
    if (df2 <= 0.0) throw Error(ErrorKind::TestInfeasible, "granger: too few observations for the lag order");
    const double scale = std::max(rss_r, 1e-300);
    if (rss_u <= 1e-14 * scale) return rss_r - rss_u > 1e-14 * scale ? 0.0 : 1.0;
    const double f = std::max(0.0, ((rss_r - rss_u) / df1) / (rss_u / df2));
    const boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

}  // namespace

DiscoveryResult granger_pairwise(const DegradationDataset& d, const GrangerConfig& cfg) {
    if (cfg.max_lag < 1) throw Error(ErrorKind::Config, "granger: max_lag must be >= 1");
    const int k = d.k();
    if (d.n() == 0) throw Error(ErrorKind::Input, "granger: empty dataset");
    const int lag_cap = cfg.aic_lag_selection ? cfg.aic_max_lag : cfg.max_lag;
    for (const auto& u : d.units()) {
        if (u.values.rows() <= 3 * lag_cap) {
            std::ostringstream msg;
            msg << "granger: unit " << u.id << " has " << u.values.rows() << " measurements, need more than " << 3 * lag_cap;
            throw Error(ErrorKind::TestInfeasible, msg.str());
        }
    }

    CausalGraph g(k, d.labels());
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Ones(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            // Fisher's method: -2 sum ln p ~ chi2(2n) under the null.
            double stat = 0.0;
            for (const auto& u : d.units()) {
                const Eigen::VectorXd target = u.values.col(j);
                const Eigen::VectorXd source = u.values.col(i);
                const int lag = cfg.aic_lag_selection ? select_lag_by_aic(target, cfg.aic_max_lag) : cfg.max_lag;
                const double p = std::max(granger_p(target, source, lag), std::numeric_limits<double>::min());
                stat += -2.0 * std::log(p);
            }
            const boost::math::chi_squared chi(2.0 * d.n());
            pooled(i, j) = boost::math::cdf(boost::math::complement(chi, stat));
            if (pooled(i, j) < cfg.alpha) g.add_directed(i, j);
        }
    }
    // Mutual detection i->j and j->i is stored as a symmetric pair.
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (pooled(i, j) < cfg.alpha && pooled(j, i) < cfg.alpha) g.add_undirected(i, j);

    DiscoveryResult out;
    out.graph = g;
    out.is_dag = !g.has_undirected_edges() && is_acyclic(g);
    out.weights = pooled;
    return out;
}

}  // namespace degcausal

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "degcausal/strategy.hpp"

namespace degcausal {

struct CITestResult {
    double statistic = 0.0;  // Fisher z
    double p_value = 1.0;
    bool independent = true;
};

/// Pearson correlation of the residuals of columns i and j after least-squares
/// projection on the columns in `cond` plus an intercept.
double partial_correlation(const DataMatrix& m, int i, int j, const std::vector<int>& cond);

/// z = atanh(r) * sqrt(rows - s_size - 3), two-sided normal p-value.
/// |r| >= 1 declares dependence with p = 0.
CITestResult fisher_z_test(double r, int rows, int s_size, double alpha);

/// Partial correlations from a cached covariance matrix; algebraically the
/// same residual regression as partial_correlation, without touching rows.
class PartialCorrelationKernel {
public:
    explicit PartialCorrelationKernel(const DataMatrix& m);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return static_cast<int>(cov_.rows()); }
    double operator()(int i, int j, const std::vector<int>& cond) const;

private:
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd corr_;
    int rows_ = 0;
};

/// Gaussian linear-regression BIC local score, higher is better:
///   score(child | P) = -rows * ln(RSS / rows) - |P| * ln(rows).
class GaussianBicScore {
public:
    explicit GaussianBicScore(const DataMatrix& m);

    int rows() const noexcept { return rows_; }
    double local_score(int child, const std::vector<int>& parents) const;

private:
    Eigen::MatrixXd cov_;  // population covariance
    Eigen::MatrixXd corr_;
    int rows_ = 0;
};

double bic_local_score(const DataMatrix& m, int child, const std::vector<int>& parents);

/// score(child | after) - score(child | before).
double bic_local_delta(const DataMatrix& m, int child, const std::vector<int>& parents_before,
                       const std::vector<int>& parents_after);

/// Maximum-entropy approximation of differential entropy for a standardized
/// sample (log-cosh and Gaussian-weighted moment terms).
double maxent_entropy(const Eigen::VectorXd& u);

/// Pairwise likelihood-ratio direction statistic: positive when the data
/// favour i -> j under a linear non-Gaussian model. stat(i,j) == -stat(j,i)
/// exactly. Both inputs are standardized internally.
double pairwise_lr(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);
double pairwise_lr(const DataMatrix& m, int i, int j);

/// Standard normal upper-tail helpers.
double normal_two_sided_p(double z);

}  // namespace degcausal

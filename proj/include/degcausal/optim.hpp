#pragma once

#include <functional>

#include <Eigen/Dense>

namespace degcausal {

/// f(x, grad) -> value; grad is resized by the caller to x.size().
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct BoxLbfgsOptions {
    int max_iterations = 15000;
    int memory = 10;
    double pgtol = 1e-5;   // projected-gradient infinity norm
    double ftol = 2.220446049250313e-09;  // relative decrease
    int max_backtracks = 40;
};

struct BoxLbfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Projected limited-memory BFGS for min f(x) s.t. lower <= x <= upper
/// (infinite bounds allowed). Variables pinned at an active bound with an
/// outward gradient are frozen for the quasi-Newton step; the step itself is
/// projected back onto the box with Armijo backtracking.
BoxLbfgsResult minimize_box_lbfgs(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, const BoxLbfgsOptions& options = {});

}  // namespace degcausal

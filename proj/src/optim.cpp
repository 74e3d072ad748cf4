#include "degcausal/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "degcausal/error.hpp"

namespace degcausal {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

struct CurvaturePair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

}  // namespace

BoxLbfgsResult minimize_box_lbfgs(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, const BoxLbfgsOptions& options) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n) throw Error(ErrorKind::Input, "box L-BFGS: bound dimension mismatch");

    BoxLbfgsResult res;
    res.x = project(x0, lower, upper);
    Eigen::VectorXd g(n);
    res.value = f(res.x, g);
    res.evaluations = 1;
    if (!std::isfinite(res.value) || !g.allFinite()) throw Error(ErrorKind::Divergence, "box L-BFGS: non-finite objective at start");

    std::deque<CurvaturePair> memory;
    Eigen::VectorXd x_new(n), g_new(n), d(n);
    std::vector<char> active(static_cast<std::size_t>(n));

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        res.iterations = iter;
        const Eigen::VectorXd pg = res.x - project(res.x - g, lower, upper);
        if (pg.lpNorm<Eigen::Infinity>() <= options.pgtol) {
            res.converged = true;
            return res;
        }

        for (Eigen::Index i = 0; i < n; ++i) {
            const bool fixed = lower(i) == upper(i);
            const bool at_lower = res.x(i) <= lower(i) && g(i) > 0.0;
            const bool at_upper = res.x(i) >= upper(i) && g(i) < 0.0;
            active[static_cast<std::size_t>(i)] = fixed || at_lower || at_upper;
        }
        auto mask = [&](Eigen::VectorXd& v) {
            for (Eigen::Index i = 0; i < n; ++i)
                if (active[static_cast<std::size_t>(i)]) v(i) = 0.0;
        };

        // Two-loop recursion restricted to the free variables.
        Eigen::VectorXd q = g;
        mask(q);
        std::vector<double> alpha(memory.size());
        for (std::size_t m = memory.size(); m-- > 0;) {
            Eigen::VectorXd s = memory[m].s;
            mask(s);
            alpha[m] = memory[m].rho * s.dot(q);
            Eigen::VectorXd y = memory[m].y;
            mask(y);
            q -= alpha[m] * y;
        }
        if (!memory.empty()) {
            const auto& last = memory.back();
            q *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (std::size_t m = 0; m < memory.size(); ++m) {
            Eigen::VectorXd y = memory[m].y;
            mask(y);
            const double beta = memory[m].rho * y.dot(q);
            Eigen::VectorXd s = memory[m].s;
            mask(s);
            q += (alpha[m] - beta) * s;
        }
        d = -q;
        mask(d);
        Eigen::VectorXd g_free = g;
        mask(g_free);
        if (!(d.dot(g_free) < 0.0) || !d.allFinite()) {
            memory.clear();
            d = -g_free;
        }

        double step = 1.0;
        if (memory.empty()) step = std::min(1.0, 1.0 / std::max(d.norm(), 1e-300));
        bool accepted = false;
        double f_new = res.value;
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
            x_new = project(res.x + step * d, lower, upper);
            const double decrease = g.dot(x_new - res.x);
            f_new = f(x_new, g_new);
            ++res.evaluations;
            if (std::isfinite(f_new) && g_new.allFinite() && f_new <= res.value + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!memory.empty()) {
                memory.clear();
                continue;
            }
            res.converged = false;
            return res;
        }

        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-10 * y.squaredNorm()) {
            memory.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
        }
        const double f_old = res.value;
        res.x = x_new;
        g = g_new;
        res.value = f_new;
        if (f_old - f_new <= options.ftol * std::max({std::abs(f_old), std::abs(f_new), 1.0})) {
            res.converged = true;
            res.iterations = iter + 1;
            return res;
        }
    }
    res.iterations = options.max_iterations;
    return res;
}

}  // namespace degcausal

#pragma once

// Maximum marginal-likelihood estimation of the fixed effects of the gamma
// HGLM with the -log link, alpha and xi held fixed.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mgfml/errors.hpp"
#include "mgfml/marginalize.hpp"
#include "mgfml/models.hpp"
#include "mgfml/optimize.hpp"

namespace mgfml {

struct MmleFit {
    Eigen::VectorXd a;
    std::vector<std::string> names;
    double log_marginal = 0.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// log p(y | a, alpha, xi) for the design.
inline double gamma_hglm_log_marginal(const Design& d, const Eigen::VectorXd& a, double alpha, double xi)
{
    return gamma_integer(build_gamma_hglm(gamma_log_spec(d, a, alpha, xi))).log_value;
}

/// Least squares of log y on X; the starting point of the simplex search.
inline Eigen::VectorXd log_ols_start(const Design& d)
{
    if ((d.y.array() <= 0.0).any()) {
        throw ModelError("log_ols_start: responses must be positive");
    }
    const Eigen::VectorXd ly = d.y.array().log();
    return d.x.colPivHouseholderQr().solve(ly);
}

/// Nelder-Mead on -log p(y | a) from `start` (log-OLS when absent),
/// restarted once from the first optimum; both runs share the evaluation
/// budget.
inline MmleFit fit_gamma_hglm_mmle(const Design& d, double alpha, double xi, const NelderMeadOptions& opts = {},
                                   const std::optional<Eigen::VectorXd>& start = std::nullopt)
{
    if (!(alpha >= 1.0) || alpha != std::floor(alpha)) {
        throw ModelError("fit_gamma_hglm_mmle: alpha must be a positive integer");
    }
    if (!(xi > 0.0)) {
        throw ModelError("fit_gamma_hglm_mmle: xi must be positive");
    }
    auto objective = [&](const Eigen::VectorXd& a) {
        try {
            return -gamma_hglm_log_marginal(d, a, alpha, xi);
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    if (start && start->size() != d.x.cols()) {
        throw ShapeError("fit_gamma_hglm_mmle: start has the wrong length");
    }
    const auto first = nelder_mead(objective, start ? *start : log_ols_start(d), opts);
    NelderMeadOptions again = opts;
    again.initial_step = 0.01;
    again.max_evaluations = opts.max_evaluations > first.evaluations ? opts.max_evaluations - first.evaluations : 0;
    auto second = first;
    if (again.max_evaluations > static_cast<std::size_t>(first.x.size()) + 1) {
        second = nelder_mead(objective, first.x, again);
        second.evaluations += first.evaluations;
        second.iterations += first.iterations;
    }
    const auto& best = second.value <= first.value ? second : first;
    MmleFit out;
    out.a = best.x;
    out.names = d.coefficient_names;
    out.log_marginal = -best.value;
    out.evaluations = second.evaluations;
    out.iterations = second.iterations;
    out.converged = second.converged;
    return out;
}

}  // namespace mgfml

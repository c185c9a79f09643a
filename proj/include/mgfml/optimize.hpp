#pragma once

// Nelder-Mead simplex minimization with the standard coefficients
// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace mgfml {

struct NelderMeadOptions {
    /// Stop when (f_worst - f_best) <= ftol * (|f_best| + |f_worst|) / 2 + tiny.
    double ftol = 1e-10;
    /// ... and every vertex lies within xtol * (1 + |x_best|) of the best one,
    /// so a simplex straddling the optimum with equal values keeps shrinking.
    double xtol = 1e-8;
    std::size_t max_evaluations = 5000;
    /// Initial simplex offsets per coordinate.
    double initial_step = 0.1;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Minimizes f from x0. Non-finite objective values rank as +inf. Without
/// convergence the best vertex so far is returned with converged = false.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, const NelderMeadOptions& opts = {})
{
    const Eigen::Index n = x0.size();
    NelderMeadResult res;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    vals[0] = eval(x0);
    for (Eigen::Index i = 0; i < n; ++i) {
        pts[i + 1](i) += x0(i) != 0.0 ? opts.initial_step * std::max(1.0, std::fabs(x0(i))) : opts.initial_step;
        vals[i + 1] = eval(pts[i + 1]);
    }
    std::vector<std::size_t> order(n + 1);
    constexpr double tiny = 1e-300;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        double spread = 0.0;
        for (const auto& p : pts) {
            spread = std::max(spread, (p - pts[best]).cwiseAbs().maxCoeff());
        }
        if (2.0 * std::fabs(vals[worst] - vals[best]) <=
                opts.ftol * (std::fabs(vals[worst]) + std::fabs(vals[best])) + tiny &&
            spread <= opts.xtol * (1.0 + pts[best].cwiseAbs().maxCoeff())) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opts.max_evaluations) {
            break;
        }
        ++res.iterations;
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
            if (i != worst) {
                centroid += pts[i];
            }
        }
        centroid /= static_cast<double>(n);
        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd xc =
            outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid)) : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
            if (i != best) {
                pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                vals[i] = eval(pts[i]);
            }
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.value = vals[best];
    return res;
}

}  // namespace mgfml

#pragma once

// Marginal likelihoods of Poisson and gamma models with independent priors
// on theta, computed from derivatives of the prior mgfs:
//   Poisson, rates diag(zeta) r theta:
//     p(y) = prod zeta_j^{y_j} / y_j!  *  d^y/dt^y prod_i M_i((t^T r)_i) at t = -zeta
//   gamma, rates diag(zeta) r theta, shapes alpha:
//     p(y) = prod y_j^{alpha_j-1} zeta_j^{alpha_j} / Gamma(alpha_j)
//            *  D^alpha prod_i M_i((t^T r)_i) at t = -y * zeta
// D^alpha is the Riemann-Liouville derivative with lower limit -inf, which
// needs diagonal r whenever an alpha is fractional.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mgfml/errors.hpp"
#include "mgfml/mgf.hpp"
#include "mgfml/signed_log.hpp"
#include "mgfml/special_fn.hpp"
#include "mgfml/taylor_series.hpp"

namespace mgfml {

enum class MarginalPath {
    ClosedForm,      ///< each factor sees one observation; closed-form derivatives
    SeparableDeriv,  ///< factors own disjoint blocks of observations
    DenseSeries,     ///< observations couple factors; truncated-series mixed partial
    MellinFrac,      ///< at least one fractional order
};

inline const char* to_string(MarginalPath p)
{
    switch (p) {
    case MarginalPath::ClosedForm:
        return "closed-form";
    case MarginalPath::SeparableDeriv:
        return "separable";
    case MarginalPath::DenseSeries:
        return "dense-series";
    case MarginalPath::MellinFrac:
        return "mellin-frac";
    }
    return "unknown";
}

struct MarginalResult {
    double log_value = 0.0;
    int sign = +1;
    MarginalPath path = MarginalPath::ClosedForm;
    /// Differentiation order applied per observation.
    std::vector<double> orders_used;
    /// Log value of the second algebraic form, for operations that compute one.
    std::optional<double> alternative_log_value;

    [[nodiscard]] SignedLogReal value() const { return SignedLogReal::from_log(log_value, sign); }
};

struct PoissonProblem {
    std::vector<PriorMgf> priors;
    /// m x n; identity when absent.
    std::optional<Eigen::MatrixXd> r;
    /// Length m; all ones when absent.
    std::optional<Eigen::VectorXd> zeta;
    std::vector<std::uint64_t> y;
};

struct GammaProblem {
    std::vector<PriorMgf> priors;
    /// Shape per observation, known.
    Eigen::VectorXd alpha;
    /// m x n; identity when absent. Must be diagonal when any alpha is fractional.
    std::optional<Eigen::MatrixXd> r;
    std::optional<Eigen::VectorXd> zeta;
    Eigen::VectorXd y;
};

/// Relative tolerance for the two-form agreement checks.
inline constexpr double kFormAgreement = 1e-10;

namespace detail {

inline Eigen::MatrixXd resolve_r(const std::optional<Eigen::MatrixXd>& r, Eigen::Index m, Eigen::Index n)
{
    if (!r) {
        if (m != n) {
            throw ShapeError("marginalize: r may be omitted only when observations and priors match in number");
        }
        return Eigen::MatrixXd::Identity(m, n);
    }
    if (r->rows() != m || r->cols() != n) {
        std::ostringstream msg;
        msg << "marginalize: r is " << r->rows() << "x" << r->cols() << ", expected " << m << "x" << n;
        throw ShapeError(msg.str());
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = (*r)(j, i);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw DomainError("marginalize: r entries must be finite and non-negative");
            }
        }
    }
    return *r;
}

inline Eigen::VectorXd resolve_zeta(const std::optional<Eigen::VectorXd>& zeta, Eigen::Index m)
{
    if (!zeta) {
        return Eigen::VectorXd::Ones(m);
    }
    if (zeta->size() != m) {
        throw ShapeError("marginalize: zeta length differs from the number of observations");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        if (!((*zeta)(j) > 0.0) || !std::isfinite((*zeta)(j))) {
            throw DomainError("marginalize: zeta entries must be positive and finite");
        }
    }
    return *zeta;
}

inline bool is_diagonal(const Eigen::MatrixXd& r)
{
    if (r.rows() != r.cols()) {
        return false;
    }
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
        for (Eigen::Index i = 0; i < r.cols(); ++i) {
            if (i != j && r(j, i) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

struct LinearDerivative {
    SignedLogReal value;
    MarginalPath path;
};

/// d^{orders}/dt^{orders} prod_i M_i((t^T r)_i) at t = t0, for integer
/// orders. Picks the cheapest exact route for the sparsity of r; only rows
/// with a nonzero order count towards coupling.
inline LinearDerivative linear_mixed_partial(const std::vector<PriorMgf>& priors, const Eigen::MatrixXd& r,
                                             const Eigen::VectorXd& t0, const std::vector<unsigned>& orders)
{
    const Eigen::Index m = r.rows();
    const Eigen::Index n = r.cols();
    if (static_cast<Eigen::Index>(priors.size()) != n || t0.size() != m ||
        static_cast<Eigen::Index>(orders.size()) != m) {
        throw ShapeError("linear_mixed_partial: inconsistent dimensions");
    }
    const Eigen::VectorXd u0 = r.transpose() * t0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!priors[i].in_domain(u0(i))) {
            std::ostringstream msg;
            msg << "mgf of prior " << i << " (" << priors[i].describe() << ") evaluated at " << u0(i)
                << ", outside its domain";
            throw DomainError(msg.str());
        }
    }

    std::vector<Eigen::Index> owner(m, -1);
    bool separable = true;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (orders[j] == 0) {
            continue;
        }
        int nonzero = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (r(j, i) != 0.0) {
                ++nonzero;
                owner[j] = i;
            }
        }
        if (nonzero == 0) {
            std::ostringstream msg;
            msg << "observation " << j << " has a zero rate but a nonzero derivative order; its likelihood is 0";
            throw DomainError(msg.str());
        }
        separable = separable && nonzero == 1;
    }

    if (separable) {
        std::vector<unsigned> k(n, 0);
        double log_scale = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (orders[j] > 0) {
                k[owner[j]] += orders[j];
                log_scale += orders[j] * std::log(r(j, owner[j]));
            }
        }
        SignedLogReal v = SignedLogReal::from_log(log_scale);
        bool one_per_factor = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            v *= deriv_int(priors[i], k[i], u0(i));
        }
        std::vector<int> active_rows(n, 0);
        for (Eigen::Index j = 0; j < m; ++j) {
            if (orders[j] > 0 && ++active_rows[owner[j]] > 1) {
                one_per_factor = false;
            }
        }
        return {v, one_per_factor ? MarginalPath::ClosedForm : MarginalPath::SeparableDeriv};
    }

    std::vector<Eigen::Index> active;
    std::vector<unsigned> active_orders;
    unsigned total = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (orders[j] > 0) {
            active.push_back(j);
            active_orders.push_back(orders[j]);
            total += orders[j];
        }
    }
    if (total > kMaxDenseTotalOrder) {
        std::ostringstream msg;
        msg << "linear_mixed_partial: total order " << total << " exceeds the dense-series limit of "
            << kMaxDenseTotalOrder << "; coupled problems this large are not supported";
        throw SeriesSizeError(msg.str());
    }
    auto product = TruncatedSeries::constant(active_orders, SignedLogReal::from_log(0.0));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto arg = TruncatedSeries::constant(active_orders, SignedLogReal::from_double(u0(i)));
        bool touched = false;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const double w = r(active[a], i);
            if (w != 0.0) {
                arg = arg + TruncatedSeries::variable(active_orders, a, SignedLogReal::zero())
                                .scaled(SignedLogReal::from_double(w));
                touched = true;
            }
        }
        if (touched) {
            product = product * lift_mgf(priors[i], arg);
        } else {
            product = product.scaled(eval(priors[i], u0(i)));
        }
    }
    return {mixed_partial(product, active_orders), MarginalPath::DenseSeries};
}

/// Log of a derivative value that must be strictly positive.
inline double positive_log(SignedLogReal v, const char* what)
{
    if (v.sign() <= 0) {
        throw DomainError(std::string(what) + ": marginal likelihood is exactly zero for this input");
    }
    return v.log_magnitude();
}

inline double log_factorial(std::uint64_t y)
{
    return log_gamma(static_cast<double>(y) + 1.0);
}

inline void check_agreement(double log_a, double log_b, const char* what)
{
    const double rel = std::fabs(std::expm1(log_a - log_b));
    if (!(rel <= kFormAgreement)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": the two forms disagree (log values " << log_a << " and " << log_b << ", relative "
            << rel << ")";
        throw ConsistencyError(msg.str());
    }
}

inline std::vector<double> as_doubles(const std::vector<std::uint64_t>& y)
{
    return {y.begin(), y.end()};
}

}  // namespace detail

/// Independent priors, y_i ~ Poisson(theta_i).
inline MarginalResult poisson_hier(const PoissonProblem& p)
{
    const auto m = static_cast<Eigen::Index>(p.y.size());
    if (static_cast<Eigen::Index>(p.priors.size()) != m) {
        throw ShapeError("poisson_hier: one prior per observation required");
    }
    if (p.r && !p.r->isIdentity(0.0)) {
        throw ShapeError("poisson_hier: r must be the identity; use poisson_scaled");
    }
    if (p.zeta && !p.zeta->isOnes(0.0)) {
        throw ShapeError("poisson_hier: zeta must be all ones; use poisson_scaled");
    }
    double log_v = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        log_v += detail::positive_log(deriv_int(p.priors[i], static_cast<unsigned>(p.y[i]), -1.0), "poisson_hier") -
                 detail::log_factorial(p.y[i]);
    }
    return {log_v, +1, MarginalPath::ClosedForm, detail::as_doubles(p.y), std::nullopt};
}

/// Rates diag(zeta) r theta with general non-negative r.
inline MarginalResult poisson_scaled(const PoissonProblem& p)
{
    const auto m = static_cast<Eigen::Index>(p.y.size());
    const auto n = static_cast<Eigen::Index>(p.priors.size());
    const Eigen::MatrixXd r = detail::resolve_r(p.r, m, n);
    const Eigen::VectorXd zeta = detail::resolve_zeta(p.zeta, m);
    const auto random = std::count_if(p.priors.begin(), p.priors.end(),
                                      [](const PriorMgf& q) { return !q.is<PointMass>(); });
    if (random > m) {
        throw ShapeError("poisson_scaled: more random priors than observations");
    }
    std::vector<unsigned> orders(m);
    double log_pre = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        orders[j] = static_cast<unsigned>(p.y[j]);
        log_pre += p.y[j] * std::log(zeta(j)) - detail::log_factorial(p.y[j]);
    }
    const auto d = detail::linear_mixed_partial(p.priors, r, -zeta, orders);
    return {log_pre + detail::positive_log(d.value, "poisson_scaled"), +1, d.path, detail::as_doubles(p.y),
            std::nullopt};
}

/// n observations sharing one theta, each with rate zeta * theta.
/// Computes zeta^{sum y} M^{(sum y)}(-n zeta) and, independently, the
/// (sum y)-th derivative of t -> M(zeta t) at t = -n through a univariate
/// truncated series; throws ConsistencyError if they disagree.
inline MarginalResult poisson_single(const PriorMgf& prior, const std::vector<std::uint64_t>& y, double zeta)
{
    if (y.empty()) {
        throw ShapeError("poisson_single: no observations");
    }
    if (!(zeta > 0.0) || !std::isfinite(zeta)) {
        throw DomainError("poisson_single: zeta must be positive");
    }
    const double n = static_cast<double>(y.size());
    std::uint64_t total = 0;
    double log_pre = 0.0;
    for (auto v : y) {
        total += v;
        log_pre -= detail::log_factorial(v);
    }
    const auto k = static_cast<unsigned>(total);
    const double form1 =
        log_pre + static_cast<double>(total) * std::log(zeta) + detail::positive_log(deriv_int(prior, k, -n * zeta), "poisson_single");

    const auto scaled = scaled_prior(prior, zeta);
    const auto arg = TruncatedSeries::variable({k}, 0, SignedLogReal::from_double(-n));
    const double form2 = log_pre + mixed_partial(lift_mgf(scaled, arg), {k}).log_magnitude();
    detail::check_agreement(form1, form2, "poisson_single");
    return {form1, +1, MarginalPath::ClosedForm, {static_cast<double>(total)}, form2};
}

/// Gamma likelihood with diagonal r: one prior per observation.
inline MarginalResult gamma_hier(const GammaProblem& p)
{
    const Eigen::Index m = p.y.size();
    if (p.alpha.size() != m || static_cast<Eigen::Index>(p.priors.size()) != m) {
        throw ShapeError("gamma_hier: alpha, y and priors must have equal length");
    }
    const Eigen::MatrixXd r = detail::resolve_r(p.r, m, m);
    if (!detail::is_diagonal(r)) {
        throw ModelError("gamma_hier: r must be diagonal; use gamma_integer for coupled integer shapes");
    }
    const Eigen::VectorXd zeta = detail::resolve_zeta(p.zeta, m);
    double log_v = 0.0;
    bool fractional = false;
    std::vector<double> orders;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double a = p.alpha(j);
        const double y = p.y(j);
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw DomainError("gamma_hier: shapes must be positive");
        }
        if (!(y > 0.0) || !std::isfinite(y)) {
            throw DomainError("gamma_hier: observations must be positive");
        }
        const double scale = zeta(j) * r(j, j);
        if (!(scale > 0.0)) {
            throw DomainError("gamma_hier: zero rate for an observation");
        }
        const auto order = FracOrder::of(a);
        fractional = fractional || !order.is_integer();
        log_v += (a - 1.0) * std::log(y) + a * std::log(scale) - log_gamma(a) +
                 detail::positive_log(deriv_frac(p.priors[j], order, -scale * y), "gamma_hier");
        orders.push_back(a);
    }
    return {log_v, +1, fractional ? MarginalPath::MellinFrac : MarginalPath::ClosedForm, orders, std::nullopt};
}

/// n observations y_i ~ Gamma(alpha, rate r theta) sharing one theta.
/// Form one: r^{n alpha} (D^{n alpha} M)(-r sum y). Form two: the
/// (n alpha)-order derivative of t -> M(r t) at t = -sum y, through the
/// Mellin quadrature route for fractional orders or a univariate series for
/// integer orders. Throws ConsistencyError if they disagree.
inline MarginalResult gamma_single(const PriorMgf& prior, double alpha, const std::vector<double>& y, double r)
{
    if (y.empty()) {
        throw ShapeError("gamma_single: no observations");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("gamma_single: shape must be positive");
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw DomainError("gamma_single: r must be positive");
    }
    const double n = static_cast<double>(y.size());
    double sum_y = 0.0;
    double log_pre = -n * log_gamma(alpha);
    for (double v : y) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("gamma_single: observations must be positive");
        }
        sum_y += v;
        log_pre += (alpha - 1.0) * std::log(v);
    }
    const auto order = FracOrder::of(n * alpha);
    const double form1 =
        log_pre + n * alpha * std::log(r) + detail::positive_log(deriv_frac(prior, order, -r * sum_y), "gamma_single");

    const auto scaled = scaled_prior(prior, r);
    double form2 = 0.0;
    if (order.is_integer()) {
        const auto k = order.integer_part();
        const auto arg = TruncatedSeries::variable({k}, 0, SignedLogReal::from_double(-sum_y));
        form2 = log_pre + mixed_partial(lift_mgf(scaled, arg), {k}).log_magnitude();
    } else {
        form2 = log_pre + deriv_frac_mellin(scaled, order, -sum_y).log_magnitude();
    }
    detail::check_agreement(form1, form2, "gamma_single");
    return {form1, +1, order.is_integer() ? MarginalPath::ClosedForm : MarginalPath::MellinFrac, {n * alpha},
            form2};
}

/// Integer shapes with a general non-negative r.
inline MarginalResult gamma_integer(const GammaProblem& p)
{
    const Eigen::Index m = p.y.size();
    const auto n = static_cast<Eigen::Index>(p.priors.size());
    if (p.alpha.size() != m) {
        throw ShapeError("gamma_integer: alpha and y must have equal length");
    }
    const Eigen::MatrixXd r = detail::resolve_r(p.r, m, n);
    const Eigen::VectorXd zeta = detail::resolve_zeta(p.zeta, m);
    std::vector<unsigned> orders(m);
    Eigen::VectorXd t0(m);
    double log_pre = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double a = p.alpha(j);
        if (!(a >= 1.0) || a != std::floor(a) || a > 1e6) {
            std::ostringstream msg;
            msg << "gamma_integer: shape " << j << " must be a positive integer, got " << a;
            throw DomainError(msg.str());
        }
        const double y = p.y(j);
        if (!(y > 0.0) || !std::isfinite(y)) {
            throw DomainError("gamma_integer: observations must be positive");
        }
        orders[j] = static_cast<unsigned>(a);
        t0(j) = -y * zeta(j);
        log_pre += (a - 1.0) * std::log(y) + a * std::log(zeta(j)) - log_gamma(a);
    }
    const auto d = detail::linear_mixed_partial(p.priors, r, t0, orders);
    return {log_pre + detail::positive_log(d.value, "gamma_integer"), +1, d.path,
            {p.alpha.data(), p.alpha.data() + m}, std::nullopt};
}

}  // namespace mgfml

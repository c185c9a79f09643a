#pragma once

// Ground-truth computations that share no code path with the mgf
// derivatives: conjugate closed forms, Chib's identity, brute-force
// allocation sums, direct quadrature and Monte Carlo.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "mgfml/errors.hpp"
#include "mgfml/mgf.hpp"
#include "mgfml/quadrature.hpp"
#include "mgfml/random.hpp"
#include "mgfml/signed_log.hpp"
#include "mgfml/special_fn.hpp"

namespace mgfml::oracle {

/// NegBin(size, rate / (rate + time_offset)) mass at y: the Poisson(t theta)
/// marginal under theta ~ Gamma(size, rate).
inline SignedLogReal negbin_mixture(std::uint64_t y, double size, double rate, double time_offset)
{
    if (!(rate > 0.0) || !(time_offset > 0.0)) {
        throw DomainError("negbin_mixture: rate and time offset must be positive");
    }
    return SignedLogReal::from_log(log_negbin_pmf(y, size, rate / (rate + time_offset)));
}

/// Product of negbin_mixture over independent observations.
inline SignedLogReal negbin_product(const std::vector<std::uint64_t>& y, double size, double rate,
                                    const std::vector<double>& time_offsets)
{
    if (y.size() != time_offsets.size()) {
        throw ShapeError("negbin_product: y and offsets differ in length");
    }
    SignedLogReal out = SignedLogReal::from_log(0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        out *= negbin_mixture(y[i], size, rate, time_offsets[i]);
    }
    return out;
}

/// Chib's identity p(y) = p(lambda) p(y | lambda) / p(lambda | y) for
/// y_i ~ Poisson(lambda) iid, lambda ~ Gamma(a, b), with the conjugate
/// posterior Gamma(a + sum y, b + n). Exact for every eval_lambda > 0.
inline SignedLogReal chib_poisson_gamma(const std::vector<std::uint64_t>& y, double a, double b,
                                        double eval_lambda)
{
    if (!(eval_lambda > 0.0)) {
        throw DomainError("chib_poisson_gamma: eval_lambda must be positive");
    }
    const auto prior = PriorMgf::gamma(a, b);
    double sum_y = 0.0;
    double log_lik = 0.0;
    for (auto v : y) {
        sum_y += static_cast<double>(v);
        log_lik += log_poisson_pmf(v, eval_lambda);
    }
    const auto posterior = PriorMgf::gamma(a + sum_y, b + static_cast<double>(y.size()));
    return SignedLogReal::from_log(log_prior_density(prior, eval_lambda) + log_lik -
                                   log_prior_density(posterior, eval_lambda));
}

/// log prod t_i^{y_i} / y_i!, the data-dependent factor of the shared-rate
/// Poisson marginal.
inline double poisson_exposure_log_prefactor(const std::vector<std::uint64_t>& y, const std::vector<double>& t)
{
    if (y.size() != t.size()) {
        throw ShapeError("poisson_exposure_log_prefactor: y and t differ in length");
    }
    double out = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        out += static_cast<double>(y[i]) * std::log(t[i]) - log_gamma(static_cast<double>(y[i]) + 1.0);
    }
    return out;
}

/// Shared lambda ~ Pareto(alpha, k), y_i ~ Poisson(lambda t_i):
/// prefactor * alpha k^{S} E_{alpha+1-S}(k T), S = sum y, T = sum t.
inline SignedLogReal poisson_pareto_marginal(const std::vector<std::uint64_t>& y, const std::vector<double>& t,
                                             double alpha, double k)
{
    if (!(alpha > 0.0) || !(k > 0.0)) {
        throw DomainError("poisson_pareto_marginal: alpha and k must be positive");
    }
    double s = 0.0;
    double total_t = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += static_cast<double>(y[i]);
        total_t += t[i];
    }
    const auto e = exp_integral_E(alpha + 1.0 - s, k * total_t);
    return SignedLogReal::from_log(poisson_exposure_log_prefactor(y, t) + std::log(alpha) + s * std::log(k) +
                                   e.log_magnitude());
}

/// Same quantity by quadrature of
/// int_k^inf lambda^S e^{-lambda T} alpha k^alpha lambda^{-alpha-1} d lambda.
inline quad::LogResult poisson_pareto_marginal_quadrature(const std::vector<std::uint64_t>& y,
                                                          const std::vector<double>& t, double alpha, double k)
{
    if (!(alpha > 0.0) || !(k > 0.0)) {
        throw DomainError("poisson_pareto_marginal_quadrature: alpha and k must be positive");
    }
    double s = 0.0;
    double total_t = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += static_cast<double>(y[i]);
        total_t += t[i];
    }
    const double log_k = std::log(k);
    // lambda = k + e^u.
    auto log_f = [&](double u) {
        const double e = std::exp(u);
        const double log_lambda = log_k + std::log1p(e / k);
        return (s - alpha - 1.0) * log_lambda - (k + e) * total_t + u;
    };
    quad::Options opts;
    opts.rel_tol = 1e-12;
    auto r = quad::integrate_exp_line(log_f, opts);
    r.log_value += poisson_exposure_log_prefactor(y, t) + std::log(alpha) + alpha * log_k;
    return r;
}

/// Gamma likelihoods y_i ~ Gamma(alpha, zeta_i theta) sharing
/// theta ~ Gamma(gamma, nu):
/// Gamma(n alpha + gamma) / (Gamma(alpha)^n Gamma(gamma)) nu^gamma
///   prod zeta_i^alpha y_i^{alpha-1} / (nu + sum zeta_i y_i)^{n alpha + gamma}.
inline SignedLogReal compound_gamma(const std::vector<double>& y, double gamma, double nu, double alpha,
                                    const std::vector<double>& zeta)
{
    if (y.size() != zeta.size() || y.empty()) {
        throw ShapeError("compound_gamma: y and zeta must be non-empty and of equal length");
    }
    if (!(gamma > 0.0) || !(nu > 0.0) || !(alpha > 0.0)) {
        throw DomainError("compound_gamma: gamma, nu and alpha must be positive");
    }
    const double n = static_cast<double>(y.size());
    double weighted = 0.0;
    double out = log_gamma(n * alpha + gamma) - n * log_gamma(alpha) - log_gamma(gamma) + gamma * std::log(nu);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !(zeta[i] > 0.0)) {
            throw DomainError("compound_gamma: y and zeta must be positive");
        }
        out += alpha * std::log(zeta[i]) + (alpha - 1.0) * std::log(y[i]);
        weighted += zeta[i] * y[i];
    }
    out -= (n * alpha + gamma) * std::log(nu + weighted);
    return SignedLogReal::from_log(out);
}

/// Independent groups, each sharing theta_g ~ Gamma(xi + 1, xi); group[j]
/// names the group of observation j. Groups must have equal sizes.
inline SignedLogReal multi_group_compound_gamma(const std::vector<double>& y, const std::vector<std::size_t>& group,
                                                double xi, double alpha, const std::vector<double>& zeta)
{
    if (y.size() != group.size() || y.size() != zeta.size()) {
        throw ShapeError("multi_group_compound_gamma: y, group and zeta differ in length");
    }
    const std::size_t n_groups = group.empty() ? 0 : *std::max_element(group.begin(), group.end()) + 1;
    std::vector<std::vector<double>> gy(n_groups);
    std::vector<std::vector<double>> gz(n_groups);
    for (std::size_t j = 0; j < y.size(); ++j) {
        gy[group[j]].push_back(y[j]);
        gz[group[j]].push_back(zeta[j]);
    }
    for (const auto& g : gy) {
        if (g.size() != gy.front().size()) {
            throw ShapeError("multi_group_compound_gamma: groups must have equal sizes");
        }
    }
    SignedLogReal out = SignedLogReal::from_log(0.0);
    for (std::size_t g = 0; g < n_groups; ++g) {
        out *= compound_gamma(gy[g], xi + 1.0, xi, alpha, gz[g]);
    }
    return out;
}

/// Poisson counts with rates A theta and theta_i ~ Gamma(shape_i, rate_i),
/// by summing over every split of each count y_j into per-source counts
/// z_ji: each source contributes
///   Gamma(a_i + N_i) / Gamma(a_i) * b_i^{a_i} / (b_i + s_i)^{a_i + N_i},
/// with N_i its total allocated count and s_i the column sum of A.
inline SignedLogReal poisson_gamma_allocation_sum(const Eigen::MatrixXd& a, const std::vector<GammaPrior>& priors,
                                                  const std::vector<std::uint64_t>& y)
{
    const auto m = a.rows();
    const auto n = a.cols();
    if (static_cast<Eigen::Index>(y.size()) != m || static_cast<Eigen::Index>(priors.size()) != n) {
        throw ShapeError("poisson_gamma_allocation_sum: inconsistent dimensions");
    }
    const Eigen::VectorXd s = a.colwise().sum().transpose();
    std::vector<std::uint64_t> totals(n, 0);
    SignedLogReal acc;

    // Cells (j, i) with A_ji > 0, in row-major order.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    for (Eigen::Index j = 0; j < m; ++j) {
        bool any = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (a(j, i) > 0.0) {
                cells.emplace_back(j, i);
                any = true;
            }
        }
        if (!any && y[j] > 0) {
            return SignedLogReal::zero();
        }
    }
    std::vector<std::uint64_t> remaining(y.begin(), y.end());

    std::function<void(std::size_t, double)> recurse = [&](std::size_t c, double log_w) {
        if (c == cells.size()) {
            for (Eigen::Index j = 0; j < m; ++j) {
                if (remaining[j] != 0) {
                    return;
                }
            }
            double v = log_w;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double ai = priors[i].shape;
                const double bi = priors[i].rate;
                const double ni = static_cast<double>(totals[i]);
                v += log_gamma(ai + ni) - log_gamma(ai) + ai * std::log(bi) - (ai + ni) * std::log(bi + s(i));
            }
            acc += SignedLogReal::from_log(v);
            return;
        }
        const auto [j, i] = cells[c];
        const bool last_in_row = c + 1 == cells.size() || cells[c + 1].first != j;
        const std::uint64_t lo = last_in_row ? remaining[j] : 0;
        for (std::uint64_t z = lo; z <= remaining[j]; ++z) {
            const double zd = static_cast<double>(z);
            remaining[j] -= z;
            totals[i] += z;
            recurse(c + 1, log_w + zd * std::log(a(j, i)) - log_gamma(zd + 1.0));
            totals[i] -= z;
            remaining[j] += z;
        }
    };
    recurse(0, 0.0);
    return acc;
}

enum class Likelihood { Poisson, Gamma };

/// Model for the brute-force quadrature oracle: rates diag(zeta) r theta,
/// at most two non-degenerate priors (point masses stay fixed).
struct QuadratureModel {
    Likelihood likelihood = Likelihood::Poisson;
    std::vector<PriorMgf> priors;
    Eigen::MatrixXd r;
    Eigen::VectorXd zeta;
    Eigen::VectorXd y;
    /// Gamma shapes; ignored for Poisson.
    Eigen::VectorXd alpha;
};

namespace detail {

inline double log_likelihood(const QuadratureModel& q, const Eigen::VectorXd& theta)
{
    const Eigen::VectorXd rate = q.zeta.cwiseProduct(q.r * theta);
    double out = 0.0;
    for (Eigen::Index j = 0; j < rate.size(); ++j) {
        const double lam = rate(j);
        const double y = q.y(j);
        if (q.likelihood == Likelihood::Poisson) {
            if (lam == 0.0) {
                if (y != 0.0) {
                    return -std::numeric_limits<double>::infinity();
                }
                continue;
            }
            out += y * std::log(lam) - lam - log_gamma(y + 1.0);
        } else {
            if (!(lam > 0.0)) {
                return -std::numeric_limits<double>::infinity();
            }
            const double a = q.alpha(j);
            out += a * std::log(lam) + (a - 1.0) * std::log(y) - lam * y - log_gamma(a);
        }
    }
    return out;
}

}  // namespace detail

/// log p(y) by adaptive quadrature over the free coordinates of theta,
/// each mapped as theta_i = lower_i + e^u. Nested one-dimensional log-line
/// integrations for two free coordinates; the reported relative error adds
/// the outer estimate to the worst inner one.
inline quad::LogResult quadrature_marginal(const QuadratureModel& q, double rel_tol = 1e-11)
{
    const auto n = static_cast<Eigen::Index>(q.priors.size());
    const auto m = q.y.size();
    if (q.r.rows() != m || q.r.cols() != n || q.zeta.size() != m ||
        (q.likelihood == Likelihood::Gamma && q.alpha.size() != m)) {
        throw ShapeError("quadrature_marginal: inconsistent dimensions");
    }
    std::vector<Eigen::Index> free;
    Eigen::VectorXd theta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (q.priors[i].is<PointMass>()) {
            theta(i) = std::get<PointMass>(q.priors[i].family()).location;
        } else {
            free.push_back(i);
        }
    }
    if (free.size() > 2) {
        throw ShapeError("quadrature_marginal: at most two non-degenerate priors");
    }
    quad::Options opts;
    opts.rel_tol = rel_tol;
    auto coord = [&](Eigen::Index i, double u) {
        const double lower = support_lower(q.priors[i]);
        const double e = std::exp(u);
        theta(i) = lower + e;
        if (!std::isfinite(theta(i))) {
            return -std::numeric_limits<double>::infinity();
        }
        return log_prior_density(q.priors[i], theta(i)) + u;
    };
    if (free.empty()) {
        return {detail::log_likelihood(q, theta), 0.0, 1};
    }
    if (free.size() == 1) {
        auto f = [&](double u) {
            const double head = coord(free[0], u);
            return head == -std::numeric_limits<double>::infinity() ? head : head + detail::log_likelihood(q, theta);
        };
        return quad::integrate_exp_line(f, opts);
    }
    // Inner results must be smooth in u1 well below the outer tolerance.
    quad::Options inner_opts;
    inner_opts.rel_tol = std::max(1e-13, 1e-3 * rel_tol);
    // (log outer integrand, inner relative error) per outer evaluation.
    std::vector<std::pair<double, double>> inner_errors;
    std::size_t evaluations = 0;
    auto outer = [&](double u1) {
        const double head = coord(free[0], u1);
        if (head == -std::numeric_limits<double>::infinity()) {
            return head;
        }
        auto inner = [&](double u2) {
            const double h2 = coord(free[1], u2);
            return h2 == -std::numeric_limits<double>::infinity() ? h2 : h2 + detail::log_likelihood(q, theta);
        };
        const auto r = quad::integrate_exp_line(inner, inner_opts);
        evaluations += r.evaluations;
        inner_errors.emplace_back(head + r.log_value, r.rel_error);
        return head + r.log_value;
    };
    auto r = quad::integrate_exp_line(outer, opts);
    // Inner errors only matter where the outer integrand carries weight.
    double worst_inner = 0.0;
    for (const auto& [log_f, err] : inner_errors) {
        if (log_f > r.log_value - 40.0) {
            worst_inner = std::max(worst_inner, err);
        }
    }
    r.rel_error += worst_inner;
    r.evaluations += evaluations;
    return r;
}

/// Draw from a prior.
template <class Urbg>
double sample_prior(const PriorMgf& m, Urbg& g)
{
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaPrior>) {
                return std::gamma_distribution<double>(f.shape, 1.0 / f.rate)(g);
            } else if constexpr (std::is_same_v<T, ExponentialPrior>) {
                return std::exponential_distribution<double>(f.rate)(g);
            } else if constexpr (std::is_same_v<T, ParetoPrior>) {
                const double u = std::min(std::generate_canonical<double, 53>(g), std::nextafter(1.0, 0.0));
                return f.scale * std::pow(1.0 - u, -1.0 / f.tail);
            } else {
                return f.location;
            }
        },
        m.family());
}

struct BinomialInterval {
    std::uint64_t low;
    std::uint64_t high;
};

/// Equal-tailed interval of Binomial(n, p): low is the smallest k with
/// P(X <= k) >= (1-level)/2, high the smallest k with
/// P(X <= k) >= 1 - (1-level)/2. Computed from the exact CDF.
inline BinomialInterval binomial_central_interval(std::uint64_t n, double p, double level = 0.95)
{
    if (!(p >= 0.0 && p <= 1.0) || !(level > 0.0 && level < 1.0)) {
        throw DomainError("binomial_central_interval: need p in [0, 1] and level in (0, 1)");
    }
    if (p == 0.0) {
        return {0, 0};
    }
    if (p == 1.0) {
        return {n, n};
    }
    const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
    const double tail = 0.5 * (1.0 - level);
    auto smallest_reaching = [&](double q) {
        const double mean = static_cast<double>(n) * p;
        const double sd = std::sqrt(mean * (1.0 - p));
        auto k = static_cast<std::int64_t>(std::max(0.0, std::floor(mean + (q < 0.5 ? -3.0 : 3.0) * sd)));
        const auto nn = static_cast<std::int64_t>(n);
        while (k > 0 && boost::math::cdf(dist, static_cast<double>(k - 1)) >= q) {
            --k;
        }
        while (k < nn && boost::math::cdf(dist, static_cast<double>(k)) < q) {
            ++k;
        }
        return static_cast<std::uint64_t>(k);
    };
    return {smallest_reaching(tail), smallest_reaching(1.0 - tail)};
}

struct McReport {
    std::uint64_t n_iter = 0;
    std::uint64_t hits = 0;
    double p0 = 0.0;
    std::uint64_t ci_low = 0;
    std::uint64_t ci_high = 0;
    bool pass = false;
};

/// Simulates theta_i ~ priors[i], counts ~ Poisson(A theta), and counts the
/// iterations reproducing y_target exactly; passes when the hit count lies
/// in the central 95% Binomial(n_iter, p0) interval. Iteration i draws from
/// PhiloxStream(seed, i) only, so the hit count is independent of `threads`.
inline McReport mc_overlap_check(const Eigen::MatrixXd& a, const std::vector<PriorMgf>& priors,
                                 const std::vector<std::uint64_t>& y_target, std::uint64_t n_iter,
                                 std::uint64_t seed, double p0, unsigned threads = 0)
{
    const auto m = a.rows();
    const auto n = a.cols();
    if (static_cast<Eigen::Index>(priors.size()) != n || static_cast<Eigen::Index>(y_target.size()) != m) {
        throw ShapeError("mc_overlap_check: inconsistent dimensions");
    }
    if (n_iter == 0) {
        throw DomainError("mc_overlap_check: n_iter must be positive");
    }
    if (threads == 0) {
        threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    }
    auto run = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t hits = 0;
        std::vector<double> theta(n);
        for (std::uint64_t it = begin; it < end; ++it) {
            PhiloxStream g(seed, it);
            for (Eigen::Index i = 0; i < n; ++i) {
                theta[i] = sample_prior(priors[i], g);
            }
            bool match = true;
            for (Eigen::Index j = 0; j < m && match; ++j) {
                double rate = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    rate += a(j, i) * theta[i];
                }
                const auto count = rate > 0.0 ? std::poisson_distribution<std::uint64_t>(rate)(g) : 0;
                match = count == y_target[j];
            }
            hits += match ? 1 : 0;
        }
        return hits;
    };
    std::vector<std::uint64_t> partial(threads, 0);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n_iter + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::uint64_t begin = std::min(n_iter, w * chunk);
        const std::uint64_t end = std::min(n_iter, begin + chunk);
        pool.emplace_back([&, w, begin, end] { partial[w] = run(begin, end); });
    }
    for (auto& t : pool) {
        t.join();
    }
    McReport rep;
    rep.n_iter = n_iter;
    rep.p0 = p0;
    for (auto h : partial) {
        rep.hits += h;
    }
    const auto ci = binomial_central_interval(n_iter, p0);
    rep.ci_low = ci.low;
    rep.ci_high = ci.high;
    rep.pass = rep.ci_low <= rep.hits && rep.hits <= rep.ci_high;
    return rep;
}

}  // namespace mgfml::oracle

#pragma once

// Prior moment-generating functions M(t) = E[e^{t theta}] and their
// derivatives. The k-th derivative is E[theta^k e^{t theta}]; fractional
// orders use the Riemann-Liouville operator with lower limit -inf, the only
// fractional derivative that maps e^{t theta} to theta^alpha e^{t theta}.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "mgfml/errors.hpp"
#include "mgfml/quadrature.hpp"
#include "mgfml/signed_log.hpp"
#include "mgfml/special_fn.hpp"

namespace mgfml {

struct GammaPrior {
    double shape;
    double rate;
};
struct ExponentialPrior {
    double rate;
};
/// Pareto with tail index `tail` and minimum `scale`: density
/// tail * scale^tail / x^(tail+1) on [scale, inf).
struct ParetoPrior {
    double tail;
    double scale;
};
/// Degenerate prior at `location` >= 0; turns fixed offsets into factors of
/// a purely linear rate structure.
struct PointMass {
    double location;
};

using PriorFamily = std::variant<GammaPrior, ExponentialPrior, ParetoPrior, PointMass>;

/// Immutable prior with a validated family.
class PriorMgf {
public:
    static PriorMgf gamma(double shape, double rate)
    {
        require_positive(shape, "GammaPrior shape");
        require_positive(rate, "GammaPrior rate");
        return PriorMgf(GammaPrior{shape, rate});
    }
    static PriorMgf exponential(double rate)
    {
        require_positive(rate, "ExponentialPrior rate");
        return PriorMgf(ExponentialPrior{rate});
    }
    static PriorMgf pareto(double tail, double scale)
    {
        require_positive(tail, "ParetoPrior tail");
        require_positive(scale, "ParetoPrior scale");
        return PriorMgf(ParetoPrior{tail, scale});
    }
    static PriorMgf point_mass(double location)
    {
        if (!(location >= 0.0) || !std::isfinite(location)) {
            throw DomainError("PointMass location must be finite and non-negative");
        }
        return PriorMgf(PointMass{location});
    }

    [[nodiscard]] const PriorFamily& family() const { return family_; }

    template <class T>
    [[nodiscard]] bool is() const
    {
        return std::holds_alternative<T>(family_);
    }

    /// Supremum of the mgf domain (+inf for a point mass).
    [[nodiscard]] double domain_upper() const
    {
        return std::visit(
            [](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, GammaPrior>) {
                    return f.rate;
                } else if constexpr (std::is_same_v<T, ExponentialPrior>) {
                    return f.rate;
                } else if constexpr (std::is_same_v<T, ParetoPrior>) {
                    return 0.0;
                } else {
                    return std::numeric_limits<double>::infinity();
                }
            },
            family_);
    }

    /// Pareto's mgf is finite at its endpoint 0; gamma-type mgfs blow up at
    /// theirs, which is excluded.
    [[nodiscard]] bool in_domain(double t) const
    {
        if (std::isnan(t)) {
            return false;
        }
        return is<ParetoPrior>() ? t <= 0.0 : t < domain_upper();
    }

    [[nodiscard]] std::string describe() const
    {
        std::ostringstream os;
        std::visit(
            [&](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, GammaPrior>) {
                    os << "Gamma(" << f.shape << ", " << f.rate << ")";
                } else if constexpr (std::is_same_v<T, ExponentialPrior>) {
                    os << "Exponential(" << f.rate << ")";
                } else if constexpr (std::is_same_v<T, ParetoPrior>) {
                    os << "Pareto(" << f.tail << ", " << f.scale << ")";
                } else {
                    os << "PointMass(" << f.location << ")";
                }
            },
            family_);
        return os.str();
    }

private:
    explicit PriorMgf(PriorFamily f) : family_(f) {}

    static void require_positive(double v, const char* what)
    {
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream msg;
            msg << what << " must be positive and finite, got " << v;
            throw DomainError(msg.str());
        }
    }

    PriorFamily family_;
};

/// Order of a Riemann-Liouville derivative split as
/// total = integer_part - gamma_frac, integer_part = ceil(total),
/// gamma_frac in [0, 1). The derivative is the integer_part-th derivative of
/// the gamma_frac-order fractional integral.
class FracOrder {
public:
    static FracOrder of(double total)
    {
        if (!(total >= 0.0) || !std::isfinite(total)) {
            std::ostringstream msg;
            msg << "FracOrder: order must be finite and non-negative, got " << total;
            throw DomainError(msg.str());
        }
        const double nearest = std::round(total);
        if (std::fabs(total - nearest) <= 1e-12 * std::max(1.0, total)) {
            return FracOrder(nearest, static_cast<unsigned>(nearest), 0.0);
        }
        const double ip = std::ceil(total);
        return FracOrder(total, static_cast<unsigned>(ip), ip - total);
    }
    static FracOrder integer(unsigned n) { return FracOrder(n, n, 0.0); }

    [[nodiscard]] double total() const { return total_; }
    [[nodiscard]] unsigned integer_part() const { return integer_part_; }
    [[nodiscard]] double gamma_frac() const { return gamma_frac_; }
    [[nodiscard]] bool is_integer() const { return gamma_frac_ == 0.0; }

private:
    FracOrder(double total, unsigned ip, double g) : total_(total), integer_part_(ip), gamma_frac_(g) {}

    double total_;
    unsigned integer_part_;
    double gamma_frac_;
};

namespace detail {

inline void check_domain(const PriorMgf& m, double t, const char* op)
{
    if (!m.in_domain(t)) {
        std::ostringstream msg;
        msg << op << ": t = " << t << " outside the mgf domain of " << m.describe()
            << (m.is<ParetoPrior>() ? " (requires t <= 0)" : " (requires t < ")
            << (m.is<ParetoPrior>() ? "" : std::to_string(m.domain_upper()) + ")");
        throw DomainError(msg.str());
    }
}

/// Gamma(shape, rate) mgf derivative of real order `order` >= 0:
/// Gamma(shape+order)/Gamma(shape) * rate^shape / (rate - t)^(shape+order).
/// Integer orders are the ordinary derivatives; non-integer orders are the
/// RL derivative with lower limit -inf.
inline SignedLogReal gamma_kernel_derivative(double shape, double rate, double order, double t)
{
    const double log_val = log_gamma(shape + order) - log_gamma(shape) + shape * std::log(rate) -
                           (shape + order) * std::log(rate - t);
    return SignedLogReal::from_log(log_val);
}

}  // namespace detail

/// M(t).
inline SignedLogReal eval(const PriorMgf& m, double t);

/// k-th derivative of M at t.
inline SignedLogReal deriv_int(const PriorMgf& m, unsigned k, double t)
{
    detail::check_domain(m, t, "deriv_int");
    return std::visit(
        [&](const auto& f) -> SignedLogReal {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaPrior>) {
                return detail::gamma_kernel_derivative(f.shape, f.rate, k, t);
            } else if constexpr (std::is_same_v<T, ExponentialPrior>) {
                return detail::gamma_kernel_derivative(1.0, f.rate, k, t);
            } else if constexpr (std::is_same_v<T, ParetoPrior>) {
                // d^k/dt^k alpha E_{alpha+1}(-c t) = c^k alpha E_{alpha+1-k}(-c t).
                const double log_scale = k * std::log(f.scale) + std::log(f.tail);
                if (t == 0.0) {
                    // E_nu(0) = 1/(nu - 1) for nu > 1.
                    const double nu = f.tail + 1.0 - k;
                    if (!(nu > 1.0)) {
                        std::ostringstream msg;
                        msg << "deriv_int: derivative " << k << " of " << PriorMgf::pareto(f.tail, f.scale).describe()
                            << " diverges at t = 0 (needs tail > " << k << ")";
                        throw DivergenceError(msg.str());
                    }
                    return SignedLogReal::from_log(log_scale - std::log(nu - 1.0));
                }
                const auto e = exp_integral_E(f.tail + 1.0 - k, -f.scale * t);
                return SignedLogReal::from_log(log_scale + e.log_magnitude());
            } else {
                if (k == 0) {
                    return SignedLogReal::from_log(f.location * t);
                }
                if (f.location == 0.0) {
                    return SignedLogReal::zero();
                }
                return SignedLogReal::from_log(k * std::log(f.location) + f.location * t);
            }
        },
        m.family());
}

inline SignedLogReal eval(const PriorMgf& m, double t)
{
    return deriv_int(m, 0, t);
}

/// Which computation produced a fractional derivative.
enum class FracRoute {
    IntegerOrder,  ///< gamma_frac == 0: delegated to deriv_int unchanged
    ClosedForm,    ///< family closed form of the RL derivative
};

inline FracRoute deriv_frac_route(const PriorMgf& m, const FracOrder& order)
{
    if (order.is_integer()) {
        return FracRoute::IntegerOrder;
    }
    if (m.is<ParetoPrior>()) {
        throw UnsupportedFractional("deriv_frac: no fractional derivative route for " + m.describe());
    }
    return FracRoute::ClosedForm;
}

/// RL derivative D^{order}_{(-inf)+} M evaluated at t.
///
/// Gamma and exponential priors have the closed form of
/// detail::gamma_kernel_derivative; a point mass at c gives c^order e^{ct}.
/// Pareto priors support integer orders only.
inline SignedLogReal deriv_frac(const PriorMgf& m, const FracOrder& order, double t)
{
    if (deriv_frac_route(m, order) == FracRoute::IntegerOrder) {
        return deriv_int(m, order.integer_part(), t);
    }
    detail::check_domain(m, t, "deriv_frac");
    return std::visit(
        [&](const auto& f) -> SignedLogReal {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaPrior>) {
                return detail::gamma_kernel_derivative(f.shape, f.rate, order.total(), t);
            } else if constexpr (std::is_same_v<T, ExponentialPrior>) {
                return detail::gamma_kernel_derivative(1.0, f.rate, order.total(), t);
            } else if constexpr (std::is_same_v<T, PointMass>) {
                if (f.location == 0.0) {
                    return SignedLogReal::zero();
                }
                return SignedLogReal::from_log(order.total() * std::log(f.location) + f.location * t);
            } else {
                throw UnsupportedFractional("deriv_frac: unreachable");
            }
        },
        m.family());
}

// ---------------------------------------------------------------------------
// Mellin route
// ---------------------------------------------------------------------------

/// Mellin-form fractional integral of the n-th mgf derivative:
///   int_0^inf l^{gamma-1} M^{(n)}(t - l) dl,
/// which is Gamma(gamma) times the gamma-order RL integral of M^{(n)} with
/// lower limit -inf. For n = 0 and an exponential prior this is
/// lambda * pi / sqrt(lambda - t) at gamma = 1/2.
inline SignedLogReal mellin_integral(const PriorMgf& m, double gamma, unsigned n, double t)
{
    if (!(gamma > 0.0)) {
        throw DomainError("mellin_integral: gamma must be positive");
    }
    detail::check_domain(m, t, "mellin_integral");
    if (m.is<PointMass>()) {
        // Degenerate integrand: closed form c^{n-gamma} Gamma(gamma) e^{ct}.
        const double c = std::get<PointMass>(m.family()).location;
        if (c == 0.0) {
            throw DivergenceError("mellin_integral: diverges for a point mass at 0");
        }
        return SignedLogReal::from_log((n - gamma) * std::log(c) + log_gamma(gamma) + c * t);
    }
    auto log_g = [&](double l) {
        const auto d = deriv_int(m, n, t - l);
        return d.is_zero() ? -std::numeric_limits<double>::infinity() : d.log_magnitude();
    };
    quad::Options opts;
    opts.rel_tol = 1e-12;
    // On (0, 1] substitute l = s^{1/gamma}, which absorbs the l^{gamma-1}
    // singularity: int_0^1 l^{gamma-1} g(l) dl = (1/gamma) int_0^1 g(s^{1/gamma}) ds.
    // Small gamma would otherwise leave a tail decaying only like e^{gamma u}.
    const double log_g0 = log_g(0.0);
    const auto near = quad::integrate(
        [&](double s) { return s <= 0.0 ? 1.0 : std::exp(log_g(std::pow(s, 1.0 / gamma)) - log_g0); }, 0.0, 1.0, opts);
    const auto head = SignedLogReal::from_log(log_g0 - std::log(gamma) + std::log(near.value));
    // On (1, inf) take l = 1 + e^u.
    auto log_tail = [&](double u) {
        const double l = 1.0 + std::exp(u);
        if (!std::isfinite(l)) {
            return -std::numeric_limits<double>::infinity();
        }
        return (gamma - 1.0) * std::log(l) + u + log_g(l);
    };
    const auto tail = quad::integrate_exp_line(log_tail, opts);
    return head + SignedLogReal::from_log(tail.log_value);
}

/// How the Mellin route obtains the integer_part derivatives in t.
enum class MellinDifferentiation {
    /// Differentiate under the integral sign with the family's closed-form
    /// integer derivatives.
    UnderIntegral,
    /// Richardson-extrapolated central differences of the Mellin integral
    /// of M itself. At most two differences: beyond that cancellation
    /// destroys every digit.
    Richardson,
};

/// RL derivative through the Mellin form of the fractional integral:
///   D^alpha M(t) = (1/Gamma(gamma)) d^n/dt^n int_0^inf l^{gamma-1} M(t-l) dl
/// with n = integer_part, gamma = gamma_frac. Integer orders are written as
/// n + 1 derivatives of a first-order integral (gamma = 1) so the route is
/// exercised for every order. Independent of the closed forms in
/// deriv_frac; used to verify them.
inline SignedLogReal deriv_frac_mellin(const PriorMgf& m, const FracOrder& order, double t,
                                       MellinDifferentiation how = MellinDifferentiation::UnderIntegral)
{
    if (m.is<ParetoPrior>()) {
        throw UnsupportedFractional("deriv_frac_mellin: no Mellin route for " + m.describe());
    }
    detail::check_domain(m, t, "deriv_frac_mellin");
    unsigned n = order.integer_part();
    double gamma = order.gamma_frac();
    if (order.is_integer()) {
        n += 1;
        gamma = 1.0;
    }
    const double log_norm = -log_gamma(gamma);
    if (how == MellinDifferentiation::UnderIntegral) {
        const auto v = mellin_integral(m, gamma, n, t);
        return SignedLogReal::from_log(v.log_magnitude() + log_norm);
    }

    if (n > 2) {
        throw DomainError("deriv_frac_mellin: Richardson differences limited to two derivatives");
    }
    const double h0 = std::max(1e-3, 1e-3 * std::fabs(t));
    if (!m.in_domain(t + 0.5 * n * h0) || !(t + 0.5 * n * h0 < m.domain_upper())) {
        throw DomainError("deriv_frac_mellin: difference stencil leaves the mgf domain");
    }
    auto central = [&](double h) {
        // n-th central difference with nodes t + (n/2 - k) h.
        static constexpr std::array<std::array<double, 3>, 3> binom = {{{1, 0, 0}, {1, 1, 0}, {1, 2, 1}}};
        double acc = 0.0;
        for (unsigned k = 0; k <= n; ++k) {
            const double x = t + (0.5 * n - k) * h;
            const double v = mellin_integral(m, gamma, 0, x).to_double();
            acc += ((k % 2) ? -1.0 : 1.0) * binom[n][k] * v;
        }
        return acc / std::pow(h, n);
    };
    // Three-level Richardson table on h, h/2, h/4 (error series in h^2).
    double d0 = central(h0);
    double d1 = central(h0 / 2);
    double d2 = central(h0 / 4);
    double e1 = (4 * d1 - d0) / 3;
    double e2 = (4 * d2 - d1) / 3;
    double best = (16 * e2 - e1) / 15;
    if (!(best > 0.0)) {
        throw QuadratureError("deriv_frac_mellin: Richardson estimate is not positive");
    }
    return SignedLogReal::from_log(std::log(best) + log_norm);
}

/// Log density of the prior at theta (-inf outside the support). Point
/// masses have no density; callers treat them as fixed values.
inline double log_prior_density(const PriorMgf& m, double theta)
{
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaPrior>) {
                if (!(theta > 0.0)) {
                    return neg_inf;
                }
                return f.shape * std::log(f.rate) - log_gamma(f.shape) + (f.shape - 1.0) * std::log(theta) -
                       f.rate * theta;
            } else if constexpr (std::is_same_v<T, ExponentialPrior>) {
                return theta >= 0.0 ? std::log(f.rate) - f.rate * theta : neg_inf;
            } else if constexpr (std::is_same_v<T, ParetoPrior>) {
                if (theta < f.scale) {
                    return neg_inf;
                }
                return std::log(f.tail) + f.tail * std::log(f.scale) - (f.tail + 1.0) * std::log(theta);
            } else {
                throw DomainError("log_prior_density: a point mass has no density");
            }
        },
        m.family());
}

/// Prior of c * theta for c > 0, i.e. the mgf t -> M(c t).
inline PriorMgf scaled_prior(const PriorMgf& m, double c)
{
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw DomainError("scaled_prior: scale must be positive and finite");
    }
    return std::visit(
        [&](const auto& f) -> PriorMgf {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaPrior>) {
                return PriorMgf::gamma(f.shape, f.rate / c);
            } else if constexpr (std::is_same_v<T, ExponentialPrior>) {
                return PriorMgf::exponential(f.rate / c);
            } else if constexpr (std::is_same_v<T, ParetoPrior>) {
                return PriorMgf::pareto(f.tail, f.scale * c);
            } else {
                return PriorMgf::point_mass(f.location * c);
            }
        },
        m.family());
}

/// Lower end of the prior support.
inline double support_lower(const PriorMgf& m)
{
    if (m.is<ParetoPrior>()) {
        return std::get<ParetoPrior>(m.family()).scale;
    }
    if (m.is<PointMass>()) {
        return std::get<PointMass>(m.family()).location;
    }
    return 0.0;
}

}  // namespace mgfml

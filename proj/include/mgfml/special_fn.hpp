#pragma once

// Special functions behind the mgf derivatives and the verification oracles.
// Everything that can leave the double range is returned as SignedLogReal.

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "mgfml/errors.hpp"
#include "mgfml/quadrature.hpp"
#include "mgfml/signed_log.hpp"

namespace mgfml {

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "log_gamma: argument must be positive and finite, got " << x;
        throw DomainError(msg.str());
    }
    return boost::math::lgamma(x);
}

namespace detail {

inline quad::Options special_fn_quadrature()
{
    quad::Options o;
    o.rel_tol = 1e-13;
    return o;
}

}  // namespace detail

/// Upper incomplete gamma function Gamma(s, z) = int_z^inf t^{s-1} e^{-t} dt.
///
/// Any real s is accepted for z > 0; z = 0 is the complete gamma function
/// and requires s > 0. The defining integral is evaluated directly in log
/// space (t = z + e^u), which stays stable for large |s| and large z where
/// recurrences lose digits.
inline SignedLogReal upper_incomplete_gamma(double s, double z)
{
    if (!std::isfinite(s) || !std::isfinite(z) || z < 0.0) {
        std::ostringstream msg;
        msg << "upper_incomplete_gamma: need finite s and z >= 0, got (" << s << ", " << z << ")";
        throw DomainError(msg.str());
    }
    if (z == 0.0) {
        if (s <= 0.0) {
            throw DivergenceError("upper_incomplete_gamma: Gamma(s, 0) diverges for s <= 0");
        }
        return SignedLogReal::from_log(log_gamma(s));
    }
    if (s == 1.0) {
        return SignedLogReal::from_log(-z);
    }
    const double log_z = std::log(z);
    // t = z + e^u, dt = e^u du; ln t = ln z + log1p(e^u / z).
    auto log_integrand = [&](double u) {
        const double e = std::exp(u);
        return (s - 1.0) * (log_z + std::log1p(e / z)) - z - e + u;
    };
    const auto r = quad::integrate_exp_line(log_integrand, detail::special_fn_quadrature());
    return SignedLogReal::from_log(r.log_value);
}

/// Generalized exponential integral E_nu(z) = z^{nu-1} Gamma(1-nu, z), z > 0.
inline SignedLogReal exp_integral_E(double nu, double z)
{
    if (!(z > 0.0) || !std::isfinite(z) || !std::isfinite(nu)) {
        std::ostringstream msg;
        msg << "exp_integral_E: need z > 0, got (" << nu << ", " << z << ")";
        throw DomainError(msg.str());
    }
    if (nu == 0.0) {
        return SignedLogReal::from_log(-z - std::log(z));
    }
    const auto g = upper_incomplete_gamma(1.0 - nu, z);
    return SignedLogReal::from_log((nu - 1.0) * std::log(z) + g.log_magnitude());
}

/// E_nu(z) from its integral representation int_1^inf e^{-zt} t^{-nu} dt.
/// Independent of the incomplete-gamma route; used to cross-check it.
inline SignedLogReal exp_integral_E_direct(double nu, double z)
{
    if (!(z > 0.0) || !std::isfinite(z) || !std::isfinite(nu)) {
        throw DomainError("exp_integral_E_direct: need z > 0");
    }
    // t = 1 + e^u.
    auto log_integrand = [&](double u) {
        const double e = std::exp(u);
        return -z * (1.0 + e) - nu * std::log1p(e) + u;
    };
    const auto r = quad::integrate_exp_line(log_integrand, detail::special_fn_quadrature());
    return SignedLogReal::from_log(r.log_value);
}

inline double log_poisson_pmf(std::uint64_t y, double rate)
{
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw DomainError("log_poisson_pmf: rate must be positive");
    }
    const double yd = static_cast<double>(y);
    return yd * std::log(rate) - rate - log_gamma(yd + 1.0);
}

/// Negative binomial with `size` successes and success probability `prob`:
/// Gamma(y+size)/(Gamma(size) y!) prob^size (1-prob)^y.
inline double log_negbin_pmf(std::uint64_t y, double size, double prob)
{
    if (!(size > 0.0) || !std::isfinite(size)) {
        throw DomainError("log_negbin_pmf: size must be positive");
    }
    if (!(prob > 0.0 && prob < 1.0)) {
        throw DomainError("log_negbin_pmf: prob must lie in (0, 1)");
    }
    const double yd = static_cast<double>(y);
    double out = size * std::log(prob);
    if (y > 0) {
        out += log_gamma(yd + size) - log_gamma(size) - log_gamma(yd + 1.0) + yd * std::log1p(-prob);
    }
    return out;
}

}  // namespace mgfml

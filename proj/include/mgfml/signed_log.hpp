#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "mgfml/errors.hpp"

namespace mgfml {

/// Real number stored as sign and natural log of its magnitude.
///
/// Every probability and every mgf derivative in the library travels in this
/// form; marginal likelihoods of realistic data sets sit far outside the
/// range of a double (the pump data alone reach 1e-16, Pareto tails 1e-103).
/// A zero value has sign 0 and its log magnitude is ignored.
class SignedLogReal {
public:
    constexpr SignedLogReal() = default;

    static constexpr SignedLogReal zero() { return {}; }

    static SignedLogReal from_log(double log_magnitude, int sign = +1)
    {
        if (std::isnan(log_magnitude)) {
            throw DomainError("SignedLogReal: NaN log magnitude");
        }
        if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) {
            return {};
        }
        return SignedLogReal(log_magnitude, sign > 0 ? +1 : -1);
    }

    static SignedLogReal from_double(double v)
    {
        if (std::isnan(v)) {
            throw DomainError("SignedLogReal: NaN value");
        }
        if (v == 0.0) {
            return {};
        }
        return SignedLogReal(std::log(std::fabs(v)), v > 0 ? +1 : -1);
    }

    [[nodiscard]] constexpr double log_magnitude() const { return log_mag_; }
    [[nodiscard]] constexpr int sign() const { return sign_; }
    [[nodiscard]] constexpr bool is_zero() const { return sign_ == 0; }

    /// Linear-scale value; underflows to 0 or overflows to inf outside the
    /// double range.
    [[nodiscard]] double to_double() const
    {
        return sign_ == 0 ? 0.0 : sign_ * std::exp(log_mag_);
    }

    constexpr SignedLogReal operator-() const
    {
        SignedLogReal r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    friend SignedLogReal operator*(SignedLogReal a, SignedLogReal b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        return SignedLogReal(a.log_mag_ + b.log_mag_, a.sign_ * b.sign_);
    }

    friend SignedLogReal operator/(SignedLogReal a, SignedLogReal b)
    {
        if (b.is_zero()) {
            throw DomainError("SignedLogReal: division by zero");
        }
        if (a.is_zero()) {
            return {};
        }
        return SignedLogReal(a.log_mag_ - b.log_mag_, a.sign_ * b.sign_);
    }

    friend SignedLogReal operator+(SignedLogReal a, SignedLogReal b)
    {
        if (a.is_zero()) {
            return b;
        }
        if (b.is_zero()) {
            return a;
        }
        if (a.log_mag_ < b.log_mag_) {
            std::swap(a, b);
        }
        const double d = b.log_mag_ - a.log_mag_;  // <= 0
        if (a.sign_ == b.sign_) {
            return SignedLogReal(a.log_mag_ + std::log1p(std::exp(d)), a.sign_);
        }
        if (d == 0.0) {
            return {};
        }
        // log(1 - e^d) for d < 0, accurate on both sides of -ln 2.
        const double l = d > -0.6931471805599453 ? std::log(-std::expm1(d))
                                                 : std::log1p(-std::exp(d));
        return SignedLogReal(a.log_mag_ + l, a.sign_);
    }

    friend SignedLogReal operator-(SignedLogReal a, SignedLogReal b) { return a + (-b); }

    SignedLogReal& operator+=(SignedLogReal o) { return *this = *this + o; }
    SignedLogReal& operator-=(SignedLogReal o) { return *this = *this - o; }
    SignedLogReal& operator*=(SignedLogReal o) { return *this = *this * o; }
    SignedLogReal& operator/=(SignedLogReal o) { return *this = *this / o; }

    /// |x|^p for x != 0; sign is preserved only for the identity exponent.
    [[nodiscard]] SignedLogReal abs_pow(double p) const
    {
        if (is_zero()) {
            if (p <= 0) {
                throw DomainError("SignedLogReal: 0^p with p <= 0");
            }
            return {};
        }
        return SignedLogReal(log_mag_ * p, +1);
    }

    friend std::ostream& operator<<(std::ostream& os, SignedLogReal v)
    {
        if (v.is_zero()) {
            return os << "0";
        }
        return os << (v.sign_ < 0 ? "-" : "") << "exp(" << v.log_mag_ << ")";
    }

private:
    constexpr SignedLogReal(double log_mag, int sign) : log_mag_(log_mag), sign_(sign) {}

    double log_mag_ = 0.0;
    int sign_ = 0;
};

/// Relative difference |a - b| / |b| computed in log space; both must be
/// nonzero with equal sign, otherwise returns +inf.
inline double relative_difference(SignedLogReal a, SignedLogReal b)
{
    if (a.is_zero() && b.is_zero()) {
        return 0.0;
    }
    if (a.is_zero() || b.is_zero() || a.sign() != b.sign()) {
        return std::numeric_limits<double>::infinity();
    }
    return std::fabs(std::expm1(a.log_magnitude() - b.log_magnitude()));
}

}  // namespace mgfml

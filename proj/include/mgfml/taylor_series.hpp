#pragma once

// Dense multivariate truncated power series with SignedLogReal coefficients.
// Coefficient at multi-index k is the Taylor coefficient d^k f / k! at the
// expansion point, so mixed partials come out as coefficient * prod k_j!.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "mgfml/errors.hpp"
#include "mgfml/mgf.hpp"
#include "mgfml/signed_log.hpp"
#include "mgfml/special_fn.hpp"

namespace mgfml {

inline constexpr std::size_t kMaxSeriesEntries = 10'000'000;
inline constexpr unsigned kMaxDenseTotalOrder = 64;

class TruncatedSeries {
public:
    /// Zero series truncated at `max_orders` in each variable.
    explicit TruncatedSeries(std::vector<unsigned> max_orders) : max_orders_(std::move(max_orders))
    {
        if (max_orders_.empty()) {
            throw ShapeError("TruncatedSeries: need at least one variable");
        }
        strides_.assign(max_orders_.size(), 1);
        double size = 1.0;
        for (std::size_t j = max_orders_.size(); j-- > 0;) {
            strides_[j] = static_cast<std::size_t>(size);
            size *= static_cast<double>(max_orders_[j]) + 1.0;
            if (size > static_cast<double>(kMaxSeriesEntries)) {
                std::ostringstream msg;
                msg << "TruncatedSeries: coefficient tensor would exceed " << kMaxSeriesEntries << " entries";
                throw SeriesSizeError(msg.str());
            }
        }
        coeffs_.assign(static_cast<std::size_t>(size), SignedLogReal::zero());
    }

    static TruncatedSeries constant(std::vector<unsigned> max_orders, SignedLogReal value)
    {
        TruncatedSeries s(std::move(max_orders));
        s.coeffs_[0] = value;
        return s;
    }

    /// value + dt_j.
    static TruncatedSeries variable(std::vector<unsigned> max_orders, std::size_t j, SignedLogReal value)
    {
        TruncatedSeries s(std::move(max_orders));
        if (j >= s.dims()) {
            throw ShapeError("TruncatedSeries::variable: index out of range");
        }
        s.coeffs_[0] = value;
        if (s.max_orders_[j] > 0) {
            s.coeffs_[s.strides_[j]] = SignedLogReal::from_log(0.0);
        }
        return s;
    }

    [[nodiscard]] std::size_t dims() const { return max_orders_.size(); }
    [[nodiscard]] const std::vector<unsigned>& max_orders() const { return max_orders_; }
    [[nodiscard]] std::size_t size() const { return coeffs_.size(); }
    [[nodiscard]] unsigned total_order() const
    {
        return std::accumulate(max_orders_.begin(), max_orders_.end(), 0u);
    }

    [[nodiscard]] std::size_t linear_index(const std::vector<unsigned>& k) const
    {
        if (k.size() != dims()) {
            throw ShapeError("TruncatedSeries: multi-index has wrong length");
        }
        std::size_t idx = 0;
        for (std::size_t j = 0; j < k.size(); ++j) {
            if (k[j] > max_orders_[j]) {
                throw ShapeError("TruncatedSeries: multi-index beyond truncation order");
            }
            idx += k[j] * strides_[j];
        }
        return idx;
    }

    [[nodiscard]] SignedLogReal coeff(const std::vector<unsigned>& k) const { return coeffs_[linear_index(k)]; }
    [[nodiscard]] SignedLogReal coeff_at(std::size_t linear) const { return coeffs_.at(linear); }
    void set_coeff(const std::vector<unsigned>& k, SignedLogReal v) { coeffs_[linear_index(k)] = v; }
    [[nodiscard]] SignedLogReal constant_term() const { return coeffs_[0]; }

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b)
    {
        a.require_same_shape(b);
        TruncatedSeries out = a;
        for (std::size_t i = 0; i < out.coeffs_.size(); ++i) {
            out.coeffs_[i] += b.coeffs_[i];
        }
        return out;
    }

    TruncatedSeries operator-() const
    {
        TruncatedSeries out = *this;
        for (auto& c : out.coeffs_) {
            c = -c;
        }
        return out;
    }

    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }

    [[nodiscard]] TruncatedSeries scaled(SignedLogReal s) const
    {
        TruncatedSeries out = *this;
        for (auto& c : out.coeffs_) {
            c *= s;
        }
        return out;
    }

    /// Truncated Cauchy product.
    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b)
    {
        a.require_same_shape(b);
        TruncatedSeries out(a.max_orders_);
        std::vector<unsigned> k(a.dims(), 0);
        for (std::size_t lk = 0; lk < out.size(); a.advance(k), ++lk) {
            SignedLogReal acc;
            a.for_each_sub(k, [&](std::size_t li, const std::vector<unsigned>&) {
                acc += a.coeffs_[li] * b.coeffs_[lk - li];
            });
            out.coeffs_[lk] = acc;
        }
        return out;
    }

    /// a^p for real p; requires a positive constant term. Uses the power
    /// recurrence a_0 k_j b_k = sum_{0 < i <= k} ((p+1) i_j - k_j) a_i b_{k-i}
    /// with j the first variable where k is nonzero.
    [[nodiscard]] TruncatedSeries pow_real(double p) const
    {
        const auto a0 = coeffs_[0];
        if (a0.sign() <= 0) {
            throw DomainError("TruncatedSeries::pow_real: constant term must be positive");
        }
        TruncatedSeries out(max_orders_);
        out.coeffs_[0] = a0.abs_pow(p);
        std::vector<unsigned> k(dims(), 0);
        advance(k);
        for (std::size_t lk = 1; lk < size(); advance(k), ++lk) {
            const std::size_t j = first_nonzero(k);
            SignedLogReal acc;
            for_each_sub(k, [&](std::size_t li, const std::vector<unsigned>& i) {
                if (li == 0 || coeffs_[li].is_zero()) {
                    return;
                }
                const double w = (p + 1.0) * i[j] - static_cast<double>(k[j]);
                if (w == 0.0) {
                    return;
                }
                acc += SignedLogReal::from_double(w) * coeffs_[li] * out.coeffs_[lk - li];
            });
            out.coeffs_[lk] = acc / (SignedLogReal::from_double(k[j]) * a0);
        }
        return out;
    }

    /// e^a via k_j b_k = sum_{0 < i <= k} i_j a_i b_{k-i}.
    [[nodiscard]] TruncatedSeries exp() const
    {
        const auto a0 = coeffs_[0];
        TruncatedSeries out(max_orders_);
        out.coeffs_[0] = SignedLogReal::from_log(a0.to_double());
        std::vector<unsigned> k(dims(), 0);
        advance(k);
        for (std::size_t lk = 1; lk < size(); advance(k), ++lk) {
            const std::size_t j = first_nonzero(k);
            SignedLogReal acc;
            for_each_sub(k, [&](std::size_t li, const std::vector<unsigned>& i) {
                if (li == 0 || i[j] == 0 || coeffs_[li].is_zero()) {
                    return;
                }
                acc += SignedLogReal::from_double(i[j]) * coeffs_[li] * out.coeffs_[lk - li];
            });
            out.coeffs_[lk] = acc / SignedLogReal::from_double(k[j]);
        }
        return out;
    }

    /// f(a) for a univariate f given its derivatives at a's constant term:
    /// derivs[n] = f^{(n)}(a_0), n = 0..total_order().
    [[nodiscard]] TruncatedSeries compose(const std::vector<SignedLogReal>& derivs) const
    {
        const unsigned top = total_order();
        if (derivs.size() < top + 1u) {
            throw ShapeError("TruncatedSeries::compose: need derivatives up to the total order");
        }
        TruncatedSeries delta = *this;
        delta.coeffs_[0] = SignedLogReal::zero();
        TruncatedSeries power = constant(max_orders_, SignedLogReal::from_log(0.0));
        TruncatedSeries out = constant(max_orders_, derivs[0]);
        for (unsigned n = 1; n <= top; ++n) {
            power = power * delta;
            const auto w = derivs[n] / SignedLogReal::from_log(log_gamma(n + 1.0));
            out = out + power.scaled(w);
        }
        return out;
    }

private:
    void require_same_shape(const TruncatedSeries& o) const
    {
        if (max_orders_ != o.max_orders_) {
            throw ShapeError("TruncatedSeries: operands truncated at different orders");
        }
    }

    // Next multi-index in row-major order (last variable fastest).
    void advance(std::vector<unsigned>& k) const
    {
        for (std::size_t j = k.size(); j-- > 0;) {
            if (k[j] < max_orders_[j]) {
                ++k[j];
                return;
            }
            k[j] = 0;
        }
    }

    static std::size_t first_nonzero(const std::vector<unsigned>& k)
    {
        std::size_t j = 0;
        while (k[j] == 0) {
            ++j;
        }
        return j;
    }

    // Calls f(linear(i), i) for every multi-index i <= k, in a fixed order.
    // linear(k - i) = linear(k) - linear(i).
    template <class F>
    void for_each_sub(const std::vector<unsigned>& k, F&& f) const
    {
        std::vector<unsigned> i(k.size(), 0);
        std::size_t li = 0;
        while (true) {
            f(li, i);
            std::size_t j = k.size();
            while (j-- > 0) {
                if (i[j] < k[j]) {
                    ++i[j];
                    li += strides_[j];
                    break;
                }
                li -= i[j] * strides_[j];
                i[j] = 0;
            }
            if (j == static_cast<std::size_t>(-1)) {
                return;
            }
        }
    }

    std::vector<unsigned> max_orders_;
    std::vector<std::size_t> strides_;
    std::vector<SignedLogReal> coeffs_;
};

/// d^{orders} f at the expansion point: coefficient * prod orders_j!.
inline SignedLogReal mixed_partial(const TruncatedSeries& f, const std::vector<unsigned>& orders)
{
    double log_fact = 0.0;
    for (unsigned k : orders) {
        log_fact += log_gamma(k + 1.0);
    }
    return f.coeff(orders) * SignedLogReal::from_log(log_fact);
}

/// M(arg) as a series, for an argument series `arg` whose constant term lies
/// in the mgf domain. Gamma-type mgfs use pow_real, point masses exp, Pareto
/// composition with its closed-form derivatives.
inline TruncatedSeries lift_mgf(const PriorMgf& m, const TruncatedSeries& arg)
{
    const double u0 = arg.constant_term().to_double();
    if (!m.in_domain(u0)) {
        std::ostringstream msg;
        msg << "lift_mgf: expansion point " << u0 << " outside the mgf domain of " << m.describe();
        throw DomainError(msg.str());
    }
    const auto one = SignedLogReal::from_log(0.0);
    auto gamma_like = [&](double shape, double rate) {
        // rate^shape (rate - u)^(-shape)
        const auto base = TruncatedSeries::constant(arg.max_orders(), SignedLogReal::from_double(rate)) - arg;
        return base.pow_real(-shape).scaled(SignedLogReal::from_log(shape * std::log(rate)));
    };
    if (m.is<GammaPrior>()) {
        const auto& g = std::get<GammaPrior>(m.family());
        return gamma_like(g.shape, g.rate);
    }
    if (m.is<ExponentialPrior>()) {
        return gamma_like(1.0, std::get<ExponentialPrior>(m.family()).rate);
    }
    if (m.is<PointMass>()) {
        const double c = std::get<PointMass>(m.family()).location;
        if (c == 0.0) {
            return TruncatedSeries::constant(arg.max_orders(), one);
        }
        return arg.scaled(SignedLogReal::from_double(c)).exp();
    }
    std::vector<SignedLogReal> derivs;
    for (unsigned n = 0; n <= arg.total_order(); ++n) {
        derivs.push_back(deriv_int(m, n, u0));
    }
    return arg.compose(derivs);
}

}  // namespace mgfml

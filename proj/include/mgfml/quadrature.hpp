#pragma once

// Adaptive Gauss-Kronrod quadrature, plus a log-domain driver for positive
// integrands whose values do not fit in a double.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "mgfml/errors.hpp"

namespace mgfml::quad {

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    std::size_t max_subdivisions = std::size_t{1} << 20;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * kGaussWeights[3];
    double resk = fc * kKronrodWeights[7];
    double resabs = std::fabs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double s = f1[j] + f2[j];
        resk += kKronrodWeights[j] * s;
        resabs += kKronrodWeights[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) {
            resg += kGaussWeights[j / 2] * s;
        }
    }
    const double reskh = 0.5 * resk;
    double resasc = kKronrodWeights[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kKronrodWeights[j] * (std::fabs(f1[j] - reskh) + std::fabs(f2[j] - reskh));
    }
    const double ahalf = std::fabs(half);
    resasc *= ahalf;
    resabs *= ahalf;
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    return {a, b, resk * half, err};
}

}  // namespace detail

/// Globally adaptive bisection on [a, b]: the segment with the largest error
/// estimate is split until the summed estimate meets the tolerance.
/// Throws QuadratureError on non-finite values or when the subdivision
/// budget runs out.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {})
{
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw QuadratureError("integrate: bounds must be finite");
    }
    Result out;
    if (a == b) {
        return out;
    }
    std::vector<detail::Segment> heap;
    auto first = detail::gauss_kronrod_15(f, a, b);
    out.evaluations = 15;
    double total = first.value;
    double total_err = first.error;
    heap.push_back(first);
    auto converged = [&] {
        return total_err <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total));
    };
    std::size_t steps = 0;
    std::size_t next_refresh = 64;
    while (!converged()) {
        if (!std::isfinite(total) || !std::isfinite(total_err)) {
            throw QuadratureError("integrate: non-finite integrand value");
        }
        if (heap.size() >= opts.max_subdivisions) {
            std::ostringstream msg;
            msg << "integrate: no convergence after " << heap.size()
                << " subdivisions (estimate " << total << ", error " << total_err << ")";
            throw QuadratureError(msg.str());
        }
        std::pop_heap(heap.begin(), heap.end());
        const auto worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        // Resum at geometrically spaced steps so drift in the incremental
        // updates cannot stall convergence; linear total cost.
        if (++steps == next_refresh) {
            next_refresh *= 2;
            total = 0.0;
            total_err = 0.0;
            for (const auto& s : heap) {
                total += s.value;
                total_err += s.error;
            }
        }
    }
    if (!std::isfinite(total)) {
        throw QuadratureError("integrate: non-finite integrand value");
    }
    out.value = total;
    out.error = total_err;
    out.intervals = heap.size();
    return out;
}

/// Integral of exp(F(u)) over the real line, reported on the log scale.
struct LogResult {
    double log_value = 0.0;
    /// Estimated relative error of exp(log_value).
    double rel_error = 0.0;
    std::size_t evaluations = 0;
};

struct LineScan {
    double lo = -30.0;
    double hi = 30.0;
    double step = 0.1;
    /// Region kept: where F is within this many nats of its maximum.
    double drop = 60.0;
    /// Scan never extends beyond |u| <= limit.
    double limit = 2.0e4;
};

/// Integrates exp(F(u)) du over (-inf, inf) for a positive unimodal-ish
/// integrand given by its logarithm F. A grid scan locates the region where
/// F is within `scan.drop` nats of its maximum (extending the grid outwards
/// while the edges are still significant); that window is integrated
/// adaptively after shifting F by its maximum. Callers map half-lines onto
/// the real line themselves (x = a + e^u), which keeps tails and scale
/// changes inside F where they can be written without overflow.
/// F carries an absolute rounding error of about eps * |F|, so the relative
/// tolerance is floored at 32 eps |peak|.
template <class LogF>
LogResult integrate_exp_line(LogF&& log_f, const Options& opts = {}, const LineScan& scan = {})
{
    LogResult out;
    auto eval = [&](double u) {
        const double v = log_f(u);
        ++out.evaluations;
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            std::ostringstream msg;
            msg << "integrate_exp_line: log-integrand is " << v << " at u = " << u;
            throw QuadratureError(msg.str());
        }
        return v;
    };

    std::vector<double> us;
    std::vector<double> fs;
    for (double u = scan.lo; u <= scan.hi + 1e-12; u += scan.step) {
        us.push_back(u);
        fs.push_back(eval(u));
    }
    double peak = *std::max_element(fs.begin(), fs.end());
    if (peak == -std::numeric_limits<double>::infinity()) {
        throw QuadratureError("integrate_exp_line: integrand vanishes on the scan grid");
    }

    // Grow the grid geometrically while an edge is still within the window.
    double span_lo = scan.lo;
    double span_hi = scan.hi;
    while (fs.front() > peak - scan.drop) {
        if (span_lo <= -scan.limit) {
            throw DivergenceError("integrate_exp_line: left tail does not decay");
        }
        const double new_lo = std::max(-scan.limit, span_lo - 2.0 * (span_hi - span_lo));
        const double step = std::max(scan.step, (span_lo - new_lo) / 4096.0);
        std::vector<double> nu;
        std::vector<double> nf;
        for (double u = new_lo; u < span_lo - 0.5 * step; u += step) {
            nu.push_back(u);
            nf.push_back(eval(u));
        }
        us.insert(us.begin(), nu.begin(), nu.end());
        fs.insert(fs.begin(), nf.begin(), nf.end());
        span_lo = new_lo;
        peak = std::max(peak, *std::max_element(nf.begin(), nf.end()));
    }
    while (fs.back() > peak - scan.drop) {
        if (span_hi >= scan.limit) {
            throw DivergenceError("integrate_exp_line: right tail does not decay");
        }
        const double new_hi = std::min(scan.limit, span_hi + 2.0 * (span_hi - span_lo));
        const double step = std::max(scan.step, (new_hi - span_hi) / 4096.0);
        for (double u = span_hi + step; u <= new_hi + 1e-12; u += step) {
            us.push_back(u);
            fs.push_back(eval(u));
            peak = std::max(peak, fs.back());
        }
        span_hi = new_hi;
    }

    std::size_t first = 0;
    while (fs[first] <= peak - scan.drop) {
        ++first;
    }
    std::size_t last = fs.size() - 1;
    while (fs[last] <= peak - scan.drop) {
        --last;
    }
    const double a = us[first == 0 ? 0 : first - 1];
    const double b = us[last + 1 < us.size() ? last + 1 : last];

    Options local = opts;
    local.rel_tol = std::max(opts.rel_tol, 32.0 * std::numeric_limits<double>::epsilon() * std::fabs(peak));
    if (local.rel_tol >= 1.0) {
        // Not even the order of magnitude is resolvable; report the peak.
        out.log_value = peak;
        out.rel_error = std::numeric_limits<double>::infinity();
        return out;
    }

    double shift = peak;
    // The grid can under-estimate a narrow peak; re-run with a larger shift
    // if the adaptive pass sees values far above it.
    for (int attempt = 0; attempt < 4; ++attempt) {
        double seen = -std::numeric_limits<double>::infinity();
        auto g = [&](double u) {
            const double v = eval(u);
            seen = std::max(seen, v);
            return v - shift > 600.0 ? 0.0 : std::exp(v - shift);
        };
        const Result r = integrate(g, a, b, local);
        if (seen <= shift + 600.0) {
            if (!(r.value > 0.0)) {
                throw QuadratureError("integrate_exp_line: non-positive integral");
            }
            out.log_value = shift + std::log(r.value);
            out.rel_error = r.error / r.value;
            return out;
        }
        shift = seen;
    }
    throw QuadratureError("integrate_exp_line: could not stabilise the scaling shift");
}

}  // namespace mgfml::quad

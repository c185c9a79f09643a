#include <catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "mgfml/fit.hpp"
#include "mgfml/optimize.hpp"

using namespace mgfml;
using Catch::Matchers::WithinAbs;

TEST_CASE("simplex search recovers the argmax of a pinned 1-D surface", "[optimize]")
{
    // Maximize g(x) = 1 - cosh(x - 0.7): minimize its negative.
    const auto r = nelder_mead([](const Eigen::VectorXd& x) { return std::cosh(x(0) - 0.7) - 1.0; },
                               Eigen::VectorXd::Constant(1, -2.0));
    CHECK(r.converged);
    CHECK_THAT(r.x(0), WithinAbs(0.7, 1e-6));
    CHECK(r.evaluations <= 5000);
}

TEST_CASE("simplex search on Rosenbrock's valley", "[optimize]")
{
    auto rosen = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
    };
    const auto r = nelder_mead(rosen, Eigen::Vector2d(-1.2, 1.0));
    CHECK(r.converged);
    CHECK_THAT(r.x(0), WithinAbs(1.0, 1e-4));
    CHECK_THAT(r.x(1), WithinAbs(1.0, 1e-4));
}

TEST_CASE("budget exhaustion and non-finite values", "[optimize]")
{
    NelderMeadOptions tight;
    tight.max_evaluations = 20;
    auto rosen = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
    };
    const auto r = nelder_mead(rosen, Eigen::Vector2d(-1.2, 1.0), tight);
    CHECK_FALSE(r.converged);
    CHECK(std::isfinite(r.value));
    CHECK(r.value <= rosen(Eigen::Vector2d(-1.2, 1.0)));

    // A wall of NaN left of 0 is never chosen.
    const auto w = nelder_mead(
        [](const Eigen::VectorXd& x) { return x(0) < 0.0 ? std::nan("") : (x(0) - 0.5) * (x(0) - 0.5); },
        Eigen::VectorXd::Constant(1, 0.05));
    CHECK_THAT(w.x(0), WithinAbs(0.5, 1e-6));
}

TEST_CASE("MMLE on constant responses matches the stationary point", "[optimize][fit]")
{
    // Every y equal to c, intercept only: d/da of the compound-gamma
    // marginal vanishes at a = ln c + ln((xi + 1) / xi).
    Table t;
    t.names = {"y", "g"};
    const double c = 2.5;
    for (int g = 1; g <= 3; ++g) {
        for (int k = 0; k < 4; ++k) {
            t.rows.push_back({c, static_cast<double>(g)});
        }
    }
    const double xi = 4.0;
    const auto d = design_from_table(t, "y", {}, "g");
    const auto fit = fit_gamma_hglm_mmle(d, 3, xi);
    CHECK(fit.converged);
    CHECK_THAT(fit.a(0), WithinAbs(std::log(c) + std::log((xi + 1.0) / xi), 1e-6));
    CHECK_THROWS_AS(fit_gamma_hglm_mmle(d, 2.5, xi), ModelError);
    CHECK_THROWS_AS(fit_gamma_hglm_mmle(d, 3, 0.0), ModelError);
}

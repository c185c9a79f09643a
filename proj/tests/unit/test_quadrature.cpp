#include <catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "mgfml/quadrature.hpp"

using namespace mgfml;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Kronrod on smooth and peaked integrands", "[quadrature]")
{
    CHECK_THAT(quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value, WithinRel(2.0, 1e-13));
    CHECK_THAT(quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value, WithinRel(std::expm1(1.0), 1e-14));
    // Endpoint singularity 1/sqrt(x): adaptive bisection still converges.
    quad::Options o;
    o.rel_tol = 1e-10;
    CHECK_THAT(quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, o).value, WithinRel(2.0, 1e-9));
    CHECK(quad::integrate([](double x) { return x; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("integrate reports bad input", "[quadrature]")
{
    CHECK_THROWS_AS(quad::integrate([](double x) { return x; }, 0.0, std::numeric_limits<double>::infinity()),
                    QuadratureError);
    CHECK_THROWS_AS(quad::integrate([](double) { return std::nan(""); }, 0.0, 1.0), QuadratureError);
}

TEST_CASE("log-line integration of values far outside double range", "[quadrature]")
{
    // int exp(c - u^2) du = exp(c) sqrt(pi) for any c.
    for (const double c : {-5000.0, 0.0, 3000.0}) {
        const auto r = quad::integrate_exp_line([c](double u) { return c - u * u; });
        CHECK_THAT(r.log_value, WithinRel(c + 0.5 * std::log(M_PI), 1e-14));
    }
    // Shifted peak far from the initial scan window.
    const auto far = quad::integrate_exp_line([](double u) { return -(u - 500.0) * (u - 500.0); });
    CHECK_THAT(far.log_value, WithinRel(0.5 * std::log(M_PI), 1e-12));
    // Gamma(3) = int exp(3u - e^u) du.
    const auto g = quad::integrate_exp_line([](double u) { return 3.0 * u - std::exp(u); });
    CHECK_THAT(g.log_value, WithinRel(std::log(2.0), 1e-13));
}

TEST_CASE("log-line integration detects non-decaying tails", "[quadrature]")
{
    CHECK_THROWS_AS(quad::integrate_exp_line([](double u) { return -0.0 * u; }), DivergenceError);
    CHECK_THROWS_AS(quad::integrate_exp_line([](double u) { return u; }), DivergenceError);
    CHECK_THROWS_AS(quad::integrate_exp_line([](double) { return -std::numeric_limits<double>::infinity(); }),
                    QuadratureError);
}

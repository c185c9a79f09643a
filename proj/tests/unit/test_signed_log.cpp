#include <catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "mgfml/signed_log.hpp"

using mgfml::SignedLogReal;
using Catch::Matchers::WithinRel;

TEST_CASE("round trip through the log representation", "[signed_log]")
{
    // exp() turns the rounding of log|v| into relative error |log v| * eps.
    for (const double v : {1.0, -1.0, 0.5, -3.25e-200, 7.9e250, 1e-300, -2.0}) {
        const double tol = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(std::log(std::abs(v))));
        CHECK_THAT(SignedLogReal::from_double(v).to_double(), WithinRel(v, tol));
    }
    const auto z = SignedLogReal::from_double(0.0);
    CHECK(z.is_zero());
    CHECK(z.sign() == 0);
    CHECK(z.to_double() == 0.0);
}

TEST_CASE("values beyond the double range keep their logs", "[signed_log]")
{
    const auto a = SignedLogReal::from_log(-800.0);
    const auto b = SignedLogReal::from_log(-801.0);
    CHECK(a.to_double() == 0.0);
    CHECK_THAT((a * b).log_magnitude(), WithinRel(-1601.0, 1e-15));
    CHECK_THAT((a + b).log_magnitude(), WithinRel(-800.0 + std::log1p(std::exp(-1.0)), 1e-15));
    CHECK_THAT((a / b).log_magnitude(), WithinRel(1.0, 1e-12));
}

TEST_CASE("signed addition and cancellation", "[signed_log]")
{
    const auto three = SignedLogReal::from_double(3.0);
    const auto two = SignedLogReal::from_double(2.0);
    CHECK_THAT((three - two).to_double(), WithinRel(1.0, 1e-15));
    CHECK_THAT((two - three).to_double(), WithinRel(-1.0, 1e-15));
    CHECK((three - three).is_zero());
    // Nearly equal operands: log(1 - e^d) with d close to 0.
    const auto x = SignedLogReal::from_double(1.0 + 1e-10);
    CHECK_THAT((x - SignedLogReal::from_double(1.0)).to_double(), WithinRel(1e-10, 1e-6));
    // Distant operands: log1p branch.
    CHECK_THAT((SignedLogReal::from_double(1.0) - SignedLogReal::from_double(1e-20)).to_double(), WithinRel(1.0, 1e-15));
}

TEST_CASE("zero handling", "[signed_log]")
{
    const auto z = SignedLogReal::zero();
    const auto v = SignedLogReal::from_double(-4.0);
    CHECK((z + v).to_double() == -4.0);
    CHECK((z * v).is_zero());
    CHECK((z / v).is_zero());
    CHECK_THROWS_AS(v / z, mgfml::DomainError);
    CHECK(SignedLogReal::from_log(-std::numeric_limits<double>::infinity()).is_zero());
    CHECK_THROWS_AS(SignedLogReal::from_log(std::nan("")), mgfml::DomainError);
    CHECK_THROWS_AS(SignedLogReal::from_double(std::nan("")), mgfml::DomainError);
}

TEST_CASE("abs_pow", "[signed_log]")
{
    CHECK_THAT(SignedLogReal::from_double(-8.0).abs_pow(1.0 / 3.0).to_double(), WithinRel(2.0, 1e-15));
    CHECK(SignedLogReal::zero().abs_pow(2.0).is_zero());
    CHECK_THROWS_AS(SignedLogReal::zero().abs_pow(-1.0), mgfml::DomainError);
}

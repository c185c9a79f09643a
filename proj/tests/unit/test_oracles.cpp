#include <catch_amalgamated.hpp>
#include <cmath>
#include <fstream>
#include <string>

#include "mgfml/models.hpp"
#include "mgfml/oracles.hpp"

using namespace mgfml;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Reference values: mpmath at 50 digits (tests/reference/reference_values.py).

namespace {

Eigen::MatrixXd overlap()
{
    Eigen::MatrixXd a(5, 3);
    a << 0.1, 0, 0, 0.9, 0.1, 0, 0, 0.1, 0, 0, 0.8, 0.1, 0, 0, 0.9;
    return a;
}

std::uint64_t golden_hits()
{
    std::ifstream in(std::string(MGFML_TEST_DATA_DIR) + "/../golden/mc_seed42_n1e5.txt");
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            return std::stoull(line);
        }
    }
    FAIL("golden file missing");
    return 0;
}

}  // namespace

TEST_CASE("negative binomial mixtures", "[oracles]")
{
    CHECK_THAT(oracle::negbin_mixture(0, 4, 5, 1).to_double(), WithinRel(0.48225308641975308642, 1e-14));
    CHECK_THAT(oracle::negbin_product({0, 1, 2, 3}, 6, 5, {1, 1, 1, 1}).to_double(),
               WithinRel(0.0019023970537385517348, 1e-13));
    CHECK_THAT(oracle::negbin_product(PumpData::counts(), 1.27, 0.82, PumpData::times()).log_magnitude(),
               WithinAbs(-35.823753515312173928, 1e-12));
    CHECK_THROWS_AS(oracle::negbin_product({1}, 1, 1, {1, 2}), ShapeError);
}

TEST_CASE("Chib's identity is exact at every evaluation point", "[oracles]")
{
    const std::vector<std::uint64_t> y = {0, 0, 1, 2};
    for (const double lambda : {0.01, 0.3, 1.0, 2.0, 10.0}) {
        CHECK_THAT(oracle::chib_poisson_gamma(y, 4, 6, lambda).log_magnitude(), WithinAbs(std::log(0.007776), 1e-12));
    }
    CHECK_THROWS_AS(oracle::chib_poisson_gamma(y, 4, 6, 0.0), DomainError);
}

TEST_CASE("Pareto-Poisson marginal by exponential integral and by quadrature", "[oracles]")
{
    const std::vector<std::uint64_t> y = PumpData::counts();
    const std::vector<double> t = PumpData::times();
    CHECK_THAT(oracle::poisson_exposure_log_prefactor(y, t), WithinRel(111.55341595530501179, 1e-14));
    CHECK_THAT(oracle::poisson_pareto_marginal(y, t, 80, 0.01).log_magnitude(), WithinRel(-235.14068230961679266, 1e-13));
    CHECK_THAT(oracle::poisson_pareto_marginal_quadrature(y, t, 80, 0.01).log_value,
               WithinRel(-235.14068230961679266, 1e-12));
}

TEST_CASE("compound gamma densities", "[oracles]")
{
    CHECK_THAT(oracle::compound_gamma({3.4}, 1, 1, 1, {1}).to_double(), WithinRel(0.051652892561983471074, 1e-14));
    CHECK_THAT(oracle::compound_gamma({2.7, 3.3, 3.6}, 1, 1.1, 0.5, {1, 1, 1}).to_double(),
               WithinRel(0.00012380965950969271116, 1e-13));
    CHECK_THAT(oracle::compound_gamma({1}, 1, 1, 0.7, {1}).to_double(), WithinRel(0.21545027233536034979, 1e-14));
    // Two groups of one: the product of single-group densities.
    CHECK_THAT(oracle::multi_group_compound_gamma({1.0, 2.0}, {0, 1}, 3.0, 2.0, {1.0, 1.0}).log_magnitude(),
               WithinAbs(oracle::compound_gamma({1.0}, 4, 3, 2, {1}).log_magnitude() +
                             oracle::compound_gamma({2.0}, 4, 3, 2, {1}).log_magnitude(),
                         1e-14));
    CHECK_THROWS_AS(oracle::compound_gamma({-1.0}, 1, 1, 1, {1}), DomainError);
}

TEST_CASE("allocation-sum oracle for overlapping Poisson rates", "[oracles]")
{
    CHECK_THAT(oracle::poisson_gamma_allocation_sum(overlap(), std::vector<GammaPrior>(3, {4.5, 2}), {0, 1, 0, 2, 3})
                   .to_double(),
               WithinRel(0.0057456925655449010216, 1e-13));
}

TEST_CASE("brute-force quadrature marginal", "[oracles]")
{
    const oracle::QuadratureModel q{oracle::Likelihood::Gamma,
                                    std::vector<PriorMgf>(2, PriorMgf::exponential(0.9)),
                                    Eigen::MatrixXd::Identity(2, 2),
                                    Eigen::VectorXd::Ones(2),
                                    Eigen::Vector2d(0.4, 2.2),
                                    Eigen::Vector2d(1.5, 2)};
    const auto r = oracle::quadrature_marginal(q, 1e-9);
    CHECK_THAT(std::exp(r.log_value), WithinRel(0.058900026178830366073, 1e-8));
    CHECK(r.rel_error <= 1e-8);

    const oracle::QuadratureModel one{oracle::Likelihood::Poisson, {PriorMgf::gamma(4, 5)}, Eigen::MatrixXd::Ones(1, 1),
                                      Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1), {}};
    CHECK_THAT(std::exp(oracle::quadrature_marginal(one).log_value), WithinRel(0.48225308641975308642, 1e-9));

    const oracle::QuadratureModel three{oracle::Likelihood::Poisson, std::vector<PriorMgf>(3, PriorMgf::gamma(4, 5)),
                                        Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3),
                                        Eigen::VectorXd::Zero(3), {}};
    CHECK_THROWS_AS(oracle::quadrature_marginal(three), ShapeError);
}

TEST_CASE("binomial central interval", "[oracles]")
{
    const auto ci = oracle::binomial_central_interval(1'000'000, 0.005745693);
    CHECK(ci.low == 5598);
    CHECK(ci.high == 5894);
    CHECK(oracle::binomial_central_interval(10, 0.0).high == 0);
    CHECK_THROWS_AS(oracle::binomial_central_interval(10, 1.5), DomainError);
}

TEST_CASE("prior samplers reproduce their means", "[oracles]")
{
    const std::vector<std::pair<PriorMgf, double>> cases = {
        {PriorMgf::gamma(4.5, 2), 2.25}, {PriorMgf::exponential(4), 0.25}, {PriorMgf::pareto(5, 1), 1.25},
        {PriorMgf::point_mass(0.3), 0.3}};
    for (const auto& [prior, mean] : cases) {
        double sum = 0.0;
        const int n = 200'000;
        for (int i = 0; i < n; ++i) {
            PhiloxStream g(11, static_cast<std::uint64_t>(i));
            sum += oracle::sample_prior(prior, g);
        }
        INFO(prior.describe());
        CHECK_THAT(sum / n, WithinRel(mean, 0.01));
    }
}

TEST_CASE("Monte Carlo overlap check", "[oracles][mc]")
{
    const auto priors = std::vector<PriorMgf>(3, PriorMgf::gamma(4.5, 2));
    const std::vector<std::uint64_t> y = {0, 1, 0, 2, 3};
    const auto one = oracle::mc_overlap_check(overlap(), priors, y, 30'000, 5, 0.005745693, 1);
    const auto many = oracle::mc_overlap_check(overlap(), priors, y, 30'000, 5, 0.005745693, 7);
    CHECK(one.hits == many.hits);
    const auto pinned = oracle::mc_overlap_check(overlap(), priors, y, 100'000, 42, 0.005745693);
    CHECK(pinned.hits == golden_hits());
    CHECK(pinned.pass);
    CHECK_THROWS_AS(oracle::mc_overlap_check(overlap(), priors, {0, 1}, 10, 1, 0.5), ShapeError);
}

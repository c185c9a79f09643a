#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mgfml/app/commands.hpp"

int main(int argc, char** argv)
{
    using namespace mgfml::app;

    CLI::App app{"Exact marginal likelihoods by differentiating prior moment-generating functions"};
    app.require_subcommand(1);

    RunOptions opts;
    std::string config;
    int example = 0;
    std::string suite;
    std::optional<double> tolerance;

    const std::map<std::string, Format> formats = {{"text", Format::Text}, {"records", Format::Records}};
    app.add_option("--format", opts.format, "Output format: text or records (one JSON object per line)")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->default_str("text");
    app.add_option("--seed", opts.checks.seed, "Seed for Monte Carlo and synthetic data")->default_val(42);
    app.add_option("--tolerance-override", tolerance, "Replace every per-check tolerance")
        ->check(CLI::PositiveNumber);

    auto* ex = app.add_subcommand("example", "Reproduce worked example N (1..10)");
    ex->add_option("N", example, "Example number")->required()->check(CLI::Range(1, 10));

    auto* marginal = app.add_subcommand("marginal", "Compute the marginal likelihood a config describes");
    marginal->add_option("--config", config, "Run config (JSON)")->required();

    auto* fit = app.add_subcommand("fit-mmle", "Fit gamma HGLM fixed effects by maximizing the marginal likelihood");
    fit->add_option("--config", config, "Run config (JSON)")->required();

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("SUITE", suite, "closed-forms, quadrature, monte-carlo or properties")
        ->required()
        ->check(CLI::IsMember(verify_suites()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }
    opts.checks.tolerance_override = tolerance;

    if (*ex) {
        return cmd_example(example, opts);
    }
    if (*marginal) {
        return cmd_marginal(config, opts);
    }
    if (*fit) {
        return cmd_fit_mmle(config, opts);
    }
    return cmd_verify(suite, opts);
}

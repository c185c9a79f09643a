#pragma once

// CLI subcommands. Each returns the process exit code: 0 pass, 1 usage or
// config error, 2 verification failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgfml/app/checks.hpp"
#include "mgfml/app/config.hpp"
#include "mgfml/fit.hpp"
#include "mgfml/marginalize.hpp"

namespace mgfml::app {

enum class Format { Text, Records };

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

struct RunOptions {
    Format format = Format::Text;
    CheckOptions checks;
};

namespace detail {

using ordered = nlohmann::ordered_json;

inline void emit(std::ostream& out, const ordered& record) { out << record.dump() << '\n'; }

inline std::string fmt(double v, int digits = 17)
{
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

/// exp(log_value) in scientific notation, computed through log10 so values
/// outside the double range still print.
inline std::string fmt_exp(double log_value, int digits = 10)
{
    if (!std::isfinite(log_value)) {
        return log_value > 0 ? "inf" : "0";
    }
    const double l10 = log_value / std::log(10.0);
    double e = std::floor(l10);
    double mant = std::pow(10.0, l10 - e);
    if (mant >= 10.0) {
        mant /= 10.0;
        e += 1.0;
    }
    std::ostringstream os;
    os << std::setprecision(digits) << mant << "e" << (e < 0 ? "-" : "+") << std::abs(static_cast<long long>(e));
    return os.str();
}

inline ordered check_record(const Check& c)
{
    ordered r;
    r["group"] = c.group;
    r["check"] = c.name;
    if (c.mc) {
        r["n_iter"] = c.mc->n_iter;
        r["hits"] = c.mc->hits;
        r["p0"] = c.mc->p0;
        r["ci_low"] = c.mc->ci_low;
        r["ci_high"] = c.mc->ci_high;
    } else if (c.property) {
        r["max_error"] = c.value;
        r["tolerance"] = c.tolerance;
    } else {
        r["log_marginal"] = c.value;
        r["oracle_log"] = c.reference;
        r["abs_log_diff"] = c.difference();
        r["tolerance"] = c.tolerance;
    }
    r["path"] = c.path;
    if (!c.note.empty()) {
        r["note"] = c.note;
    }
    r["pass"] = c.pass;
    return r;
}

inline void print_check(std::ostream& out, const Check& c)
{
    out << (c.pass ? "PASS " : "FAIL ") << c.group << " / " << c.name;
    if (c.mc) {
        out << ": hits " << c.mc->hits << " of " << c.mc->n_iter << ", 95% interval [" << c.mc->ci_low << ", "
            << c.mc->ci_high << "] at p0 = " << fmt(c.mc->p0, 7);
    } else if (c.property) {
        if (c.group == "properties") {
            out << ": max error " << fmt(c.value, 3) << " (bound " << fmt(c.tolerance, 3) << ")";
        } else {
            out << ": log marginal " << fmt(c.value);
        }
    } else {
        out << " [" << c.path << "]\n"
            << "    mgf path   " << fmt(c.value) << "  (" << fmt_exp(c.value) << ")\n"
            << "    oracle     " << fmt(c.reference) << "\n"
            << "    |log diff| " << fmt(c.difference(), 3) << " (tolerance " << fmt(c.tolerance, 3) << ")";
    }
    if (!c.note.empty()) {
        out << (c.property ? ", " : "\n    ") << c.note;
    }
    out << '\n';
}

inline int report(std::ostream& out, const std::vector<Check>& checks, const RunOptions& o)
{
    std::size_t passed = 0;
    for (const auto& c : checks) {
        passed += c.pass ? 1 : 0;
        if (o.format == Format::Records) {
            emit(out, check_record(c));
        } else {
            print_check(out, c);
        }
    }
    if (o.format == Format::Text) {
        out << passed << " of " << checks.size() << " checks passed\n";
    }
    return passed == checks.size() ? kExitPass : kExitFailure;
}

template <class F>
int guarded(std::ostream& err, F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConsistencyError& e) {
        err << "verification failure: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

inline std::vector<std::uint64_t> counts(const Eigen::VectorXd& y)
{
    try {
        return mgfml::detail::counts_of(y);
    } catch (const std::exception& e) {
        throw ConfigError("data.response", e.what());
    }
}

inline Design config_design(const RunConfig& c)
{
    try {
        return design_from_table(c.data.table, c.data.response, c.factors, c.group);
    } catch (const std::exception& e) {
        throw ConfigError("model.factors", e.what());
    }
}

inline bool is_integer(double v) { return v == std::floor(v); }

}  // namespace detail

/// Evaluates the marginal a config describes.
inline MarginalResult evaluate_config(const RunConfig& c)
{
    const auto& t = c.data.table;
    const auto col = t.column(c.data.response);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()));
    const auto m = y.size();

    if (c.kind == ModelKind::GammaHglm) {
        const auto d = detail::config_design(c);
        if (!c.coefficients) {
            throw ConfigError("model.coefficients", "required to evaluate a gamma-hglm marginal");
        }
        if (c.coefficients->size() != d.x.cols()) {
            throw ConfigError("model.coefficients", "needs " + std::to_string(d.x.cols()) + " entries");
        }
        const auto p = build_gamma_hglm(gamma_log_spec(d, *c.coefficients, c.alpha.front(), c.xi));
        return gamma_integer(p);
    }

    const bool shared = c.method == Method::Single;
    const auto constant_zeta = [&]() {
        if (!c.zeta) {
            return 1.0;
        }
        if (!(c.zeta->array() == (*c.zeta)(0)).all()) {
            throw ConfigError("model.zeta", "method single needs one common scaling");
        }
        return (*c.zeta)(0);
    };
    if (shared && c.priors.size() != 1) {
        throw ConfigError("model.priors", "method single takes exactly one prior");
    }
    if (shared && c.r) {
        throw ConfigError("model.r", "method single takes no r; use zeta for the common scaling");
    }

    if (c.kind == ModelKind::Poisson) {
        const auto yc = detail::counts(y);
        if (shared) {
            return poisson_single(c.priors.front(), yc, constant_zeta());
        }
        const PoissonProblem p{c.priors, c.r, c.zeta, yc};
        const bool hier = !c.r && (!c.zeta || c.zeta->isOnes(0.0)) && c.priors.size() == static_cast<std::size_t>(m);
        if (c.method == Method::Hier || (c.method == Method::Auto && hier)) {
            return poisson_hier(p);
        }
        if (c.method == Method::Integer) {
            throw ConfigError("model.method", "integer applies to gamma models");
        }
        return poisson_scaled(p);
    }

    Eigen::VectorXd alpha(m);
    if (c.alpha.size() == 1) {
        alpha.setConstant(c.alpha.front());
    } else {
        alpha = Eigen::Map<const Eigen::VectorXd>(c.alpha.data(), m);
    }
    if (shared) {
        if (c.alpha.size() != 1) {
            throw ConfigError("model.alpha", "method single needs one common shape");
        }
        return gamma_single(c.priors.front(), c.alpha.front(), detail::to_std(y), constant_zeta());
    }
    const GammaProblem p{c.priors, alpha, c.r, c.zeta, y};
    if (c.method == Method::Scaled) {
        throw ConfigError("model.method", "scaled applies to poisson models");
    }
    const bool diagonal = !c.r || mgfml::detail::is_diagonal(*c.r);
    const bool all_integer = (alpha.array() == alpha.array().floor()).all();
    if (c.method == Method::Hier || (c.method == Method::Auto && diagonal && c.priors.size() == static_cast<std::size_t>(m))) {
        return gamma_hier(p);
    }
    if (c.method == Method::Auto && !all_integer) {
        throw ConfigError("model.alpha", "coupled r needs integer shapes");
    }
    return gamma_integer(p);
}

inline int cmd_marginal(const std::string& config_path, const RunOptions& o, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr)
{
    return detail::guarded(err, [&] {
        const auto c = load_config(config_path, o.checks.seed);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = evaluate_config(c);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.format == Format::Records) {
            detail::ordered rec;
            rec["log_marginal"] = r.log_value;
            rec["sign"] = r.sign;
            rec["path"] = to_string(r.path);
            rec["orders"] = r.orders_used;
            rec["seconds"] = seconds;
            detail::emit(out, rec);
        } else {
            out << "data          " << c.data.description << '\n'
                << "log_marginal  " << detail::fmt(r.log_value) << '\n'
                << "marginal      " << detail::fmt_exp(r.log_value) << '\n'
                << "sign          " << (r.sign > 0 ? "+1" : "-1") << '\n'
                << "path          " << to_string(r.path) << '\n'
                << "orders       ";
            for (const double v : r.orders_used) {
                out << ' ' << v;
            }
            out << '\n' << "seconds       " << detail::fmt(seconds, 3) << '\n';
        }
        return kExitPass;
    });
}

inline int cmd_fit_mmle(const std::string& config_path, const RunOptions& o, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr)
{
    return detail::guarded(err, [&] {
        const auto c = load_config(config_path, o.checks.seed);
        if (c.kind != ModelKind::GammaHglm) {
            throw ConfigError("model.kind", "fit-mmle needs a gamma-hglm model");
        }
        if (!detail::is_integer(c.alpha.front())) {
            throw ConfigError("model.alpha", "fit-mmle needs an integer shape");
        }
        const auto d = detail::config_design(c);
        const auto fit = fit_gamma_hglm_mmle(d, c.alpha.front(), c.xi, {}, c.coefficients);
        if (o.format == Format::Records) {
            for (Eigen::Index k = 0; k < fit.a.size(); ++k) {
                detail::ordered rec;
                rec["coefficient"] = fit.names[static_cast<std::size_t>(k)];
                rec["estimate"] = fit.a(k);
                detail::emit(out, rec);
            }
            detail::ordered rec;
            rec["log_marginal"] = fit.log_marginal;
            rec["iterations"] = fit.iterations;
            rec["evaluations"] = fit.evaluations;
            rec["converged"] = fit.converged;
            detail::emit(out, rec);
        } else {
            out << "data         " << c.data.description << '\n';
            for (Eigen::Index k = 0; k < fit.a.size(); ++k) {
                out << "  " << std::left << std::setw(22) << fit.names[static_cast<std::size_t>(k)] << std::right
                    << detail::fmt(fit.a(k), 10) << '\n';
            }
            out << "log_marginal " << detail::fmt(fit.log_marginal) << '\n'
                << "iterations   " << fit.iterations << '\n'
                << "evaluations  " << fit.evaluations << '\n'
                << "converged    " << (fit.converged ? "yes" : "no (best so far shown)") << '\n';
        }
        return fit.converged ? kExitPass : kExitFailure;
    });
}

inline int cmd_example(int n, const RunOptions& o, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    if (n < 1 || n > 10) {
        err << "error: example number must be in 1..10\n";
        return kExitUsage;
    }
    return detail::guarded(err, [&] { return detail::report(out, run_example(n, o.checks), o); });
}

inline const std::vector<std::string>& verify_suites()
{
    static const std::vector<std::string> names = {"closed-forms", "quadrature", "monte-carlo", "properties"};
    return names;
}

inline int cmd_verify(const std::string& suite, const RunOptions& o, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr)
{
    return detail::guarded(err, [&] {
        std::vector<Check> checks;
        if (suite == "closed-forms") {
            checks = run_closed_form_suite(o.checks);
        } else if (suite == "quadrature") {
            checks = run_quadrature_suite(o.checks);
        } else if (suite == "monte-carlo") {
            checks = run_monte_carlo_suite(o.checks);
        } else if (suite == "properties") {
            checks = run_property_suite(o.checks);
        } else {
            err << "error: unknown suite '" << suite << "'\n";
            return kExitUsage;
        }
        return detail::report(out, checks, o);
    });
}

}  // namespace mgfml::app

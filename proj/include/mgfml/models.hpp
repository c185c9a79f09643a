#pragma once

// Regression specifications translated into marginalization problems, plus
// the data sources: the built-in pump data, CSV tables and a synthetic
// generator for cake-shaped split-plot data.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mgfml/errors.hpp"
#include "mgfml/marginalize.hpp"
#include "mgfml/mgf.hpp"
#include "mgfml/random.hpp"

namespace mgfml {

enum class Link { Identity, Log, Inverse };

struct Family {
    enum class Kind { Poisson, Gamma } kind = Kind::Poisson;
    /// Gamma shape alpha; unused for Poisson.
    double shape = 1.0;

    static Family poisson() { return {Kind::Poisson, 1.0}; }
    static Family gamma(double shape) { return {Kind::Gamma, shape}; }
};

/// Linear predictor X a + b plus random effects entering through z.
/// For the log links z is block membership (one indicator per row).
struct RegressionSpec {
    Eigen::MatrixXd x;
    Eigen::VectorXd a;
    /// Offsets, length m; zero when empty.
    Eigen::VectorXd b;
    /// m x q random-effect design.
    Eigen::MatrixXd z;
    Link link = Link::Log;
    Family family;
    PriorMgf random_prior = PriorMgf::gamma(1.0, 1.0);
    /// Observations: counts for Poisson, positive reals for gamma.
    Eigen::VectorXd y;
};

/// Random-effect prior of the gamma HGLM with the -log link.
inline PriorMgf hglm_gamma_prior(double xi)
{
    return PriorMgf::gamma(xi + 1.0, xi);
}

/// Pump failure counts and operating times (thousands of hours).
struct PumpData {
    static constexpr std::array<double, 10> t = {94.32, 15.72, 62.88, 125.76, 5.24,
                                                 31.44, 1.048, 1.048, 2.096,  10.48};
    static constexpr std::array<std::uint64_t, 10> y = {5, 1, 5, 14, 3, 19, 1, 1, 4, 22};

    static std::vector<double> times() { return {t.begin(), t.end()}; }
    static std::vector<std::uint64_t> counts() { return {y.begin(), y.end()}; }
    static Eigen::VectorXd times_vector() { return Eigen::Map<const Eigen::VectorXd>(t.data(), t.size()); }
};

namespace detail {

inline Eigen::VectorXd linear_predictor(const RegressionSpec& s)
{
    const Eigen::Index m = s.y.size();
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(m);
    if (s.x.size() > 0) {
        if (s.x.rows() != m || s.x.cols() != s.a.size()) {
            throw ShapeError("RegressionSpec: X must be m x p with a of length p");
        }
        eta += s.x * s.a;
    }
    if (s.b.size() > 0) {
        if (s.b.size() != m) {
            throw ShapeError("RegressionSpec: offset length differs from the number of observations");
        }
        eta += s.b;
    }
    return eta;
}

inline void check_z(const RegressionSpec& s)
{
    if (s.z.rows() != s.y.size() || s.z.cols() == 0) {
        throw ShapeError("RegressionSpec: Z must have one row per observation and at least one column");
    }
    if ((s.z.array() < 0.0).any() || !s.z.allFinite()) {
        throw ModelError("RegressionSpec: Z entries must be finite and non-negative");
    }
}

/// Log links need each observation in exactly one block with weight 1.
inline void check_membership(const RegressionSpec& s)
{
    check_z(s);
    for (Eigen::Index j = 0; j < s.z.rows(); ++j) {
        int ones = 0;
        for (Eigen::Index i = 0; i < s.z.cols(); ++i) {
            const double v = s.z(j, i);
            if (v == 1.0) {
                ++ones;
            } else if (v != 0.0) {
                ones = 2;
            }
        }
        if (ones != 1) {
            std::ostringstream msg;
            msg << "RegressionSpec: row " << j << " of Z is not a block indicator";
            throw ModelError(msg.str());
        }
    }
}

/// Rates Z theta + offsets: offsets become point-mass priors on extra
/// columns. Rejects offsets that allow a non-positive rate.
struct AffineParts {
    Eigen::MatrixXd r;
    std::vector<PriorMgf> priors;
};

inline AffineParts affine_parts(const RegressionSpec& s, const Eigen::VectorXd& offsets)
{
    check_z(s);
    const Eigen::Index m = s.z.rows();
    const Eigen::Index q = s.z.cols();
    std::vector<Eigen::Index> extra;
    for (Eigen::Index j = 0; j < m; ++j) {
        const bool covered = (s.z.row(j).array() > 0.0).any();
        if (offsets(j) < 0.0) {
            std::ostringstream msg;
            msg << "NegativeRateRisk: observation " << j << " has negative fixed part " << offsets(j)
                << "; its rate can fall below zero";
            throw ModelError(msg.str());
        }
        if (offsets(j) == 0.0 && !covered) {
            std::ostringstream msg;
            msg << "NegativeRateRisk: observation " << j << " has zero fixed part and no random effect";
            throw ModelError(msg.str());
        }
        if (offsets(j) > 0.0) {
            extra.push_back(j);
        }
    }
    AffineParts out;
    out.r = Eigen::MatrixXd::Zero(m, q + static_cast<Eigen::Index>(extra.size()));
    out.r.leftCols(q) = s.z;
    out.priors.assign(q, s.random_prior);
    for (std::size_t e = 0; e < extra.size(); ++e) {
        out.r(extra[e], q + static_cast<Eigen::Index>(e)) = 1.0;
        out.priors.push_back(PriorMgf::point_mass(offsets(extra[e])));
    }
    return out;
}

inline std::vector<std::uint64_t> counts_of(const Eigen::VectorXd& y)
{
    std::vector<std::uint64_t> out;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        const double v = y(j);
        if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
            std::ostringstream msg;
            msg << "Poisson response " << j << " is not a non-negative integer: " << v;
            throw ModelError(msg.str());
        }
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

}  // namespace detail

/// Log link, lambda = theta_block * exp(X a + b).
inline PoissonProblem build_poisson_log_hglm(const RegressionSpec& s)
{
    if (s.link != Link::Log || s.family.kind != Family::Kind::Poisson) {
        throw ModelError("build_poisson_log_hglm: needs the log link and a Poisson family");
    }
    detail::check_membership(s);
    const Eigen::VectorXd zeta = detail::linear_predictor(s).array().exp();
    return {std::vector<PriorMgf>(s.z.cols(), s.random_prior), s.z, zeta, detail::counts_of(s.y)};
}

/// Identity link, lambda = X a + b + Z theta; the fixed part enters as
/// point-mass priors.
inline PoissonProblem build_poisson_identity_glmm(const RegressionSpec& s)
{
    if (s.link != Link::Identity || s.family.kind != Family::Kind::Poisson) {
        throw ModelError("build_poisson_identity_glmm: needs the identity link and a Poisson family");
    }
    auto parts = detail::affine_parts(s, detail::linear_predictor(s));
    return {std::move(parts.priors), std::move(parts.r), std::nullopt, detail::counts_of(s.y)};
}

/// Gamma HGLM. Log link: rate = alpha theta_block exp(-X a - b).
/// Inverse link: rate = alpha (X a + b + Z theta), fixed part as point masses.
inline GammaProblem build_gamma_hglm(const RegressionSpec& s)
{
    if (s.family.kind != Family::Kind::Gamma) {
        throw ModelError("build_gamma_hglm: needs a gamma family");
    }
    const double alpha = s.family.shape;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ModelError("build_gamma_hglm: shape must be positive");
    }
    const Eigen::Index m = s.y.size();
    const bool integer_shape = alpha == std::floor(alpha);
    const Eigen::VectorXd eta = detail::linear_predictor(s);
    GammaProblem p{{}, Eigen::VectorXd::Constant(m, alpha), std::nullopt, std::nullopt, s.y};
    if (s.link == Link::Log) {
        detail::check_membership(s);
        if (!integer_shape && !detail::is_diagonal(s.z)) {
            throw ModelError("NonIntegerShapeWithCoupling: a fractional shape needs one random effect per observation");
        }
        p.priors.assign(s.z.cols(), s.random_prior);
        p.r = s.z;
        p.zeta = alpha * (-eta.array()).exp();
        return p;
    }
    if (s.link == Link::Inverse) {
        auto parts = detail::affine_parts(s, eta);
        if (!integer_shape && !detail::is_diagonal(parts.r)) {
            throw ModelError("NonIntegerShapeWithCoupling: a fractional shape needs one random effect per observation");
        }
        p.priors = std::move(parts.priors);
        p.r = std::move(parts.r);
        p.zeta = Eigen::VectorXd::Constant(m, alpha);
        return p;
    }
    throw ModelError("build_gamma_hglm: the identity link is not supported for gamma models");
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// Numeric CSV table.
struct Table {
    std::vector<std::string> names;
    /// rows[i][c]
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column_index(const std::string& name) const
    {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw ParseError("table has no column named '" + name + "'");
        }
        return static_cast<std::size_t>(it - names.begin());
    }

    [[nodiscard]] std::vector<double> column(const std::string& name) const
    {
        const auto c = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) {
            out.push_back(r[c]);
        }
        return out;
    }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            return out;
        }
        start = comma + 1;
    }
}

}  // namespace detail

/// Comma-separated table with a header row; every field must be numeric.
inline Table parse_table(std::istream& in, const std::string& source = "<input>")
{
    Table t;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << source << ":" << line_no << ": " << what;
        throw ParseError(msg.str());
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        auto fields = detail::split_csv_line(line);
        if (t.names.empty()) {
            for (const auto& f : fields) {
                if (f.empty()) {
                    fail("empty column name in header");
                }
                if (std::find(t.names.begin(), t.names.end(), f) != t.names.end()) {
                    fail("duplicate column name '" + f + "'");
                }
                t.names.push_back(f);
            }
            continue;
        }
        if (fields.size() != t.names.size()) {
            std::ostringstream what;
            what << "expected " << t.names.size() << " fields, found " << fields.size();
            fail(what.str());
        }
        std::vector<double> row;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto& f = fields[c];
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
                fail("column '" + t.names[c] + "': '" + f + "' is not a finite number");
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.names.empty()) {
        line_no = 0;
        fail("empty table (no header row)");
    }
    if (t.rows.empty()) {
        fail("table has a header but no data rows");
    }
    return t;
}

inline Table load_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open table '" + path + "'");
    }
    return parse_table(in, path);
}

inline void write_table(std::ostream& out, const Table& t)
{
    for (std::size_t c = 0; c < t.names.size(); ++c) {
        out << (c ? "," : "") << t.names[c];
    }
    out << "\n";
    out.precision(17);
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out << (c ? "," : "") << r[c];
        }
        out << "\n";
    }
}

/// Design extracted from a table: intercept plus treatment-coded indicators
/// of each factor (lowest level is the baseline) and block membership from
/// the group column (groups numbered in increasing order of their value).
struct Design {
    Eigen::MatrixXd x;
    Eigen::MatrixXd z;
    Eigen::VectorXd y;
    std::vector<std::size_t> group;
    std::vector<std::string> coefficient_names;
};

inline Design design_from_table(const Table& t, const std::string& response, const std::vector<std::string>& factors,
                                const std::string& group_column)
{
    const std::size_t m = t.rows.size();
    Design d;
    d.y = Eigen::Map<const Eigen::VectorXd>(t.column(response).data(), static_cast<Eigen::Index>(m));
    std::vector<std::vector<double>> levels;
    std::vector<std::vector<double>> values;
    std::size_t p = 1;
    d.coefficient_names.push_back("(intercept)");
    for (const auto& f : factors) {
        auto v = t.column(f);
        std::vector<double> lv = v;
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        for (std::size_t l = 1; l < lv.size(); ++l) {
            std::ostringstream name;
            name << f << "=" << lv[l];
            d.coefficient_names.push_back(name.str());
        }
        p += lv.size() - 1;
        levels.push_back(std::move(lv));
        values.push_back(std::move(v));
    }
    d.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
    d.x.col(0).setOnes();
    Eigen::Index col = 1;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto pos = std::lower_bound(levels[f].begin(), levels[f].end(), values[f][j]) - levels[f].begin();
            if (pos > 0) {
                d.x(static_cast<Eigen::Index>(j), col + pos - 1) = 1.0;
            }
        }
        col += static_cast<Eigen::Index>(levels[f].size()) - 1;
    }
    auto g = t.column(group_column);
    std::vector<double> glv = g;
    std::sort(glv.begin(), glv.end());
    glv.erase(std::unique(glv.begin(), glv.end()), glv.end());
    d.z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(glv.size()));
    for (std::size_t j = 0; j < m; ++j) {
        const auto pos = static_cast<std::size_t>(std::lower_bound(glv.begin(), glv.end(), g[j]) - glv.begin());
        d.group.push_back(pos);
        d.z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(pos)) = 1.0;
    }
    return d;
}

/// Gamma HGLM spec with the -log link for a design.
inline RegressionSpec gamma_log_spec(const Design& d, const Eigen::VectorXd& a, double alpha, double xi)
{
    RegressionSpec s;
    s.x = d.x;
    s.a = a;
    s.z = d.z;
    s.link = Link::Log;
    s.family = Family::gamma(alpha);
    s.random_prior = hglm_gamma_prior(xi);
    s.y = d.y;
    return s;
}

// ---------------------------------------------------------------------------
// Synthetic cake-shaped data
// ---------------------------------------------------------------------------

struct CakeTruth {
    /// intercept, recipe 2, recipe 3, temperatures 185..225
    Eigen::VectorXd a;
    double alpha = 45.0;
    double xi = 34.42982;
};

inline CakeTruth default_cake_truth()
{
    CakeTruth t;
    t.a.resize(8);
    t.a << 3.35, -0.04, -0.02, 0.03, 0.06, 0.11, 0.15, 0.19;
    return t;
}

/// Three recipes x six temperatures (175..225 step 10) x 15 replicates:
/// 270 rows with columns recipe, temperature, replication, angle.
/// Replicate g draws theta_g ~ Gamma(xi + 1, xi); each angle is
/// Gamma(alpha, alpha theta_g exp(-x a)). Replicate g uses the Philox
/// stream (seed, g).
inline Table generate_cake(std::uint64_t seed, const CakeTruth& truth = default_cake_truth())
{
    if (truth.a.size() != 8) {
        throw ShapeError("generate_cake: need 8 coefficients");
    }
    Table t;
    t.names = {"recipe", "temperature", "replication", "angle"};
    for (int rep = 1; rep <= 15; ++rep) {
        PhiloxStream g(seed, static_cast<std::uint64_t>(rep));
        const double theta = std::gamma_distribution<double>(truth.xi + 1.0, 1.0 / truth.xi)(g);
        for (int recipe = 1; recipe <= 3; ++recipe) {
            for (int ti = 0; ti < 6; ++ti) {
                double eta = truth.a(0);
                if (recipe > 1) {
                    eta += truth.a(recipe - 1);
                }
                if (ti > 0) {
                    eta += truth.a(2 + ti);
                }
                const double rate = truth.alpha * theta * std::exp(-eta);
                const double angle = std::gamma_distribution<double>(truth.alpha, 1.0 / rate)(g);
                t.rows.push_back({static_cast<double>(recipe), 175.0 + 10.0 * ti, static_cast<double>(rep), angle});
            }
        }
    }
    return t;
}

inline Design cake_design(const Table& t)
{
    return design_from_table(t, "angle", {"recipe", "temperature"}, "replication");
}

}  // namespace mgfml

#pragma once

// Run configuration: one JSON document with a `model` table and a `data`
// table holding exactly one source. Every validation error names the
// offending field by its dotted path. Format reference: docs/config.md.

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgfml/errors.hpp"
#include "mgfml/mgf.hpp"
#include "mgfml/models.hpp"

namespace mgfml::app {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("config field '" + field + "': " + what), field_(field)
    {
    }
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class ModelKind { Poisson, Gamma, GammaHglm };
enum class Method { Auto, Hier, Scaled, Single, Integer };

/// Data after resolving the source. Tables carry named columns; plain
/// sources carry just a response vector.
struct DataSource {
    enum class Kind { Inline, BuiltinPump, BuiltinCake, Csv } kind = Kind::Inline;
    std::string description;
    Table table;
    /// Response column name inside `table`.
    std::string response = "y";
    /// Exposure column, if any (pump: operating times).
    std::optional<std::string> exposure;
};

struct RunConfig {
    ModelKind kind = ModelKind::Poisson;
    Method method = Method::Auto;
    std::vector<PriorMgf> priors;
    std::optional<Eigen::MatrixXd> r;
    std::optional<Eigen::VectorXd> zeta;
    bool zeta_from_exposure = false;
    /// Gamma shapes: one value (broadcast) or one per observation.
    std::vector<double> alpha;
    // gamma-hglm fields
    double xi = 0.0;
    std::vector<std::string> factors;
    std::string group;
    std::optional<Eigen::VectorXd> coefficients;
    DataSource data;
};

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError(path + key, "missing");
    }
    return obj.at(key);
}

inline double number(const json& v, const std::string& path)
{
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError(path, "must be finite");
    }
    return d;
}

inline double positive(const json& v, const std::string& path)
{
    const double d = number(v, path);
    if (!(d > 0.0)) {
        throw ConfigError(path, "must be positive");
    }
    return d;
}

inline std::string string(const json& v, const std::string& path)
{
    if (!v.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    return v.get<std::string>();
}

inline std::vector<double> numbers(const json& v, const std::string& path)
{
    if (!v.is_array()) {
        throw ConfigError(path, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline Eigen::VectorXd vector(const json& v, const std::string& path)
{
    const auto xs = numbers(v, path);
    return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline Eigen::MatrixXd matrix(const json& v, const std::string& path)
{
    if (!v.is_array() || v.empty()) {
        throw ConfigError(path, "expected a non-empty array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
        rows.push_back(numbers(v[i], path + "[" + std::to_string(i) + "]"));
        if (rows.back().size() != rows.front().size() || rows.front().empty()) {
            throw ConfigError(path + "[" + std::to_string(i) + "]", "rows must be non-empty and of equal length");
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

inline PriorMgf prior(const json& v, const std::string& path)
{
    const std::string family = string(require(v, "family", path + "."), path + ".family");
    try {
        if (family == "gamma") {
            return PriorMgf::gamma(positive(require(v, "shape", path + "."), path + ".shape"),
                                   positive(require(v, "rate", path + "."), path + ".rate"));
        }
        if (family == "exponential") {
            return PriorMgf::exponential(positive(require(v, "rate", path + "."), path + ".rate"));
        }
        if (family == "pareto") {
            return PriorMgf::pareto(positive(require(v, "tail", path + "."), path + ".tail"),
                                    positive(require(v, "scale", path + "."), path + ".scale"));
        }
        if (family == "point-mass") {
            return PriorMgf::point_mass(number(require(v, "location", path + "."), path + ".location"));
        }
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".family", "unknown family '" + family + "' (gamma, exponential, pareto, point-mass)");
}

inline Table inline_table(const json& v, const std::string& path)
{
    Table t;
    if (v.is_array()) {
        t.names = {"y"};
        for (const double y : numbers(v, path)) {
            t.rows.push_back({y});
        }
    } else if (v.is_object()) {
        std::size_t len = 0;
        bool first = true;
        std::vector<std::vector<double>> cols;
        for (const auto& [name, col] : v.items()) {
            cols.push_back(numbers(col, path + "." + name));
            if (!first && cols.back().size() != len) {
                throw ConfigError(path + "." + name, "column length differs from the others");
            }
            len = cols.back().size();
            first = false;
            t.names.push_back(name);
        }
        for (std::size_t j = 0; j < len; ++j) {
            std::vector<double> row;
            for (const auto& c : cols) {
                row.push_back(c[j]);
            }
            t.rows.push_back(std::move(row));
        }
    } else {
        throw ConfigError(path, "expected an array of responses or an object of columns");
    }
    if (t.rows.empty()) {
        throw ConfigError(path, "no observations");
    }
    return t;
}

inline DataSource data_source(const json& v, std::uint64_t seed)
{
    if (!v.is_object()) {
        throw ConfigError("data", "expected a table");
    }
    const int sources = static_cast<int>(v.contains("inline")) + static_cast<int>(v.contains("builtin")) +
                        static_cast<int>(v.contains("csv"));
    if (sources != 1) {
        throw ConfigError("data", "exactly one of inline, builtin, csv is required");
    }
    DataSource d;
    if (v.contains("inline")) {
        d.kind = DataSource::Kind::Inline;
        d.description = "inline";
        d.table = inline_table(v.at("inline"), "data.inline");
    } else if (v.contains("builtin")) {
        const std::string name = string(v.at("builtin"), "data.builtin");
        if (name == "pump") {
            d.kind = DataSource::Kind::BuiltinPump;
            d.description = "builtin:pump";
            d.table.names = {"y", "t"};
            for (std::size_t j = 0; j < PumpData::y.size(); ++j) {
                d.table.rows.push_back({static_cast<double>(PumpData::y[j]), PumpData::t[j]});
            }
            d.exposure = "t";
        } else if (name == "cake") {
            d.kind = DataSource::Kind::BuiltinCake;
            d.description = "builtin:cake seed " + std::to_string(seed);
            d.table = generate_cake(seed);
            d.response = "angle";
        } else {
            throw ConfigError("data.builtin", "unknown dataset '" + name + "' (pump, cake)");
        }
    } else {
        const std::string path = string(v.at("csv"), "data.csv");
        d.kind = DataSource::Kind::Csv;
        d.description = path;
        try {
            d.table = load_table(path);
        } catch (const ParseError& e) {
            throw ConfigError("data.csv", e.what());
        }
    }
    if (v.contains("response")) {
        d.response = string(v.at("response"), "data.response");
    }
    if (v.contains("exposure")) {
        d.exposure = string(v.at("exposure"), "data.exposure");
    }
    const auto known = [&](const std::string& c) {
        return std::find(d.table.names.begin(), d.table.names.end(), c) != d.table.names.end();
    };
    if (!known(d.response)) {
        throw ConfigError("data.response", "no column '" + d.response + "'");
    }
    if (d.exposure && !known(*d.exposure)) {
        throw ConfigError("data.exposure", "no column '" + *d.exposure + "'");
    }
    return d;
}

inline void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& path)
{
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(path + key, "unknown field");
        }
    }
}

}  // namespace detail

/// Validates a parsed document. `seed` feeds the synthetic builtin datasets.
inline RunConfig parse_config(const json& doc, std::uint64_t seed = 42)
{
    using namespace detail;
    if (!doc.is_object()) {
        throw ConfigError("<root>", "expected a table");
    }
    reject_unknown(doc, {"model", "data"}, "");
    const json& model = require(doc, "model", "");
    if (!model.is_object()) {
        throw ConfigError("model", "expected a table");
    }
    reject_unknown(model,
                   {"kind", "method", "prior", "priors", "r", "zeta", "alpha", "xi", "factors", "group", "coefficients"},
                   "model.");
    RunConfig c;
    const std::string kind = string(require(model, "kind", "model."), "model.kind");
    if (kind == "poisson") {
        c.kind = ModelKind::Poisson;
    } else if (kind == "gamma") {
        c.kind = ModelKind::Gamma;
    } else if (kind == "gamma-hglm") {
        c.kind = ModelKind::GammaHglm;
    } else {
        throw ConfigError("model.kind", "unknown kind '" + kind + "' (poisson, gamma, gamma-hglm)");
    }
    c.data = data_source(require(doc, "data", ""), seed);
    const std::size_t m = c.data.table.rows.size();

    if (c.kind == ModelKind::GammaHglm) {
        c.alpha = {positive(require(model, "alpha", "model."), "model.alpha")};
        c.xi = positive(require(model, "xi", "model."), "model.xi");
        const json& f = require(model, "factors", "model.");
        if (!f.is_array()) {
            throw ConfigError("model.factors", "expected an array of column names");
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            c.factors.push_back(string(f[i], "model.factors[" + std::to_string(i) + "]"));
        }
        c.group = string(require(model, "group", "model."), "model.group");
        if (model.contains("coefficients")) {
            c.coefficients = vector(model.at("coefficients"), "model.coefficients");
        }
        return c;
    }

    if (model.contains("method")) {
        const std::string method = string(model.at("method"), "model.method");
        if (method == "auto") {
            c.method = Method::Auto;
        } else if (method == "hier") {
            c.method = Method::Hier;
        } else if (method == "scaled") {
            c.method = Method::Scaled;
        } else if (method == "single") {
            c.method = Method::Single;
        } else if (method == "integer") {
            c.method = Method::Integer;
        } else {
            throw ConfigError("model.method", "unknown method '" + method + "' (auto, hier, scaled, single, integer)");
        }
    }
    if (model.contains("prior") == model.contains("priors")) {
        throw ConfigError("model.prior", "give exactly one of prior, priors");
    }
    if (model.contains("priors")) {
        const json& ps = model.at("priors");
        if (!ps.is_array() || ps.empty()) {
            throw ConfigError("model.priors", "expected a non-empty array");
        }
        for (std::size_t i = 0; i < ps.size(); ++i) {
            c.priors.push_back(prior(ps[i], "model.priors[" + std::to_string(i) + "]"));
        }
    } else {
        const auto p = prior(model.at("prior"), "model.prior");
        // One prior: a single shared parameter under `single`, one iid copy
        // per observation (or per column of r) otherwise.
        std::size_t copies = m;
        if (c.method == Method::Single) {
            copies = 1;
        } else if (model.contains("r")) {
            copies = static_cast<std::size_t>(matrix(model.at("r"), "model.r").cols());
        }
        c.priors.assign(copies, p);
    }
    if (model.contains("r")) {
        c.r = matrix(model.at("r"), "model.r");
        if (static_cast<std::size_t>(c.r->rows()) != m) {
            throw ConfigError("model.r", "needs one row per observation (" + std::to_string(m) + ")");
        }
    }
    if (model.contains("zeta")) {
        const json& z = model.at("zeta");
        if (z.is_string()) {
            if (z.get<std::string>() != "exposure") {
                throw ConfigError("model.zeta", "the only string value is \"exposure\"");
            }
            if (!c.data.exposure) {
                throw ConfigError("model.zeta", "\"exposure\" needs data.exposure or builtin:pump");
            }
            c.zeta_from_exposure = true;
        } else if (z.is_number()) {
            c.zeta = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), positive(z, "model.zeta"));
        } else {
            c.zeta = vector(z, "model.zeta");
            if (static_cast<std::size_t>(c.zeta->size()) != m) {
                throw ConfigError("model.zeta", "needs one entry per observation (" + std::to_string(m) + ")");
            }
        }
    } else if (c.data.exposure) {
        c.zeta_from_exposure = true;
    }
    if (c.zeta_from_exposure) {
        const auto col = c.data.table.column(*c.data.exposure);
        c.zeta = Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()));
    }
    if (c.kind == ModelKind::Gamma) {
        const json& a = require(model, "alpha", "model.");
        if (a.is_array()) {
            c.alpha = numbers(a, "model.alpha");
            if (c.alpha.size() != m) {
                throw ConfigError("model.alpha", "needs one entry per observation (" + std::to_string(m) + ")");
            }
        } else {
            c.alpha = {number(a, "model.alpha")};
        }
        for (const double v : c.alpha) {
            if (!(v > 0.0)) {
                throw ConfigError("model.alpha", "shapes must be positive");
            }
        }
    } else if (model.contains("alpha")) {
        throw ConfigError("model.alpha", "only gamma models take a shape");
    }
    return c;
}

inline RunConfig load_config(const std::string& path, std::uint64_t seed = 42)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("--config", "cannot open '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(doc, seed);
}

}  // namespace mgfml::app

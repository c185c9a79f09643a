#include <catch_amalgamated.hpp>
#include <cmath>
#include <string>

#include "mgfml/app/commands.hpp"
#include "mgfml/app/config.hpp"

using namespace mgfml;
using namespace mgfml::app;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const std::string kConfigs = MGFML_TEST_DATA_DIR "/../../configs/";

std::string field_of(const json& doc)
{
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("shipped configs parse", "[config]")
{
    for (const char* name : {"pump.json", "example1.json", "overlap.json", "pump-pareto.json", "half-order.json",
                             "cake.json", "constant-response.json"}) {
        INFO(name);
        CHECK_NOTHROW(load_config(kConfigs + name));
    }
    const auto pump = load_config(kConfigs + "pump.json");
    CHECK(pump.priors.size() == 10);
    CHECK(pump.zeta_from_exposure);
    REQUIRE(pump.zeta);
    CHECK((*pump.zeta)(0) == 94.32);

    const auto overlap = load_config(kConfigs + "overlap.json");
    CHECK(overlap.priors.size() == 3);
    CHECK(overlap.r->rows() == 5);

    const auto single = load_config(kConfigs + "half-order.json");
    CHECK(single.method == Method::Single);
    CHECK(single.priors.size() == 1);
    CHECK(single.alpha == std::vector<double>{0.5});
}

TEST_CASE("evaluated configs match frozen references", "[config]")
{
    const auto ex1 = evaluate_config(load_config(kConfigs + "example1.json"));
    CHECK_THAT(ex1.log_value, WithinAbs(std::log(0.48225308641975308642), 1e-12));

    const auto pump = evaluate_config(load_config(kConfigs + "pump.json"));
    CHECK_THAT(pump.log_value, WithinAbs(-35.823753515312173928, 1e-9));
}

TEST_CASE("validation errors name the field", "[config]")
{
    CHECK_THROWS_WITH(load_config(kConfigs + "malformed.json"), ContainsSubstring("model.prior.rate"));
    CHECK_THROWS_AS(load_config(kConfigs + "does-not-exist.json"), ConfigError);

    const json base = json::parse(R"({"model": {"kind": "poisson", "prior": {"family": "gamma", "shape": 1, "rate": 1}},
                                      "data": {"inline": [1, 2]}})");
    CHECK(field_of(base) == "<accepted>");

    auto doc = base;
    doc["extra"] = 1;
    CHECK(field_of(doc) == "extra");

    doc = base;
    doc["model"]["kind"] = "binomial";
    CHECK(field_of(doc) == "model.kind");

    doc = base;
    doc["model"]["priors"] = json::array({doc["model"]["prior"]});
    CHECK(field_of(doc) == "model.prior");

    doc = base;
    doc["model"]["prior"]["shape"] = -1;
    CHECK(field_of(doc) == "model.prior.shape");

    doc = base;
    doc["model"]["zeta"] = json::array({1.0});
    CHECK(field_of(doc) == "model.zeta");

    doc = base;
    doc["model"]["zeta"] = "exposure";
    CHECK(field_of(doc) == "model.zeta");

    doc = base;
    doc["model"]["r"] = json::array({json::array({1.0})});
    CHECK(field_of(doc) == "model.r");

    doc = base;
    doc["model"]["alpha"] = 2;
    CHECK(field_of(doc) == "model.alpha");

    doc = base;
    doc["model"]["kind"] = "gamma";
    CHECK(field_of(doc) == "model.alpha");
    doc["model"]["alpha"] = 0;
    CHECK(field_of(doc) == "model.alpha");
}

TEST_CASE("data needs exactly one source", "[config]")
{
    json doc = json::parse(R"({"model": {"kind": "poisson", "prior": {"family": "exponential", "rate": 1}},
                               "data": {}})");
    CHECK(field_of(doc) == "data");
    doc["data"]["inline"] = json::array({1});
    doc["data"]["builtin"] = "pump";
    CHECK(field_of(doc) == "data");
    doc["data"].erase("inline");
    CHECK(field_of(doc) == "<accepted>");
    doc["data"]["builtin"] = "iris";
    CHECK(field_of(doc) == "data.builtin");
    doc["data"] = json::parse(R"({"inline": {"y": [1, 2]}, "response": "count"})");
    CHECK(field_of(doc) == "data.response");
}

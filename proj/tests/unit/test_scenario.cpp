// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "u6g/scenario.hpp"

using namespace u6g;
using doctest::Approx;

TEST_CASE("defaults")
{
    ScenarioConfig c;
    c.geostats_path = "x.json";
    CHECK(c.problems().empty());
    // one site per three hexagonal cells of side 150 m
    CHECK(c.macro_density() == Approx(1.0 / (3.0 * 1.5 * std::sqrt(3.0) * 150.0 * 150.0)));
    // 181.76 km2 of city
    CHECK(c.city_q() == Approx(155.47).epsilon(1e-3));
    CHECK(std::abs(c.city_q() - 155.5) < 0.5);
    CHECK(c.city_elevation() == Approx(37.50501081104002).epsilon(1e-9));
    CHECK(c.macro_array.eirp_dbm() == Approx(58.12359947967774));
}

TEST_CASE("parsing")
{
    auto c = parse_scenario(R"({
        "method": "GSMI", "seed": 9, "outdoor_fraction": 0.5,
        "city": {"q_override": 12},
        "arrays": {"reference_config": 2},
        "modes": ["DP", "GR"],
        "occurrence_override": {"DP": 0.7},
        "inputs": {"geostats": "stats.json"}
    })",
                            "/data");
    CHECK(c.method == Method::GSMI);
    CHECK(c.seed == 9);
    CHECK(c.outdoor_fraction == 0.5);
    CHECK(c.city_q() == 12.0);
    CHECK(c.macro_array.n_v == 16);
    CHECK(c.modes.size() == 2);
    CHECK(c.occurrence_override.at(ModeTag::DP) == 0.7);
    CHECK(c.geostats_path == "/data/stats.json");

    auto back = parse_scenario(scenario_to_json(c), "/elsewhere");
    CHECK(back.seed == 9);
    CHECK(back.macro_array.n_v == 16);
    CHECK(back.geostats_path == "/data/stats.json");
    CHECK(back.occurrence_override.at(ModeTag::DP) == 0.7);
}

TEST_CASE("every problem is reported at once")
{
    try {
        parse_scenario(R"({"frequency_hz": -1, "outdoor_fraction": 2, "bogus": 1,
                           "inputs": {"geostats": "g.json"}})");
        FAIL("invalid config accepted");
    } catch (const ValidationError& e) {
        const std::string m = e.what();
        CHECK(m.find("3 problems") != std::string::npos);
        CHECK(m.find("frequency_hz") != std::string::npos);
        CHECK(m.find("outdoor_fraction") != std::string::npos);
        CHECK(m.find("bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scenario("{}"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("{not json"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"seed": "x", "inputs": {"geostats": "g"}})"), ValidationError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/s.json"), IoError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "riverdp/config.hpp"
#include "riverdp/csv.hpp"
#include "riverdp/runner.hpp"

using namespace riverdp;

TEST_CASE("config parsing with sections, comments and overrides") {
    ConfigMap map = ConfigMap::parse_string(
        "[run]\n"
        "problem = fishery   # choose the solver\n"
        "seed = 7\n"
        "[fishery]\n"
        "w3 = 3.0\n");
    map.apply_override("fishery.w3=10");
    RunConfig rc = build_run_config(map);
    CHECK(rc.problem == "fishery");
    CHECK(rc.seed == 7);
    CHECK(rc.fishery.w3 == 10.0);
}

TEST_CASE("unknown keys are rejected with their full name") {
    ConfigMap map = ConfigMap::parse_string(
        "[run]\nproblem = fishery\n[fishery]\nw9 = 1\n");
    CHECK_THROWS_WITH_AS(build_run_config(map), doctest::Contains("fishery.w9"),
                         ConfigError);
}

TEST_CASE("invariant violations name the offending keys") {
    ConfigMap map = ConfigMap::parse_string(
        "[run]\nproblem = reservoir\n[reservoir]\nq_min = 300\nq_max = 200\n");
    CHECK_THROWS_WITH_AS(build_run_config(map),
                         doctest::Contains("reservoir.q_min"), ConfigError);
    try {
        ConfigMap again = ConfigMap::parse_string(
            "[run]\nproblem = reservoir\n[reservoir]\nq_min = 300\nq_max = 200\n");
        build_run_config(again);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("reservoir.q_max") != std::string::npos);
    }
}

TEST_CASE("number lists parse bracketed and bare forms") {
    ConfigMap map = ConfigMap::parse_string(
        "[coupled]\na_coeffs = [0, 0.5, 1, 2]\noutput_times = 0, 30\n");
    auto a = map.take_number_list("coupled", "a_coeffs", {});
    auto t = map.take_number_list("coupled", "output_times", {});
    REQUIRE(a.size() == 4);
    CHECK(a[2] == 1.0);
    REQUIRE(t.size() == 2);
    CHECK(t[1] == 30.0);
}

TEST_CASE("malformed inputs raise config errors") {
    CHECK_THROWS_AS(ConfigMap::parse_string("[run\nproblem = x\n"), ConfigError);
    CHECK_THROWS_AS(ConfigMap::parse_string("key = 1\n"), ConfigError);
    ConfigMap map = ConfigMap::parse_string("[run]\nseed = abc\n");
    CHECK_THROWS_AS(build_run_config(map), ConfigError);
    ConfigMap bad;
    CHECK_THROWS_AS(bad.apply_override("no_dot=3"), ConfigError);
}

TEST_CASE("unknown problem selector is rejected") {
    ConfigMap map = ConfigMap::parse_string("[run]\nproblem = pond\n");
    CHECK_THROWS_AS(build_run_config(map), ConfigError);
}

TEST_CASE("round-trip float formatting") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -2.5e17}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("chain presets match the configured regime count") {
    ReservoirConfig rc;
    rc.regimes = 61;
    auto chain = make_reservoir_chain(rc);
    CHECK(chain.n_regimes() == 61);
    CHECK(chain.discharge(0) == doctest::Approx(3.75));

    rc.regimes = 10;
    CHECK_THROWS_AS(make_reservoir_chain(rc), ConfigError);

    CoupledConfig cc;
    cc.regimes = 5;
    cc.discharges = "coupled5";
    auto small = make_coupled_chain(cc);
    CHECK(small.n_regimes() == 5);
    CHECK(small.discharge(1) == doctest::Approx(27.5));
}

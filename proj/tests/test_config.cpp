#include <doctest.h>

#include <cmath>

#include "fdmix/config.hpp"
#include "fdmix/errors.hpp"

using namespace fdmix;
using doctest::Approx;

namespace {

std::string error_key(const std::string& text) {
    try {
        parse_config_string(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults are the reference scenario") {
    const RunConfig c = default_config();
    const RadioEnvironment t = reference_environment();
    CHECK(c.scenario.env.bs_density == t.bs_density);
    CHECK(c.scenario.env.noise_dl == t.noise_dl);
    CHECK(c.scenario.env.noise_ul == t.noise_ul);
    CHECK(c.scenario.env.link_bs_ue.attenuation == t.link_bs_ue.attenuation);
    CHECK(c.scenario.env.link_bs_ue.exponent == t.link_bs_ue.exponent);
    CHECK(watt_to_dbm(c.scenario.power.p_bs) == Approx(24.0));
    CHECK(watt_to_dbm(c.scenario.power.p_ue) == Approx(23.0));
    CHECK(c.scenario.power.sic_db == 110.0);
    CHECK(c.scenario.coverage_threshold_db == -8.0);
    CHECK(c.scenario.mix.rho_f == 0.5);
    CHECK(c.sweep.rho_f_grid.size() == 21);
    CHECK(c.sweep.power_pairs.size() == 3);
    CHECK(c.window.tagging == TaggingRule::CentralCell);
    CHECK(c.benchmark_budget == 0.03);
    CHECK(c.entries.size() == config_keys().size());
}

TEST_CASE("sections, comments and conversions") {
    const RunConfig c = parse_config_string(
        "# a comment\n"
        "environment.lambda_b = 2e-3   # trailing comment\n"
        "[powers]\n"
        "p_bs_dbm = 30\n"
        "sic_db = inf\n"
        "eps = 0.5\n"
        "[links]\n"
        "ue_ue.slope_db = 40\n"
        "[mix]\n"
        "rho_f = 1\n"
        "rho_d = 0\n"
        "rho_u = 0\n"
        "[simulation]\n"
        "tagging = uniform\n"
        "drops = 123\n");
    CHECK(c.scenario.env.bs_density == 2e-3);
    CHECK(c.scenario.power.p_bs == Approx(1.0));
    CHECK(std::isinf(c.scenario.power.sic_db));
    CHECK(c.scenario.power.power_control_eps == 0.5);
    CHECK(c.scenario.env.link_ue_ue.exponent == Approx(4.0));
    CHECK(c.scenario.mix.rho_f == 1.0);
    CHECK(c.window.tagging == TaggingRule::UniformCell);
    CHECK(c.window.num_drops == 123);
    CHECK(c.sweep.base.env.bs_density == 2e-3);
}

TEST_CASE("canonical dump round trip and hash") {
    RunConfig c = parse_config_string("powers.p_ue_dbm = 10.5\nsweep.rho_f_grid = 0, 0.25 ,1\n");
    const std::string dump = canonical_dump(c);
    const RunConfig d = parse_config_string(dump);
    CHECK(canonical_dump(d) == dump);
    CHECK(scenario_hash(d) == scenario_hash(c));
    CHECK(d.sweep.rho_f_grid == std::vector<double>{0.0, 0.25, 1.0});
    CHECK(scenario_hash(c).size() == 16);
    CHECK(scenario_hash(c) != scenario_hash(default_config()));
    CHECK(c.sweep.scenario_hash == scenario_hash(c));

    // Thread count changes nothing in the results, so it stays out of the hash.
    RunConfig t = c;
    set_value(t, "simulation.threads", "7");
    CHECK(scenario_hash(t) == scenario_hash(c));
    set_value(t, "simulation.seed", "7");
    CHECK(scenario_hash(t) != scenario_hash(c));

    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("errors name the key") {
    CHECK(error_key("powers.p_bs_dbm = loud\n") == "powers.p_bs_dbm");
    CHECK(error_key("[powers]\np_bs_dbm = \n") == "powers.p_bs_dbm");
    CHECK(error_key("environment.lambda_x = 1\n") == "environment.lambda_x");
    CHECK(error_key("mix.rho_f = 0.5\nmix.rho_f = 0.5\n") == "mix.rho_f");
    CHECK(error_key("mix.rho_f = 0.7\n") == "mix");
    CHECK(error_key("mix.rho_f = 1.5\n") == "mix.rho_f");
    CHECK(error_key("links.bs_ue.slope_db = 15\n") == "links.bs_ue.slope_db");
    CHECK(error_key("sweep.engine = abacus\n") == "sweep.engine");
    CHECK(error_key("sweep.metrics = ase_dl,bogus\n") == "sweep.metrics");
    CHECK(error_key("simulation.drops = -3\n") == "simulation.drops");
    CHECK(error_key("simulation.tagging = random\n") == "simulation.tagging");
    CHECK(error_key("sweep.power_pairs = 24-23\n") == "sweep.power_pairs");
    CHECK(error_key("metrics.interference_limited = maybe\n") == "metrics.interference_limited");
    CHECK(error_key("just some words\n") == "just some words");
    CHECK(error_key("[powers\n") == "[powers");
    CHECK_THROWS_AS(load_config("/nonexistent/fdmix.conf"), ConfigError);
    RunConfig c = default_config();
    CHECK_THROWS_AS(set_value(c, "powers.nothing", "1"), ConfigError);
}

TEST_CASE("messages carry source and line") {
    try {
        parse_config_string("\n\npowers.p_ue_dbm = x\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("powers.p_ue_dbm") != std::string::npos);
        CHECK(what.find(":3:") != std::string::npos);
    }
}

}  // TEST_SUITE

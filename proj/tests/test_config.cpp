#include <doctest.h>

#include <sstream>
#include <string>

#include "hybridavg/config.hpp"

using namespace hybridavg;

namespace {

const char* kModel =
    "[model]\n"
    "x_in = 7\nD = 0.1\nV = 1\nalpha = 0.5\nbeta = 1\ngamma = 1\nmu_max = 0.15\nmu_half = 1\n";

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_run_config(is, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("bundled configuration encodes the reference setup") {
  const RunConfig c = load_run_config(std::string(HYBRIDAVG_CONFIG_DIR) + "/paper4.cfg");
  CHECK(c.model == reference_params());
  CHECK(c.epsilons == std::vector<double>{1.0, 0.5, 0.1, 0.0});
  CHECK(c.x0 == 10.0);
  CHECK(c.n0 == 30);
  CHECK(c.t_obs == 20.0);
  CHECK(c.replications == 10000);
  CHECK_FALSE(c.master_seed.has_value());
  CHECK(c.m_list == std::vector<Count>{1, 5, 10, 30});
  CHECK(c.ode.method == OdeMethod::adaptive);
  CHECK(c.out_dir == "out");
}

TEST_CASE("model section alone falls back to defaults") {
  const RunConfig c = parse(kModel);
  CHECK(c.model == reference_params());
  CHECK(c.replications == 10000);
  CHECK(c.observable == Observable::state_at_time);
}

TEST_CASE("comments, lists and enumerations") {
  const RunConfig c = parse(std::string(kModel) +
                            "# comment line\n[simulation]\n"
                            "epsilon = 0.25 , 0   # trailing\n"
                            "t_end = 35\nobservable = absorption\nmaster_seed = 9\nmethod = rk4\n"
                            "[analysis]\nm = 0, 2\n");
  CHECK(c.epsilons == std::vector<double>{0.25, 0.0});
  CHECK(c.t_end == 35.0);
  CHECK(c.t_obs == 35.0);
  CHECK(c.observable == Observable::absorption_time);
  CHECK(c.master_seed == 9u);
  CHECK(c.ode.method == OdeMethod::rk4);
  CHECK(c.m_list == std::vector<Count>{0, 2});
}

TEST_CASE("a missing model key is named") {
  std::string text = kModel;
  text.erase(text.find("x_in = 7\n"), 9);
  CHECK(error_of(text) == "test.cfg: missing required key model.x_in");
}

TEST_CASE("bad values name the line and key") {
  CHECK(error_of(std::string(kModel) + "[simulation]\nx0 = -3\n") ==
        "test.cfg:11: simulation.x0: must be strictly positive, got '-3'");
  CHECK(error_of(std::string(kModel) + "[simulation]\nreplications = many\n") ==
        "test.cfg:11: simulation.replications: expected an integer, got 'many'");
  CHECK(error_of(std::string(kModel) + "[simulation]\nepsilon = 1, 2\n").find(
            "test.cfg:11: simulation.epsilon") == 0);
  CHECK(error_of(std::string(kModel) + "[simulation]\nobservable = mean\n").find(
            "simulation.observable") != std::string::npos);
}

TEST_CASE("structural errors are reported") {
  CHECK(error_of(std::string(kModel) + "[model]\nD = 0.2\n") == "test.cfg:11: model.D: duplicate key");
  CHECK(error_of(std::string(kModel) + "[simulation]\nspeed = 3\n") ==
        "test.cfg:11: simulation.speed: unknown key");
  CHECK(error_of(std::string(kModel) + "[plots]\n") == "test.cfg:10: unknown section [plots]");
  CHECK(error_of(std::string(kModel) + "[simulation]\njust words\n") ==
        "test.cfg:11: expected 'key = value'");
  CHECK(error_of("x_in = 7\n").find("key outside of any section") != std::string::npos);
}

TEST_CASE("unreadable files are configuration errors") {
  CHECK_THROWS_AS(load_run_config("/nonexistent/run.cfg"), ConfigError);
}

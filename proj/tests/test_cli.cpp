#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "glc/report.hpp"

using glc::RunConfig;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json minimal() {
  return json{{"seed", 7}};
}

}  // namespace

TEST_CASE("config round trip: parse(emit(config)) == config") {
  json j = minimal();
  j["experiment"] = "observability";
  j["weights"] = {{"mu", 4.0}};
  RunConfig c = glc::parse_config(j);
  RunConfig back = glc::parse_config(glc::config_to_json(c));
  CHECK(back == c);
  CHECK(c.weights.mu == 4.0);
  CHECK(c.weights.lambda == 40.0);  // untouched defaults survive
}

TEST_CASE("unknown keys are fatal and name the key") {
  json j = minimal();
  j["lamda"] = 3.0;
  CHECK_THROWS_WITH_AS((void)glc::parse_config(j), doctest::Contains("lamda"),
                       std::invalid_argument);
  json j2 = minimal();
  j2["weights"] = {{"mu", 3.0}, {"lamda", 2.0}};
  CHECK_THROWS_WITH_AS((void)glc::parse_config(j2), doctest::Contains("weights.lamda"),
                       std::invalid_argument);
}

TEST_CASE("seed is mandatory") {
  json j;
  j["experiment"] = "mms";
  CHECK_THROWS_WITH_AS((void)glc::parse_config(j), doctest::Contains("seed"),
                       std::invalid_argument);
}

TEST_CASE("overrides reach nested keys and reject unknown paths") {
  RunConfig c = glc::parse_config(minimal());
  glc::apply_override(c, "weights.mu=5.5");
  CHECK(c.weights.mu == 5.5);
  glc::apply_override(c, "seed=11");
  CHECK(c.seed == 11);
  glc::apply_override(c, "ensemble.r_list=0,1,2,3");
  CHECK(c.ensemble.r_list == std::vector<double>{0.0, 1.0, 2.0, 3.0});
  glc::apply_override(c, "hum.record_history=true");
  CHECK(c.hum.record_history);
  CHECK_THROWS_WITH_AS(glc::apply_override(c, "weights.lamda=2"), doctest::Contains("lamda"),
                       std::invalid_argument);
  CHECK_THROWS_AS(glc::apply_override(c, "no_equals_sign"), std::invalid_argument);
}

TEST_CASE("unknown experiment is a validation error") {
  RunConfig c = glc::parse_config(minimal());
  c.experiment = "does-not-exist";
  CHECK_THROWS_AS((void)glc::run_experiment(c), std::invalid_argument);
}

TEST_CASE("mms experiment runs end to end and emits its report") {
  RunConfig c = glc::parse_config(minimal());
  c.experiment = "mms";
  c.mms.nx = 12;
  c.mms.nt = 4;
  c.output = "cli_out/mms_test";
  glc::RunReport rep = glc::run_experiment(c);
  CHECK(rep.payload["order_space"].get<double>() > 1.5);
  CHECK(rep.payload["order_time"].get<double>() > 1.5);
  glc::emit_report(rep, c.output);
  std::string js = slurp("cli_out/mms_test.json");
  CHECK(js.find("order_space") != std::string::npos);
  std::string csv = slurp("cli_out/mms_test.orders.csv");
  CHECK(csv.rfind("direction,level,error\n", 0) == 0);
  std::remove("cli_out/mms_test.json");
  std::remove("cli_out/mms_test.orders.csv");
}

TEST_CASE("verify-identity experiment: small run passes and reports rows") {
  RunConfig c = glc::parse_config(minimal());
  c.experiment = "verify-identity";
  c.identity.configs = 12;
  c.identity.points = 10;
  c.output = "cli_out/vid_test";
  glc::RunReport rep = glc::run_experiment(c);
  CHECK(rep.payload["pass"].get<bool>());
  REQUIRE(rep.tables.size() == 1);
  CHECK(rep.tables[0].rows.size() == 12);
}

TEST_CASE("observability experiment is byte-deterministic from the seed") {
  RunConfig c = glc::parse_config(minimal());
  c.experiment = "observability";
  c.grid.nx = 40;
  c.grid.nt = 30;
  c.ensemble.size = 4;
  c.output = "cli_out/obs_a";
  glc::RunReport r1 = glc::run_experiment(c);
  glc::emit_report(r1, "cli_out/obs_a");
  glc::RunReport r2 = glc::run_experiment(c);
  glc::emit_report(r2, "cli_out/obs_b");
  CHECK(slurp("cli_out/obs_a.ratios.csv") == slurp("cli_out/obs_b.ratios.csv"));
  std::remove("cli_out/obs_a.ratios.csv");
  std::remove("cli_out/obs_b.ratios.csv");
  std::remove("cli_out/obs_a.json");
  std::remove("cli_out/obs_b.json");
}

TEST_CASE("17 significant digits survive the CSV round trip") {
  glc::RunReport rep;
  rep.config = glc::parse_config(minimal());
  rep.config.experiment = "mms";
  glc::CsvTable t;
  t.name = "probe";
  t.columns = {"v"};
  double v = 0.1234567890123456789;
  t.rows.push_back({v});
  rep.tables.push_back(t);
  glc::emit_report(rep, "cli_out/digits");
  std::string csv = slurp("cli_out/digits.probe.csv");
  auto nl = csv.find('\n');
  double back = std::stod(csv.substr(nl + 1));
  CHECK(back == v);
  std::remove("cli_out/digits.probe.csv");
  std::remove("cli_out/digits.json");
}

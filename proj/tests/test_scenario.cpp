#include <cmath>
#include <sstream>

#include <doctest.h>

#include "rcmap/error.hpp"
#include "rcmap/scenario.hpp"

using namespace rcmap;
using namespace rcmap::scenario;

namespace {

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

std::string csv(const Table& t) {
  std::ostringstream out;
  t.write_csv(out);
  return out.str();
}

}  // namespace

TEST_CASE("log grid") {
  const auto g = log_grid(1e-3, 1.0, 40);
  CHECK(g.size() == 121);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 1.0 / 40)));
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 10), Error);
  CHECK_THROWS_AS(log_grid(1.0, 0.5, 10), Error);
}

TEST_CASE("config parsing") {
  const auto c = config_from_json(nlohmann::json::parse(R"({
    "scenario": "demon-sweep", "model": "model2",
    "params": {"gamma_s": 2e-5},
    "sweep": {"axis": "beta_ratio", "min": 1, "max": 1000},
    "flags": {"lamb_shift": true}, "output": "x.csv", "workers": 3})"));
  CHECK(c.kind == Kind::demon_sweep);
  CHECK(c.model == fock::ModelVariant::model2);
  CHECK(c.params.gamma_s == 2e-5);
  CHECK(c.params.delta_s == 0.01);
  REQUIRE(c.sweep);
  CHECK(c.sweep->axis == Axis::beta_ratio);
  CHECK(c.sweep->points_per_decade == 40);
  CHECK(c.flags.lamb_shift);
  CHECK_FALSE(c.flags.secular);
  CHECK(c.workers == 3);

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"scenario": "nope"})")), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"sweep": {"axis": "U", "min": 1, "max": 2}})")), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"sweep": {"axis": "gamma_s", "min": -1, "max": 2}})")), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"set": {"colour": 1}})")), Error);
}

TEST_CASE("demon sweep is deterministic and ordered regardless of workers") {
  auto c = config_from_json(nlohmann::json::parse(R"({
    "scenario": "demon-sweep", "model": "model1",
    "sweep": {"axis": "delta_s", "min": 1e-3, "max": 1e-1, "points_per_decade": 3}})"));
  c.workers = 1;
  const auto a = run_scenario(c);
  c.workers = 3;
  const auto b = run_scenario(c);
  CHECK(csv(a) == csv(b));
  CHECK(a.failures == 0);
  REQUIRE(a.rows.size() == 7);
  const auto d = column(a, "Delta_S");
  for (std::size_t i = 1; i < a.rows.size(); ++i) CHECK(std::stod(a.rows[i][d]) > std::stod(a.rows[i - 1][d]));
  for (const char* name : {"I_M/Gamma_S", "baseline_I_M/Gamma_S", "MI", "eps_s", "U", "V", "Gamma_D", "cutoff", "error"}) {
    CHECK_NOTHROW(column(a, name));
  }
  for (const auto& r : a.rows) {
    CHECK(r.size() == a.header.size());
    CHECK(r[column(a, "error")].empty());
  }
}

TEST_CASE("per-point failures are recorded and the run continues") {
  auto c = config_from_json(nlohmann::json::parse(R"({
    "scenario": "demon-sweep", "model": "dqdmd",
    "sweep": {"axis": "beta_gamma", "min": 1e-2, "max": 1e-1, "points_per_decade": 2}})"));
  const auto t = run_scenario(c);
  CHECK(t.rows.size() == 3);
  CHECK(t.failures == 3);
  CHECK_FALSE(t.rows[0][column(t, "error")].empty());
  CHECK(t.rows[0][column(t, "I_M")] == "nan");
}

TEST_CASE("benchmark-set rows") {
  auto c = config_from_json(nlohmann::json::parse(R"({
    "scenario": "benchmark-set", "sweep": {"axis": "beta_gamma", "min": 1e-2, "max": 1e-2}})"));
  const auto t = run_scenario(c);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.failures == 0);
  const double exact = std::stod(t.rows[0][column(t, "I_M_exact")]);
  const double rcme = std::stod(t.rows[0][column(t, "I_M_rcme")]);
  CHECK(exact == doctest::Approx(1.8132242490197e-3).epsilon(1e-8));
  CHECK(std::abs(rcme / exact - 1) < 0.05);
  CHECK(std::stod(t.rows[0][column(t, "rel_err")]) == doctest::Approx(std::abs(rcme / exact - 1)));
}

TEST_CASE("map-sd and chain on a tabulated file") {
  auto c = config_from_json(
      nlohmann::json::parse(R"({"scenario": "map-sd", "sd": {"kind": "tabulated", "file": "lorentzian.csv"}})"),
      RCMAP_TEST_DATA);
  const auto t = run_scenario(c);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.header == std::vector<std::string>{"n", "lambda", "E", "truncated_weight"});
  CHECK(std::stod(t.rows[0][2]) == doctest::Approx(1.0).epsilon(1e-6));

  c.kind = Kind::chain;
  c.steps = 4;
  CHECK(run_scenario(c).rows.size() == 4);

  c.sd.reset();
  CHECK_THROWS_AS(run_scenario(c), Error);
}

TEST_CASE("report carries the imbalance flag") {
  ScenarioConfig c;
  const auto j = run_report(c);
  CHECK(j.at("sd_imbalance").at("formula").get<double>() == doctest::Approx(3.25));
  CHECK(j.at("sd_imbalance").at("consistent") == false);
  CHECK(j.at("params").at("beta_ratio") == 300.0);
}

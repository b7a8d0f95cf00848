#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2dshare/experiments.hpp"
#include "d2dshare/scenario_json.hpp"

using namespace d2dshare;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("bundled scenarios load", "[experiments]") {
  const Config sym = load_config(std::string(D2DSHARE_SCENARIO_DIR) + "/section4_symmetric.json");
  CHECK(sym.scenario.shared.eps_dbm == -72.0);
  CHECK(sym.scenario.operators[0].tau == 0.3);
  CHECK(sym.mc.trials == 10000);

  const Config asym = load_config(std::string(D2DSHARE_SCENARIO_DIR) + "/section4_asymmetric.json");
  CHECK(asym.scenario.operators[1].lambda_d ==
        Catch::Approx(0.8 * asym.scenario.operators[1].lambda_b));
  // absent keys fall back to the reference defaults
  CHECK(asym.scenario.shared.d == 30.0);
  CHECK(asym.scenario.operators[1].tau == 0.3);
}

TEST_CASE("config rejection modes", "[experiments]") {
  {
    const auto p = temp_file("d2dshare_empty.json");
    std::ofstream(p).close();
    CHECK_THROWS_AS(load_config(p.string()), ParseError);
  }
  {
    try {
      parse_config(nlohmann::json::parse(R"({"operators":[{"tau":2.0},{}]})"));
      FAIL("expected InvalidFraction");
    } catch (const InvalidFraction& e) {
      CHECK(e.path == "/operators/0/tau");
    }
  }
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"sharedX":{}})")), ValidationError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"shared":{"lambdaX":1}})")),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"operators":[{}]})")), ValidationError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"shared":{"d":"thirty"}})")),
                  ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/nope.json"), ParseError);
}

TEST_CASE("csv format and atomicity", "[experiments]") {
  experiments::Table t{{"a", "b"}, {{1.0, 0.123456789012345}, {2.0, 3.0}}};
  const auto p = temp_file("d2dshare_table.csv");
  experiments::write_csv(p.string(), t);
  const std::string body = read_file(p);
  CHECK(body == "a,b\n1,0.123456789\n2,3\n");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  fs::remove(p);
}

TEST_CASE("mc_validate is byte-identical across worker counts", "[experiments]") {
  Config cfg;
  cfg.scenario = default_scenario();
  cfg.mc.trials = 1200;
  cfg.mc.seed = 42;
  const auto p1 = temp_file("d2dshare_mc1.csv");
  const auto p4 = temp_file("d2dshare_mc4.csv");
  experiments::run_experiment(cfg, experiments::Kind::mc_validate, p1.string(), 1);
  experiments::run_experiment(cfg, experiments::Kind::mc_validate, p4.string(), 4);
  CHECK(read_file(p1) == read_file(p4));
  CHECK(read_file(p1).substr(0, 41) == "gamma,analytic,empirical,ci_lo,ci_hi\n0.01");
  fs::remove(p1);
  fs::remove(p4);
}

TEST_CASE("convergence trace is written and valid", "[experiments]") {
  Config cfg;
  cfg.scenario = default_scenario();
  const auto p = temp_file("d2dshare_conv.csv");
  experiments::run_experiment(cfg, experiments::Kind::convergence, p.string(), 2);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,beta_1,beta_2,u_1,u_2");
  int rows = 0;
  double b1 = -1, b2 = -1;
  for (std::string line; std::getline(in, line); ++rows) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double it, u1, u2;
    ls >> it >> b1 >> b2 >> u1 >> u2;
    CHECK((b1 >= 0.0 && b1 <= 1.0));
    CHECK((b2 >= 0.0 && b2 <= 1.0));
  }
  CHECK(rows >= 3);

  // emitted NE satisfies the partition identity for both operators
  RateEngine engine(cfg.scenario);
  for (int i = 0; i < 2; ++i) {
    const auto region = feasible_region(engine, i);
    const double beta_i = i == 0 ? b1 : b2;
    SpectrumPartition part{region.beta_c, 1.0 - region.beta_c - beta_i, beta_i};
    CHECK_NOTHROW(part.validate());
  }
  fs::remove(p);
}

TEST_CASE("symmetric load point yields equal gains", "[experiments]") {
  // the lambda2d = 1.0 row of the load sweep, computed directly
  Config cfg;
  cfg.scenario = default_scenario();
  cfg.scenario.shared.eps_dbm = -72.0;
  RateEngine engine(cfg.scenario);
  const GameState state = find_equilibrium(engine, {0.0, 0.0}, cfg.solver);
  REQUIRE(state.converged);
  const auto gains = sharing_gain(state);
  CHECK(gains[0] == Catch::Approx(gains[1]).margin(1e-9));
}

TEST_CASE("unknown experiment name is rejected", "[experiments]") {
  CHECK_THROWS_AS(experiments::parse_kind("frequency_hopping"), ValidationError);
  CHECK(experiments::parse_kind("gain_vs_load") == experiments::Kind::gain_vs_load);
}

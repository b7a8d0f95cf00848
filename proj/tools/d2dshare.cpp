#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "d2dshare/errors.hpp"
#include "d2dshare/experiments.hpp"
#include "d2dshare/scenario_json.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-operator D2D spectrum-sharing experiments"};

  std::string config_path, experiment, output_path;
  std::int64_t seed = -1;
  int trials = -1;
  double tol = -1.0;
  int workers = 0;

  app.add_option("--config", config_path, "Scenario JSON file")->required();
  app.add_option("--experiment", experiment,
                 "One of: convergence, beta_vs_eps, gain_vs_eps, gain_vs_load, "
                 "mc_validate, diagnostics")
      ->required();
  app.add_option("--output", output_path, "Output CSV path")->required();
  app.add_option("--seed", seed, "Override mc.seed");
  app.add_option("--trials", trials, "Override mc.trials");
  app.add_option("--tol", tol, "Override solver.ne_tol (br_tol follows at tol/10)");
  app.add_option("--workers", workers, "Worker threads (default: hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    d2dshare::Config cfg = d2dshare::load_config(config_path);
    if (seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(seed);
    if (trials > 0) cfg.mc.trials = trials;
    if (tol > 0.0) {
      cfg.solver.ne_tol = tol;
      cfg.solver.br_tol = tol / 10.0;
    }
    const auto kind = d2dshare::experiments::parse_kind(experiment);
    d2dshare::experiments::run_experiment(cfg, kind, output_path, workers);
  } catch (const d2dshare::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const d2dshare::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const d2dshare::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

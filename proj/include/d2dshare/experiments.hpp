#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "d2dshare/coverage.hpp"
#include "d2dshare/game.hpp"
#include "d2dshare/montecarlo.hpp"
#include "d2dshare/parallel.hpp"
#include "d2dshare/scenario_json.hpp"

namespace d2dshare::experiments {

enum class Kind { convergence, beta_vs_eps, gain_vs_eps, gain_vs_load, mc_validate, diagnostics };

inline Kind parse_kind(const std::string& name) {
  if (name == "convergence") return Kind::convergence;
  if (name == "beta_vs_eps") return Kind::beta_vs_eps;
  if (name == "gain_vs_eps") return Kind::gain_vs_eps;
  if (name == "gain_vs_load") return Kind::gain_vs_load;
  if (name == "mc_validate") return Kind::mc_validate;
  if (name == "diagnostics") return Kind::diagnostics;
  throw ValidationError("unknown experiment: " + name, "/experiment");
}

// Locale-independent, 10 significant digits.
inline std::string format_value(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Written atomically: temp file in the target directory, then rename. No
// partial final output survives a failure.
inline void write_csv(const std::string& path, const Table& table) {
  const std::string tmp = path + ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw Error("cannot open output file: " + tmp);
      for (std::size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << table.header[c];
      out << "\n";
      for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
          out << (c ? "," : "") << format_value(row[c]);
        out << "\n";
      }
      if (!out) throw Error("failed writing: " + tmp);
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

namespace detail {

inline GameState solve(const Scenario& sc, const SolverOptions& solver, BandRegistry* registry) {
  RateEngine engine(sc, {.registry = registry});
  GameState state = find_equilibrium(engine, {0.0, 0.0}, solver);
  if (!state.converged) throw NoConvergence("best response iteration did not converge");
  return state;
}

inline Table convergence(const Config& cfg) {
  RateEngine engine(cfg.scenario);
  const GameState state = find_equilibrium(engine, {0.0, 0.0}, cfg.solver);
  if (!state.converged) throw NoConvergence("best response iteration did not converge");
  Table t{{"iteration", "beta_1", "beta_2", "u_1", "u_2"}, {}};
  for (const auto& row : state.trace)
    t.rows.push_back({static_cast<double>(row.iteration), row.beta_1, row.beta_2, row.u_1, row.u_2});
  return t;
}

inline Table eps_sweep(const Config& cfg, bool emit_gains, int workers) {
  std::vector<double> eps;
  for (int e = -80; e <= -60; ++e) eps.push_back(e);
  std::vector<std::vector<double>> rows(eps.size());
  BandRegistry registry;
  parallel_for(eps.size(), workers, [&](std::size_t k) {
    Scenario sc = cfg.scenario;
    sc.shared.eps_dbm = eps[k];
    const GameState state = solve(sc, cfg.solver, &registry);
    if (emit_gains) {
      const auto g = sharing_gain(state);
      rows[k] = {eps[k], g[0], g[1]};
    } else {
      rows[k] = {eps[k], state.ne[0], state.ne[1]};
    }
  });
  Table t;
  t.header = emit_gains ? std::vector<std::string>{"eps", "gain_1", "gain_2"}
                        : std::vector<std::string>{"eps", "beta_1_star", "beta_2_star"};
  t.rows = std::move(rows);
  return t;
}

inline Table gain_vs_load(const Config& cfg, int workers) {
  std::vector<double> ratio;
  for (int k = 2; k <= 16; ++k) ratio.push_back(k / 10.0);
  std::vector<std::vector<double>> rows(ratio.size());
  BandRegistry registry;
  parallel_for(ratio.size(), workers, [&](std::size_t k) {
    Scenario sc = cfg.scenario;
    sc.shared.eps_dbm = -72.0;
    sc.operators[1].lambda_d = ratio[k] * sc.operators[1].lambda_b;
    const GameState state = solve(sc, cfg.solver, &registry);
    const auto g = sharing_gain(state);
    rows[k] = {ratio[k], g[0], g[1], state.ne[0], state.ne[1]};
  });
  return {{"lambda2d", "gain_1", "gain_2", "beta_1_star", "beta_2_star"}, std::move(rows)};
}

inline Table mc_validate(const Config& cfg, int workers) {
  std::vector<double> gammas;
  for (int k = -6; k <= 6; ++k) gammas.push_back(std::pow(10.0, k / 3.0));
  const double beta_total = 0.5;

  const auto modes = compute_modes(cfg.scenario);
  mc::McOptions opt = cfg.mc;
  opt.workers = workers;
  const auto empirical = mc::estimate_coverage(cfg.scenario, beta_total, gammas, opt);

  Table t{{"gamma", "analytic", "empirical", "ci_lo", "ci_hi"}, {}};
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const double analytic = d2d_coverage(gammas[k], beta_total, modes[0].shared.q,
                                         cfg.scenario.shared.lambda, modes[0].shared.delta,
                                         cfg.scenario.shared);
    t.rows.push_back(
        {gammas[k], analytic, empirical[k].coverage, empirical[k].ci_lo, empirical[k].ci_hi});
  }
  return t;
}

inline Table diagnostics(const Config& cfg) {
  RateEngine engine(cfg.scenario);
  const auto grid = interior_grid(engine, 10);
  const auto report = verify_properties(engine, grid);
  Table t{{"beta_1", "beta_2", "own_1", "cross_1", "own_2", "cross_2", "intra_curv_1",
           "intra_curv_2", "ok"},
          {}};
  for (const auto& row : report.rows)
    t.rows.push_back({row.beta_1, row.beta_2, row.own[0], row.cross[0], row.own[1], row.cross[1],
                      row.intra_curv[0], row.intra_curv[1], row.ok ? 1.0 : 0.0});
  return t;
}

}  // namespace detail

inline void run_experiment(const Config& cfg, Kind kind, const std::string& out_path,
                           int workers = 0) {
  if (workers <= 0) workers = default_workers();
  Table table;
  switch (kind) {
    case Kind::convergence: table = detail::convergence(cfg); break;
    case Kind::beta_vs_eps: table = detail::eps_sweep(cfg, false, workers); break;
    case Kind::gain_vs_eps: table = detail::eps_sweep(cfg, true, workers); break;
    case Kind::gain_vs_load: table = detail::gain_vs_load(cfg, workers); break;
    case Kind::mc_validate: table = detail::mc_validate(cfg, workers); break;
    case Kind::diagnostics: table = detail::diagnostics(cfg); break;
  }
  write_csv(out_path, table);
}

}  // namespace d2dshare::experiments

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "d2dshare/coverage.hpp"
#include "d2dshare/errors.hpp"
#include "d2dshare/model.hpp"

namespace d2dshare {

struct SolverOptions {
  double br_tol = 1e-6;  // golden-section interval tolerance
  double ne_tol = 1e-5;  // stop when both strategies move less than this
  int max_iter = 100;
};

// Strategy-space box for one operator: beta_c fixed by the cellular rate
// equality, beta_d >= beta_d_min by the intra-D2D rate floor.
struct FeasibleRegion {
  double beta_c = 0.0;
  double beta_d_min = 0.0;
  double upper = 0.0;  // u_i = 1 - beta_c - beta_d_min
};

inline FeasibleRegion feasible_region(const RateEngine& engine, int i) {
  const auto& op = engine.scenario().operators[i];
  const double r_c = engine.cellular_spectral_efficiency(i);
  FeasibleRegion region;
  region.beta_c = op.tau / r_c;
  if (region.beta_c > 1.0)
    throw CellularInfeasible("cellular rate target exceeds capacity: beta_c > 1");

  const double hi = 1.0 - region.beta_c;
  auto g = [&](double x) { return x == 0.0 ? 0.0 : x * engine.intra_spectral_efficiency(i, x); };
  if (op.mu_d == 0.0) {
    region.beta_d_min = 0.0;
  } else {
    if (g(hi) < op.mu_d)
      throw IntraD2DInfeasible("intra-operator D2D rate floor infeasible without sharing");
    double lo = 0.0, up = hi;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + up);
      (g(mid) >= op.mu_d ? up : lo) = mid;
    }
    region.beta_d_min = up;
  }
  region.upper = 1.0 - region.beta_c - region.beta_d_min;
  return region;
}

// U_i at strategy (beta_i, beta_j) given the operator's beta_c; the intra
// fraction absorbs the remainder.
inline double utility(const RateEngine& engine, int i, double beta_i, double beta_j,
                      const FeasibleRegion& region,
                      std::optional<double> shared_q_override = std::nullopt) {
  SpectrumPartition p{region.beta_c, 1.0 - region.beta_c - beta_i, beta_i};
  if (shared_q_override)
    return engine.evaluate_rates_shared_q(i, p, beta_j, *shared_q_override).u;
  return engine.evaluate_rates(i, p, beta_j).u;
}

// Argmax of the concave U_i over [0, u_i] by golden-section search. Flat
// optima (within 1e-9) resolve to the smallest maximizer.
inline double best_response(const RateEngine& engine, int i, double beta_j,
                            const FeasibleRegion& region, double br_tol = 1e-6) {
  double lo = 0.0, hi = region.upper;
  if (hi <= 0.0) return 0.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double b) { return utility(engine, i, b, beta_j, region); };
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > br_tol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = f(d);
    }
  }
  double best = 0.5 * (lo + hi);
  if (best > 0.0 && f(0.0) >= f(best) - 1e-9) best = 0.0;
  return best;
}

// Sequential best responses, operator 1 first. Baselines are evaluated at
// (0, 0) with multi-operator traffic routed through the BSs (q -> 0 in Q_s).
inline GameState find_equilibrium(const RateEngine& engine,
                                  std::array<double, 2> initial = {0.0, 0.0},
                                  const SolverOptions& opt = {}, bool operator1_first = true) {
  const std::array<FeasibleRegion, 2> regions{feasible_region(engine, 0),
                                              feasible_region(engine, 1)};
  GameState state;
  for (int i = 0; i < 2; ++i)
    state.baseline[i] = utility(engine, i, 0.0, 0.0, regions[i], 0.0);

  double b1 = std::clamp(initial[0], 0.0, regions[0].upper);
  double b2 = std::clamp(initial[1], 0.0, regions[1].upper);
  auto record = [&](int k) {
    state.trace.push_back({k, b1, b2, utility(engine, 0, b1, b2, regions[0]),
                           utility(engine, 1, b2, b1, regions[1])});
  };
  record(0);
  for (int k = 1; k <= opt.max_iter; ++k) {
    const double prev1 = b1, prev2 = b2;
    if (operator1_first) {
      b1 = best_response(engine, 0, b2, regions[0], opt.br_tol);
      b2 = best_response(engine, 1, b1, regions[1], opt.br_tol);
    } else {
      b2 = best_response(engine, 1, b1, regions[1], opt.br_tol);
      b1 = best_response(engine, 0, b2, regions[0], opt.br_tol);
    }
    record(k);
    if (std::max(std::abs(b1 - prev1), std::abs(b2 - prev2)) < opt.ne_tol) {
      state.converged = true;
      break;
    }
  }
  state.ne = {b1, b2};
  const double u1 = state.trace.back().u_1;
  const double u2 = state.trace.back().u_2;
  state.agreement = state.converged && u1 >= state.baseline[0] && u2 >= state.baseline[1];
  return state;
}

// Relative utility gain of each operator at the NE versus no sharing.
inline std::array<double, 2> sharing_gain(const GameState& state) {
  const double u1 = state.trace.back().u_1;
  const double u2 = state.trace.back().u_2;
  return {(u1 - state.baseline[0]) / state.baseline[0],
          (u2 - state.baseline[1]) / state.baseline[1]};
}

// Central finite-difference checks of the concavity / sub-modularity /
// dominance structure on a strategy grid, plus the curvature of the
// intra-D2D rate term backing the constraint side of the argument.
struct DiagnosticsRow {
  double beta_1 = 0.0, beta_2 = 0.0;
  std::array<double, 2> own{};         // d2 U_i / d beta_i^2
  std::array<double, 2> cross{};       // d2 U_i / d beta_i d beta_j
  std::array<double, 2> intra_curv{};  // d2 (beta_d R_d) / d beta_d^2
  bool ok = true;
};

struct DiagnosticsReport {
  std::vector<DiagnosticsRow> rows;
  bool all_ok = true;
  bool cross_checked = true;  // false when w = 0 degrades the check
  std::optional<DiagnosticsRow> first_violation;
};

inline DiagnosticsReport verify_properties(const RateEngine& engine,
                                           const std::vector<std::array<double, 2>>& grid,
                                           double step = 1e-4) {
  const std::array<FeasibleRegion, 2> regions{feasible_region(engine, 0),
                                              feasible_region(engine, 1)};
  DiagnosticsReport report;
  const double h = step;
  for (const auto& point : grid) {
    DiagnosticsRow row;
    row.beta_1 = point[0];
    row.beta_2 = point[1];
    for (int i = 0; i < 2; ++i) {
      const double bi = point[i], bj = point[1 - i];
      if (!(bi - h > 0.0 && bi + h < regions[i].upper))
        throw DomainError("verify_properties: grid point too close to the region boundary");
      auto U = [&](double x, double y) { return utility(engine, i, x, y, regions[i]); };
      row.own[i] = (U(bi + h, bj) - 2.0 * U(bi, bj) + U(bi - h, bj)) / (h * h);
      row.cross[i] =
          (U(bi + h, bj + h) - U(bi + h, bj - h) - U(bi - h, bj + h) + U(bi - h, bj - h)) /
          (4.0 * h * h);
      const double bd = 1.0 - regions[i].beta_c - bi;
      auto g = [&](double x) { return x * engine.intra_spectral_efficiency(i, x); };
      row.intra_curv[i] = (g(bd + h) - 2.0 * g(bd) + g(bd - h)) / (h * h);

      const bool coupled = engine.modes(i).w > 0.0;
      bool ok_i = row.own[i] < 0.0 && row.intra_curv[i] < 0.0;
      if (coupled) ok_i = ok_i && row.cross[i] < 0.0 && std::abs(row.own[i]) > std::abs(row.cross[i]);
      else report.cross_checked = false;
      row.ok = row.ok && ok_i;
    }
    if (!row.ok && !report.first_violation) report.first_violation = row;
    report.all_ok = report.all_ok && row.ok;
    report.rows.push_back(row);
  }
  return report;
}

// Uniform interior lattice covering both feasible boxes.
inline std::vector<std::array<double, 2>> interior_grid(const RateEngine& engine, int points_per_axis,
                                                        double margin = 5e-4) {
  const std::array<FeasibleRegion, 2> regions{feasible_region(engine, 0),
                                              feasible_region(engine, 1)};
  std::vector<std::array<double, 2>> grid;
  grid.reserve(static_cast<std::size_t>(points_per_axis) * points_per_axis);
  for (int ix = 0; ix < points_per_axis; ++ix) {
    for (int iy = 0; iy < points_per_axis; ++iy) {
      const double fx = (ix + 1.0) / (points_per_axis + 1.0);
      const double fy = (iy + 1.0) / (points_per_axis + 1.0);
      grid.push_back({margin + fx * (regions[0].upper - 2.0 * margin),
                      margin + fy * (regions[1].upper - 2.0 * margin)});
    }
  }
  return grid;
}

}  // namespace d2dshare

#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "d2dshare/errors.hpp"
#include "d2dshare/model.hpp"
#include "d2dshare/pathloss.hpp"
#include "d2dshare/units.hpp"

namespace d2dshare {

// Distance at which a single interferer's received power equals the
// threshold: received power < eps  <=>  separation > delta.
inline double hardcore_distance(double eps_dbm, double pt_dbm, const PathlossModel& model) {
  return invert(model, pt_dbm - eps_dbm);
}

// Matern type-II retention probability, V = pi delta^2.
inline double retention(double lambda, double delta) {
  if (!(lambda >= 0.0) || !(delta >= 0.0)) throw DomainError("retention: negative argument");
  const double x = lambda * pi() * delta * delta;
  if (x < 1e-12) return 1.0 - 0.5 * x;  // series limit, q(0) = 1
  return -std::expm1(-x) / x;
}

// Cellular-mode load and BS activity for one operator given the D2D-mode
// fractions of its intra band (q_d) and the shared band (q).
inline std::pair<double, double> cellular_mode_load(const OperatorParams& op,
                                                    const SharedParams& shared, double q_d,
                                                    double q) {
  const double load =
      op.lambda_c + (1.0 - q_d) * op.lambda_d + (1.0 - q) * shared.lambda / 2.0;
  const double alpha = std::min(1.0, load / op.lambda_b);
  return {load, alpha};
}

// w_i = lambda / (lambda + 2 lambda_i^d): fraction of an operator's D2D
// users that are multi-operator.
inline double multiop_ratio(double lambda, double lambda_d) {
  if (lambda == 0.0 && lambda_d == 0.0) throw BothZero("multiop_ratio: lambda and lambda_d both zero");
  return lambda / (lambda + 2.0 * lambda_d);
}

// Mode-selection outcomes for both bands of one operator.
struct OperatorModes {
  ModeSelectionOutcome intra;
  ModeSelectionOutcome shared;
  double w = 0.0;
};

inline std::array<OperatorModes, 2> compute_modes(const Scenario& sc) {
  const double delta_s = hardcore_distance(sc.shared.eps_dbm, sc.shared.pt_d_dbm, sc.shared.pl_d2d);
  const double q_s = retention(sc.shared.lambda, delta_s);

  std::array<OperatorModes, 2> out;
  for (int i = 0; i < 2; ++i) {
    const auto& op = sc.operators[i];
    auto& m = out[i];
    m.intra.delta = hardcore_distance(op.eps_d_dbm, sc.shared.pt_d_dbm, sc.shared.pl_d2d);
    m.intra.q = retention(op.lambda_d, m.intra.delta);
    m.shared.delta = delta_s;
    m.shared.q = q_s;
    auto [load, alpha] = cellular_mode_load(op, sc.shared, m.intra.q, q_s);
    m.intra.cellular_mode_density = (1.0 - m.intra.q) * op.lambda_d;
    m.shared.cellular_mode_density = (1.0 - q_s) * sc.shared.lambda / 2.0;
    m.intra.alpha = m.shared.alpha = alpha;
    m.w = multiop_ratio(sc.shared.lambda, op.lambda_d);
    (void)load;
  }
  return out;
}

}  // namespace d2dshare

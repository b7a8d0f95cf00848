#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "d2dshare/errors.hpp"
#include "d2dshare/pathloss.hpp"

namespace d2dshare {

// Per-operator densities, targets and thresholds.
struct OperatorParams {
  int id = 1;                 // {1, 2}
  double lambda_b = 0.0;      // BS density, m^-2
  double lambda_c = 0.0;      // cellular-user density, m^-2
  double lambda_d = 0.0;      // intra-operator D2D transmitter density, m^-2
  double tau = 0.0;           // normalized cellular target rate
  double mu_d = 0.0;          // intra-operator D2D rate floor
  double eps_d_dbm = 0.0;     // intra-operator mode-selection threshold
  double nu = 1.0;            // cellular active-time portion
};

// Parameters common to both operators.
struct SharedParams {
  double lambda = 0.0;        // multi-operator D2D transmitter density, m^-2
  double eps_dbm = 0.0;       // shared-band mode-selection threshold
  double d = 0.0;             // D2D pair distance, m
  double pt_d_dbm = 0.0;      // D2D transmit power
  double pt_c_dbm = 0.0;      // cellular transmit power
  double noise_dbm = 0.0;     // sigma^2 over the full cellular band
  PathlossModel pl_cellular;
  PathlossModel pl_d2d;
};

// Fractions of one operator's band: cellular / intra-D2D / shared contribution.
struct SpectrumPartition {
  double beta_c = 0.0;
  double beta_d = 0.0;
  double beta = 0.0;

  void validate() const {
    for (double v : {beta_c, beta_d, beta})
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidFraction("spectrum fraction outside [0,1]");
    if (std::abs(beta_c + beta_d + beta - 1.0) > 1e-9)
      throw InvalidFraction("spectrum fractions do not sum to 1");
  }
};

// Result of threshold-based mode selection for one band (and, for the
// operator-level fields, the resulting cellular load and BS activity).
struct ModeSelectionOutcome {
  double delta = 0.0;                  // hardcore distance, m
  double q = 1.0;                      // fraction selecting D2D mode
  double cellular_mode_density = 0.0;  // m^-2
  double alpha = 0.0;                  // BS activity probability
};

// Spectral efficiencies, rates and utility for one operator at one profile.
struct RateReport {
  double r_c = 0.0, r_d = 0.0, r_shared = 0.0;
  double q_c = 0.0, q_d = 0.0, q_s = 0.0;
  double u = 0.0;
  double w = 0.0;
};

struct Scenario {
  std::array<OperatorParams, 2> operators;
  SharedParams shared;
};

// Best-response iteration trace and outcome.
struct GameState {
  struct TraceRow {
    int iteration = 0;
    double beta_1 = 0.0, beta_2 = 0.0;
    double u_1 = 0.0, u_2 = 0.0;
  };
  std::vector<TraceRow> trace;
  bool converged = false;
  std::array<double, 2> ne{0.0, 0.0};
  std::array<double, 2> baseline{0.0, 0.0};
  bool agreement = false;
};

namespace detail {

inline void check_operator(const OperatorParams& op, const std::string& where) {
  if (!(op.lambda_b > 0.0)) throw InvalidDensity("lambda_b must be > 0", where + "/lambda_b");
  if (!(op.lambda_c >= 0.0)) throw InvalidDensity("lambda_c must be >= 0", where + "/lambda_c");
  if (!(op.lambda_d >= 0.0)) throw InvalidDensity("lambda_d must be >= 0", where + "/lambda_d");
  if (!(op.tau > 0.0 && op.tau < 1.0)) throw InvalidFraction("tau must be in (0,1)", where + "/tau");
  if (!(op.mu_d >= 0.0 && op.mu_d < 1.0))
    throw InvalidFraction("mu_d must be in [0,1)", where + "/mu_d");
  if (!(op.nu > 0.0 && op.nu <= 1.0)) throw InvalidFraction("nu must be in (0,1]", where + "/nu");
  if (!std::isfinite(op.eps_d_dbm)) throw ValidationError("eps_d_dbm must be finite", where + "/eps_d_dbm");
}

inline void check_pathloss(const PathlossModel& m, const std::string& where) {
  if (!(m.slope_db_per_decade > 20.0))
    throw PathlossTooFlat("slope must exceed 20 dB/decade for convergent interference", where + "/slope");
  if (!std::isfinite(m.intercept_db)) throw ValidationError("intercept must be finite", where + "/intercept");
}

}  // namespace detail

// Checks every type invariant; throws naming the offending field.
inline Scenario validate_scenario(const Scenario& sc) {
  detail::check_operator(sc.operators[0], "/operators/0");
  detail::check_operator(sc.operators[1], "/operators/1");
  const auto& sh = sc.shared;
  if (!(sh.lambda >= 0.0)) throw InvalidDensity("lambda must be >= 0", "/shared/lambda");
  if (!(sh.d > 0.0)) throw ValidationError("d must be > 0", "/shared/d");
  const std::pair<double, const char*> finite_fields[] = {{sh.eps_dbm, "eps_dbm"},
                                                          {sh.pt_d_dbm, "pt_d_dbm"},
                                                          {sh.pt_c_dbm, "pt_c_dbm"},
                                                          {sh.noise_dbm, "noise_dbm"}};
  for (const auto& [v, name] : finite_fields)
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite",
                                                 std::string("/shared/") + name);
  detail::check_pathloss(sh.pl_cellular, "/shared/pl_cellular");
  detail::check_pathloss(sh.pl_d2d, "/shared/pl_d2d");
  return sc;
}

}  // namespace d2dshare

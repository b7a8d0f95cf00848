#pragma once

#include <cmath>

#include "d2dshare/errors.hpp"
#include "d2dshare/units.hpp"

namespace d2dshare {

// Log-distance attenuation law: loss(r) = slope * log10(r) + intercept  [dB],
// r in meters. Equivalent to the power law r^-(slope/10) with a dB offset.
struct PathlossModel {
  double slope_db_per_decade = 0.0;
  double intercept_db = 0.0;

  // Power-law exponent; interference integrals converge only for > 2.
  double exponent() const { return slope_db_per_decade / 10.0; }
};

inline double path_loss_db(const PathlossModel& m, double r) {
  if (!(r > 0.0)) throw NonPositiveDistance("pathloss evaluated at r <= 0");
  return m.slope_db_per_decade * std::log10(r) + m.intercept_db;
}

// Linear power gain, i.e. 10^(-loss/10).
inline double gain(const PathlossModel& m, double r) {
  return db_to_linear(-path_loss_db(m, r));
}

// Distance at which the model produces the given loss.
inline double invert(const PathlossModel& m, double loss_db) {
  return std::pow(10.0, (loss_db - m.intercept_db) / m.slope_db_per_decade);
}

// Gain ratio l(r)/l(d) reduces to (r/d)^-exponent; intercept cancels.
inline double gain_ratio(const PathlossModel& m, double r, double d) {
  return std::pow(r / d, -m.exponent());
}

}  // namespace d2dshare

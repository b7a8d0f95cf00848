#pragma once

#include <cmath>

namespace d2dshare {

// Internal convention: linear milliwatts, meters, m^-2 densities.
// dB / dBm appear only at interfaces.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

inline constexpr double pi() { return 3.141592653589793238462643383279502884; }

}  // namespace d2dshare

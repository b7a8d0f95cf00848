#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "d2dshare/errors.hpp"
#include "d2dshare/model.hpp"
#include "d2dshare/parallel.hpp"
#include "d2dshare/pathloss.hpp"
#include "d2dshare/units.hpp"

namespace d2dshare::mc {

struct McOptions {
  int trials = 10000;
  double window_m = 2000.0;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 -> hardware concurrency
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based stream split: trial index -> independent, reproducible
// stream regardless of which worker executes it.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t counter) {
  return splitmix64(master ^ splitmix64(counter + 1));
}

// mt19937_64 with explicit inverse-CDF transforms; std::distributions are
// implementation-defined and would break the reproducibility contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  double exponential() { return -std::log1p(-uniform01()); }

  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = std::min(mean, 500.0);
      const double limit = std::exp(-chunk);
      std::uint64_t k = 0;
      double p = 1.0;
      do {
        ++k;
        p *= uniform01();
      } while (p > limit);
      total += k - 1;
      mean -= chunk;
    }
    return total;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct Point {
  double x = 0.0, y = 0.0;
};

// Homogeneous PPP on a centered square window.
inline std::vector<Point> sample_ppp(double lambda, double window, Rng& rng) {
  if (!(lambda >= 0.0) || !(window > 0.0)) throw DomainError("sample_ppp: bad arguments");
  const std::uint64_t n = rng.poisson(lambda * window * window);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = (rng.uniform01() - 0.5) * window;
    p.y = (rng.uniform01() - 0.5) * window;
  }
  return pts;
}

// Threshold mode selection: points processed in uniform-random mark order;
// a point keeps D2D mode iff the total received power from previously
// retained points is below eps. No fading in the selection measurement.
// An optional probe transmitter holds the lowest mark and is always retained.
inline std::vector<bool> interference_mode_select(const std::vector<Point>& points,
                                                  double eps_dbm, double pt_dbm,
                                                  const PathlossModel& model, Rng& rng,
                                                  const Point* probe = nullptr) {
  const double eps_mw = dbm_to_mw(eps_dbm);
  const double pt_mw = dbm_to_mw(pt_dbm);
  const std::size_t n = points.size();

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform01() * i);
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }

  std::vector<Point> retained;
  retained.reserve(n + 1);
  if (probe) retained.push_back(*probe);
  std::vector<bool> keep(n, false);
  for (const auto idx : order) {
    const Point& p = points[idx];
    double total = 0.0;
    for (const auto& r : retained) {
      const double dx = p.x - r.x, dy = p.y - r.y;
      const double dist = std::max(std::sqrt(dx * dx + dy * dy), 1e-6);
      total += pt_mw * gain(model, dist);
      if (total >= eps_mw) break;
    }
    if (total < eps_mw) {
      keep[idx] = true;
      retained.push_back(p);
    }
  }
  return keep;
}

// Empirical D2D-mode fraction over independent windows.
inline double empirical_retention(double lambda, double eps_dbm, double pt_dbm,
                                  const PathlossModel& model, int windows,
                                  const McOptions& opt = {}) {
  std::atomic<std::uint64_t> total{0}, kept{0};
  const int workers = opt.workers > 0 ? opt.workers : default_workers();
  parallel_for(static_cast<std::size_t>(windows), workers, [&](std::size_t w) {
    Rng rng(stream_seed(opt.seed, w));
    const auto pts = sample_ppp(lambda, opt.window_m, rng);
    const auto keep = interference_mode_select(pts, eps_dbm, pt_dbm, model, rng);
    std::uint64_t k = 0;
    for (const bool b : keep) k += b;
    total += pts.size();
    kept += k;
  });
  return total == 0 ? 1.0 : static_cast<double>(kept.load()) / static_cast<double>(total.load());
}

struct CoverageEstimate {
  double gamma = 0.0;
  double coverage = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Empirical shared-band coverage: probe pair at the window center, probe
// transmitter first in the thinning order, Rayleigh fading on every link,
// noise scaled by the occupied fraction of the band.
inline std::vector<CoverageEstimate> estimate_coverage(const Scenario& sc, double beta_total,
                                                       const std::vector<double>& gamma_grid,
                                                       const McOptions& opt) {
  if (opt.trials < 1000) throw DomainError("estimate_coverage: trials < 1e3");
  const auto& sh = sc.shared;
  if (sh.lambda > 0.0) {
    // Edge-effect guard: single-interferer power 20 dB below the full-band
    // noise marks the interference-relevant radius.
    const double relevant = invert(sh.pl_d2d, sh.pt_d_dbm - sh.noise_dbm + 20.0);
    if (relevant > opt.window_m / 2.0)
      throw WindowTooSmall("interference-relevant radius exceeds half the window");
  }

  const double pt_mw = dbm_to_mw(sh.pt_d_dbm);
  const double noise_mw = beta_total * dbm_to_mw(sh.noise_dbm);
  const double signal_gain = gain(sh.pl_d2d, sh.d);
  const std::size_t ng = gamma_grid.size();

  std::vector<std::atomic<std::uint64_t>> counts(ng);
  const int workers = opt.workers > 0 ? opt.workers : default_workers();
  parallel_for(static_cast<std::size_t>(opt.trials), workers, [&](std::size_t trial) {
    Rng rng(stream_seed(opt.seed, trial));
    const auto pts = sample_ppp(sh.lambda, opt.window_m, rng);
    const Point probe{0.0, 0.0};
    const auto keep = interference_mode_select(pts, sh.eps_dbm, sh.pt_d_dbm, sh.pl_d2d, rng, &probe);

    const double signal = rng.exponential() * pt_mw * signal_gain;
    double interference = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!keep[i]) continue;
      const double dx = pts[i].x - sh.d, dy = pts[i].y;
      const double dist = std::max(std::sqrt(dx * dx + dy * dy), 1e-6);
      interference += rng.exponential() * pt_mw * gain(sh.pl_d2d, dist);
    }
    const double sinr = signal / (noise_mw + interference);
    for (std::size_t g = 0; g < ng; ++g)
      if (sinr > gamma_grid[g]) counts[g].fetch_add(1, std::memory_order_relaxed);
  });

  std::vector<CoverageEstimate> out(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    const double p = static_cast<double>(counts[g].load()) / opt.trials;
    const double half = 1.96 * std::sqrt(std::max(p * (1.0 - p), 0.0) / opt.trials);
    out[g] = {gamma_grid[g], p, std::max(0.0, p - half), std::min(1.0, p + half)};
  }
  return out;
}

}  // namespace d2dshare::mc

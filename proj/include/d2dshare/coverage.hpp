#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "d2dshare/errors.hpp"
#include "d2dshare/mode_selection.hpp"
#include "d2dshare/model.hpp"
#include "d2dshare/numerics.hpp"
#include "d2dshare/pathloss.hpp"
#include "d2dshare/units.hpp"

namespace d2dshare {

// Pair-correlation correction on the partial exclusion ring [delta, 2 delta]:
// 2 pi / (4 pi / 3 + sqrt(3)/2).
inline double hardcore_ring_correction() {
  return 2.0 * pi() / (4.0 * pi() / 3.0 + std::sqrt(3.0) / 2.0);
}

// Uplink coverage probability, interference-limited power-law form:
//   (1 + alpha * 2 gamma/(a-2) * 2F1(1, (a-2)/a; 2-2/a; -gamma))^-1
inline double cellular_coverage(double gamma, double alpha, double a) {
  if (!(a > 2.0)) throw DomainError("cellular_coverage: pathloss exponent must exceed 2");
  if (gamma < 0.0) throw DomainError("cellular_coverage: gamma < 0");
  if (gamma == 0.0 || alpha == 0.0) return 1.0;
  const double h = numerics::hyp2f1_neg(1.0, (a - 2.0) / a, 2.0 - 2.0 / a, -gamma);
  return 1.0 / (1.0 + alpha * (2.0 * gamma / (a - 2.0)) * h);
}

// D2D coverage probability with Rayleigh fading: noise term scaled by the
// band fraction plus hardcore-thinned interference. Serves the shared band
// directly and the intra-operator band with substituted (q, lambda, beta).
inline double d2d_coverage(double gamma, double beta_total, double q, double lambda, double delta,
                           const SharedParams& shared,
                           const numerics::QuadratureOptions& opt = {}) {
  if (gamma < 0.0) throw DomainError("d2d_coverage: gamma < 0");
  if (gamma == 0.0) return 1.0;
  const PathlossModel& model = shared.pl_d2d;
  const double eta =
      dbm_to_mw(shared.pt_d_dbm) * gain(model, shared.d) / dbm_to_mw(shared.noise_dbm);
  double exponent = gamma * beta_total / eta;
  if (q > 0.0 && lambda > 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    exponent += q * lambda * numerics::annulus_integral(gamma, shared.d, 2.0 * delta, inf, model, opt);
    if (delta > 0.0)
      exponent += hardcore_ring_correction() * q * lambda *
                  numerics::annulus_integral(gamma, shared.d, delta, 2.0 * delta, model, opt);
  }
  return std::exp(-exponent);
}

// scale * int_0^inf p(gamma)/(1+gamma) dgamma.
inline double spectral_efficiency(const std::function<double(double)>& p, double scale,
                                  const numerics::QuadratureOptions& opt = {}) {
  if (!(scale > 0.0 && scale <= 1.0)) throw DomainError("spectral_efficiency: scale outside (0,1]");
  return scale * numerics::integrate_semi_infinite(
                     [&p](double g) { return p(g) / (1.0 + g); }, opt);
}

// One D2D band with fixed thinning outcome. The interference exponent is
// independent of the band fraction, so it is memoized per gamma; spectral
// efficiencies are memoized per fraction. Lookups may run concurrently; a
// racing recompute yields the identical value.
class D2dBand {
 public:
  D2dBand(double q, double lambda, double delta, const SharedParams& shared,
          numerics::QuadratureOptions gamma_opt = {.abs_tol = 1e-12, .rel_tol = 1e-11},
          numerics::QuadratureOptions annulus_opt = {.abs_tol = 1e-8, .rel_tol = 1e-9})
      : q_(q),
        lambda_(lambda),
        delta_(delta),
        d_(shared.d),
        model_(shared.pl_d2d),
        eta_(dbm_to_mw(shared.pt_d_dbm) * gain(shared.pl_d2d, shared.d) /
             dbm_to_mw(shared.noise_dbm)),
        gamma_opt_(gamma_opt),
        annulus_opt_(annulus_opt) {}

  double q() const { return q_; }
  double eta() const { return eta_; }

  // q lambda (I_outer + c I_ring); beta-independent part of the exponent.
  double interference_exponent(double gamma) const {
    if (gamma == 0.0 || q_ == 0.0 || lambda_ == 0.0) return 0.0;
    const std::uint64_t key = std::bit_cast<std::uint64_t>(gamma);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = exponent_memo_.find(key); it != exponent_memo_.end()) return it->second;
    }
    const double inf = std::numeric_limits<double>::infinity();
    double v = q_ * lambda_ *
               numerics::annulus_integral(gamma, d_, 2.0 * delta_, inf, model_, annulus_opt_);
    if (delta_ > 0.0)
      v += hardcore_ring_correction() * q_ * lambda_ *
           numerics::annulus_integral(gamma, d_, delta_, 2.0 * delta_, model_, annulus_opt_);
    std::lock_guard<std::mutex> lock(mutex_);
    return exponent_memo_.try_emplace(key, v).first->second;
  }

  double coverage(double gamma, double beta_total) const {
    if (gamma == 0.0) return 1.0;
    return std::exp(-gamma * beta_total / eta_ - interference_exponent(gamma));
  }

  double spectral_efficiency(double beta_total) const {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(beta_total);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = rate_memo_.find(key); it != rate_memo_.end()) return it->second;
    }
    const double v = numerics::integrate_semi_infinite(
        [this, beta_total](double g) { return coverage(g, beta_total) / (1.0 + g); }, gamma_opt_);
    std::lock_guard<std::mutex> lock(mutex_);
    return rate_memo_.try_emplace(key, v).first->second;
  }

 private:
  double q_, lambda_, delta_, d_;
  PathlossModel model_;
  double eta_;
  numerics::QuadratureOptions gamma_opt_, annulus_opt_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> exponent_memo_;
  mutable std::unordered_map<std::uint64_t, double> rate_memo_;
};

// Shares band evaluators between engines whose band parameters coincide
// (e.g. sweep points that only move the opponent's density).
class BandRegistry {
 public:
  std::shared_ptr<const D2dBand> get(double q, double lambda, double delta,
                                     const SharedParams& shared,
                                     const numerics::QuadratureOptions& gamma_opt) {
    const std::array<double, 10> key{q,
                                     lambda,
                                     delta,
                                     shared.d,
                                     shared.pt_d_dbm,
                                     shared.noise_dbm,
                                     shared.pl_d2d.slope_db_per_decade,
                                     shared.pl_d2d.intercept_db,
                                     gamma_opt.abs_tol,
                                     gamma_opt.rel_tol};
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = bands_[key];
    if (!slot) slot = std::make_shared<D2dBand>(q, lambda, delta, shared, gamma_opt);
    return slot;
  }

 private:
  std::mutex mutex_;
  std::map<std::array<double, 10>, std::shared_ptr<const D2dBand>> bands_;
};

struct EngineOptions {
  numerics::QuadratureOptions gamma_quad{.abs_tol = 1e-12, .rel_tol = 1e-11};
  BandRegistry* registry = nullptr;
};

// Scenario-level rate evaluator: fixed mode-selection outcomes, cached
// per-band spectral efficiencies. Immutable after construction apart from
// the internal memo tables.
class RateEngine {
 public:
  explicit RateEngine(const Scenario& sc, EngineOptions opt = {})
      : sc_(validate_scenario(sc)), modes_(compute_modes(sc_)) {
    auto band = [&](double q, double lambda, double delta) -> std::shared_ptr<const D2dBand> {
      if (opt.registry) return opt.registry->get(q, lambda, delta, sc_.shared, opt.gamma_quad);
      return std::make_shared<D2dBand>(q, lambda, delta, sc_.shared, opt.gamma_quad);
    };
    shared_band_ = band(modes_[0].shared.q, sc_.shared.lambda, modes_[0].shared.delta);
    const double a = sc_.shared.pl_cellular.exponent();
    for (int i = 0; i < 2; ++i) {
      intra_band_[i] = band(modes_[i].intra.q, sc_.operators[i].lambda_d, modes_[i].intra.delta);
      const double alpha = modes_[i].shared.alpha;
      rc_[i] = spectral_efficiency([alpha, a](double g) { return cellular_coverage(g, alpha, a); },
                                   sc_.operators[i].nu, opt.gamma_quad);
    }
  }

  const Scenario& scenario() const { return sc_; }
  const OperatorModes& modes(int i) const { return modes_[i]; }
  const D2dBand& shared_band() const { return *shared_band_; }
  const D2dBand& intra_band(int i) const { return *intra_band_[i]; }

  double cellular_spectral_efficiency(int i) const { return rc_[i]; }
  double intra_spectral_efficiency(int i, double beta_d) const {
    return intra_band_[i]->spectral_efficiency(beta_d);
  }
  double shared_spectral_efficiency(double beta_total) const {
    return shared_band_->spectral_efficiency(beta_total);
  }

  RateReport evaluate_rates(int i, const SpectrumPartition& partition,
                            double beta_opponent) const {
    return evaluate(i, partition, beta_opponent, modes_[i].shared.q);
  }

  // Baseline variant: multi-operator traffic routed through the BSs.
  RateReport evaluate_rates_shared_q(int i, const SpectrumPartition& partition,
                                     double beta_opponent, double shared_q) const {
    return evaluate(i, partition, beta_opponent, shared_q);
  }

 private:
  RateReport evaluate(int i, const SpectrumPartition& partition, double beta_opponent,
                      double shared_q) const {
    partition.validate();
    if (!(beta_opponent >= 0.0 && beta_opponent <= 1.0))
      throw InvalidFraction("beta_opponent outside [0,1]");
    RateReport rep;
    rep.w = modes_[i].w;
    rep.r_c = rc_[i];
    rep.r_d = intra_spectral_efficiency(i, partition.beta_d);
    const double beta_total = partition.beta + beta_opponent;
    rep.r_shared = shared_spectral_efficiency(beta_total);
    const double q_d = modes_[i].intra.q;
    rep.q_c = partition.beta_c * rep.r_c;
    rep.q_d = partition.beta_c * rep.r_c * (1.0 - q_d) + partition.beta_d * rep.r_d * q_d;
    rep.q_s = partition.beta_c * rep.r_c * (1.0 - shared_q) + beta_total * rep.r_shared * shared_q;
    rep.u = (1.0 - rep.w) * rep.q_d + rep.w * rep.q_s;
    return rep;
  }

  Scenario sc_;
  std::array<OperatorModes, 2> modes_;
  std::shared_ptr<const D2dBand> shared_band_;
  std::array<std::shared_ptr<const D2dBand>, 2> intra_band_;
  std::array<double, 2> rc_{};
};

}  // namespace d2dshare

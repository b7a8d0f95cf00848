#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "d2dshare/errors.hpp"
#include "d2dshare/pathloss.hpp"
#include "d2dshare/units.hpp"

namespace d2dshare::numerics {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_segments = 2000;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct SegmentResult {
  double integral = 0.0;
  double error = 0.0;
};

// One GK15 panel on [a, b]; error estimate follows QUADPACK's smoothing.
template <typename F>
SegmentResult gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv[15];
  fv[14] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[2 * j] = f(center - dx);
    fv[2 * j + 1] = f(center + dx);
  }

  double result_gauss = kWg[3] * fv[14];
  double result_kronrod = kWgk[7] * fv[14];
  double resabs = std::abs(result_kronrod);
  for (int j = 0; j < 7; ++j) {
    const double sum = fv[2 * j] + fv[2 * j + 1];
    result_kronrod += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
    if (j % 2 == 1) result_gauss += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * result_kronrod;
  double resasc = kWgk[7] * std::abs(fv[14] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));

  SegmentResult out;
  out.integral = result_kronrod * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((result_kronrod - result_gauss) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(err, 50.0 * eps * resabs);
  out.error = err;
  return out;
}

struct Segment {
  double a, b;
  SegmentResult r;
  bool operator<(const Segment& o) const { return r.error < o.r.error; }
};

// Globally adaptive bisection, worst segment first.
template <typename F>
double adaptive(F&& f, double a, double b, const QuadratureOptions& opt) {
  std::priority_queue<Segment> queue;
  Segment s0{a, b, gk15(f, a, b)};
  double total = s0.r.integral;
  double total_err = s0.r.error;
  queue.push(s0);
  int segments = 1;
  const double eps = std::numeric_limits<double>::epsilon();

  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (segments >= opt.max_segments)
      throw NoConvergence("quadrature did not converge within segment budget");
    Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b))
      throw NoConvergence("quadrature stalled on a zero-width segment");
    Segment left{worst.a, mid, gk15(f, worst.a, mid)};
    Segment right{mid, worst.b, gk15(f, mid, worst.b)};
    total += left.r.integral + right.r.integral - worst.r.integral;
    total_err += left.r.error + right.r.error - worst.r.error;
    queue.push(left);
    queue.push(right);
    ++segments;
    // Roundoff floor: stop refining once the estimate saturates.
    if (total_err <= 100.0 * eps * std::abs(total)) break;
  }
  return total;
}

}  // namespace detail

// Integral of f over a finite interval [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  return detail::adaptive(f, a, b, opt);
}

// Integral of f over (0, inf) via the substitution x = t/(1-t).
inline double integrate_semi_infinite(const std::function<double(double)>& f,
                                      const QuadratureOptions& opt = {}) {
  auto g = [&f](double t) {
    const double one_minus = 1.0 - t;
    return f(t / one_minus) / (one_minus * one_minus);
  };
  return detail::adaptive(g, 0.0, 1.0, opt);
}

// Integral of f over (a, inf) with a characteristic tail scale.
inline double integrate_tail(const std::function<double(double)>& f, double a, double scale,
                             const QuadratureOptions& opt = {}) {
  auto g = [&f, a, scale](double t) {
    const double one_minus = 1.0 - t;
    return f(a + scale * t / one_minus) * scale / (one_minus * one_minus);
  };
  return detail::adaptive(g, 0.0, 1.0, opt);
}

// Interference kernel of the D2D coverage expression:
//   int_0^{2pi} int_{r_lo}^{r_hi} f(r,phi) r / (1 + f(r,phi)) dr dphi
// with f = gamma * l(sqrt(r^2 + d^2 - 2 r d cos phi)) / l(d). The phi integral
// uses a fixed-order midpoint rule (periodic, spectrally accurate); the radial
// integral is adaptive. Pass r_hi = infinity for the outer annulus.
inline double annulus_integral(double gamma, double d, double r_lo, double r_hi,
                               const PathlossModel& model, const QuadratureOptions& opt = {},
                               int phi_points = 64) {
  if (gamma < 0.0) throw DomainError("annulus_integral: gamma < 0");
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) throw DomainError("annulus_integral: bad radial range");
  if (gamma == 0.0) return 0.0;

  const double a_exp = model.exponent();
  // Even in phi about 0 and pi: integrate (0, pi) by midpoints, double it.
  const int n = phi_points / 2;
  std::vector<double> cos_phi(n);
  for (int k = 0; k < n; ++k) cos_phi[k] = std::cos(pi() * (k + 0.5) / n);
  const double phi_weight = 2.0 * pi() / n;

  auto radial = [&](double r) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double dist2 = r * r + d * d - 2.0 * r * d * cos_phi[k];
      const double ratio = std::pow(dist2 / (d * d), -0.5 * a_exp);
      const double f = gamma * ratio;
      acc += f / (1.0 + f);
    }
    return acc * phi_weight * r;
  };

  if (std::isinf(r_hi)) {
    const double scale = std::max({d * std::pow(std::max(gamma, 1.0), 1.0 / a_exp), d, r_lo});
    return integrate_tail(radial, r_lo, scale, opt);
  }
  return integrate(radial, r_lo, r_hi, opt);
}

namespace detail {

// 2F1 power series; requires |z| < 1, converges fast for |z| <= 2/3.
inline double hyp2f1_series(double a, double b, double c, double z) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 100000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) <= 1e-16 * std::abs(sum)) return sum;
  }
  throw NoConvergence("2F1 series did not converge");
}

}  // namespace detail

// Gauss hypergeometric 2F1(a, b; c; z) on z <= 0.
//  - moderate z: Pfaff transformation onto w = z/(z-1) in [0, 2/3]
//  - large |z|: inversion z -> 1/z (needs a - b non-integer; falls back to
//    the Pfaff series otherwise)
inline double hyp2f1_neg(double a, double b, double c, double z) {
  if (z > 0.0) throw DomainError("hyp2f1_neg: z > 0");
  if (c <= 0.0 && c == std::floor(c)) throw DomainError("hyp2f1_neg: c is a non-positive integer");
  if (z == 0.0) return 1.0;

  if (z >= -2.0) {
    const double w = z / (z - 1.0);
    return std::pow(1.0 - z, -a) * detail::hyp2f1_series(a, c - b, c, w);
  }

  const double ab = a - b;
  if (std::abs(ab - std::round(ab)) > 1e-8) {
    // DLMF 15.8.2 with argument 1/z in (-1/2, 0).
    const double inv = 1.0 / z;
    const double t1 = std::tgamma(c) * std::tgamma(b - a) / (std::tgamma(b) * std::tgamma(c - a)) *
                      std::pow(-z, -a) * detail::hyp2f1_series(a, a - c + 1.0, a - b + 1.0, inv);
    const double t2 = std::tgamma(c) * std::tgamma(a - b) / (std::tgamma(a) * std::tgamma(c - b)) *
                      std::pow(-z, -b) * detail::hyp2f1_series(b, b - c + 1.0, b - a + 1.0, inv);
    return t1 + t2;
  }
  const double w = z / (z - 1.0);
  return std::pow(1.0 - z, -a) * detail::hyp2f1_series(a, c - b, c, w);
}

}  // namespace d2dshare::numerics

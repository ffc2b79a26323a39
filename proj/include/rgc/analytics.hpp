#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>

#include "rgc/error.hpp"
#include "rgc/manifold.hpp"
#include "rgc/sampler.hpp"

namespace rgc {

/// Expected number of points in an r-ball: n omega_d r^d / vol.
inline double lambda_of(double n, double r, int d, double vol) {
  if (!(n > 0.0) || !(vol > 0.0) || d < 1) throw InvalidInput("n, vol and d must be positive");
  if (!(r >= 0.0)) throw InvalidInput("radius must be non-negative");
  return n * unit_ball_volume(d) * std::pow(r, d) / vol;
}

inline double lambda_of(const ManifoldModel& m, double n, double r) {
  return lambda_of(n, r, m.dim(), m.volume());
}

/// Radius solving lambda_of(n, r, d, vol) = log n + k log log n + offset.
inline double threshold_radius(double n, double k, double offset, int d, double vol,
                               std::optional<double> max_radius = std::nullopt) {
  if (!(n > std::numbers::e)) throw InvalidInput("n must exceed e");
  if (!(vol > 0.0) || d < 1) throw InvalidInput("vol and d must be positive");
  const double target = std::log(n) + k * std::log(std::log(n)) + offset;
  if (!(target > 0.0)) throw OutOfRegime("target lambda " + format_real(target) + " is not positive");
  const double r = std::pow(target * vol / (n * unit_ball_volume(d)), 1.0 / d);
  if (max_radius && r > *max_radius)
    throw OutOfRegime("radius " + format_real(r) + " exceeds " + format_real(*max_radius));
  return r;
}

inline double threshold_radius(const ManifoldModel& m, double n, double k, double offset) {
  return threshold_radius(n, k, offset, m.dim(), m.volume(), m.convexity_radius());
}

/// Radius with lambda_of(m, n, r) = lambda.
inline double radius_for_lambda(const ManifoldModel& m, double n, double lambda) {
  if (!(lambda > 0.0) || !(n > 0.0)) throw InvalidInput("lambda and n must be positive");
  return std::pow(lambda * m.volume() / (n * unit_ball_volume(m.dim())), 1.0 / m.dim());
}

namespace detail {

/// e^{-x} sum_{j<k} x^j / j!, the regularized upper incomplete gamma Q(k, x).
inline double poisson_tail(double x, int k) {
  if (std::isinf(x)) return 0.0;
  double term = 1.0, sum = 0.0;
  for (int j = 0; j < k; ++j) {
    sum += term;
    term *= x / (j + 1);
  }
  return std::exp(-x) * sum;
}

}  // namespace detail

/// n (Q(k, lambda_r) - Q(k, lambda_r0)): critical-count envelope up to an unspecified constant.
inline double crit_envelope(double n, double lambda_r, double lambda_r0, int k) {
  if (k < 1) throw InvalidInput("k must be at least 1");
  if (!(lambda_r > 0.0)) throw InvalidInput("lambda_r must be positive");
  if (lambda_r > lambda_r0) throw InvalidInput("lambda_r exceeds lambda_r0");
  return n * (detail::poisson_tail(lambda_r, k) - detail::poisson_tail(lambda_r0, k));
}

/// (a_k n lambda^{k-2} e^{-lambda}, beta_k(M) + b_k n lambda^k e^{-lambda}).
inline std::pair<double, double> betti_envelope(double n, double lambda_val, int k, double a_k,
                                                double b_k, std::int64_t beta_k_m) {
  const double e = std::exp(-lambda_val);
  return {a_k * n * std::pow(lambda_val, k - 2) * e,
          static_cast<double>(beta_k_m) + b_k * n * std::pow(lambda_val, k) * e};
}

}  // namespace rgc

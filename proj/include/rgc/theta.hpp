#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rgc/error.hpp"
#include "rgc/homology.hpp"
#include "rgc/manifold.hpp"
#include "rgc/morse.hpp"
#include "rgc/sampler.hpp"
#include "rgc/spatial_grid.hpp"

namespace rgc {

/**
 * Normalized distance from the origin to the boundary of
 * Delta(Y) = conv{-2 log_center(y)}: the minimum over facets, divided by 2 rho.
 */
inline double phi(const ManifoldModel& m, std::span<const double> center,
                  const std::vector<Point>& ys) {
  if (ys.size() < 2) throw InvalidInput("phi needs at least two generators");
  const auto vs = detail::gradient_vectors(m, center, ys);
  const double two_rho = detail::mean_norm(vs);
  if (detail::hull_min_norm(vs) > kHullTolerance * two_rho)
    throw InvalidConfiguration("origin lies outside the gradient polytope");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t drop = 0; drop < vs.size(); ++drop) {
    std::vector<Point> facet;
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (i != drop) facet.push_back(vs[i]);
    best = std::min(best, detail::hull_min_norm(facet));
  }
  return best / two_rho;
}

/// Excess-inequality constant 1 / sqrt(A(r)); A(r) = (2r/R) cot(2r/R) on the sphere, 1 on the torus.
inline double c_g_constant(const ManifoldModel& m, double r) {
  check_radius(m, r);
  if (m.is_torus()) return 1.0;
  const double t = 2.0 * r / m.scale();
  const double a = std::min(1.0, t / std::tan(t));
  if (!(a > 0.0)) throw OutOfRegime("Hessian bound vanishes at this radius");
  return 1.0 / std::sqrt(a);
}

/// Default radii rule with xi = 1 / lambda: r2 = r (1 + xi), r1 = r (1 - xi^2 / (2 c_g^2)).
inline std::pair<double, double> theta_radii(double r, double lambda_val, double c_g,
                                             std::optional<double> max_radius = std::nullopt) {
  if (!(lambda_val > 1.0)) throw InvalidInput("lambda must exceed 1");
  if (!(r > 0.0) || !(c_g >= 1.0)) throw InvalidInput("need r > 0 and c_g >= 1");
  const double xi = 1.0 / lambda_val;
  const double r2 = r * (1.0 + xi);
  const double r1 = r * (1.0 - xi * xi / (2.0 * c_g * c_g));
  if (max_radius && r2 > *max_radius)
    throw OutOfRegime("outer radius " + format_real(r2) + " exceeds " + format_real(*max_radius));
  return {r1, r2};
}

struct ThetaConfig {
  double epsilon = 0.1;
  double r = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double xi = 0.0;
  double c_g = 1.0;

  static ThetaConfig make(const ManifoldModel& m, double r, double lambda_val,
                          double epsilon = 0.1) {
    ThetaConfig c;
    c.epsilon = epsilon;
    c.r = r;
    c.c_g = c_g_constant(m, r);
    c.xi = 1.0 / lambda_val;
    std::tie(c.r1, c.r2) = theta_radii(r, lambda_val, c.c_g, m.convexity_radius());
    return c;
  }

  /// r1 > r sqrt(1 - ((r2 / r - 1) / c_g)^2), the condition that keeps counted cycles alive at r.
  bool radii_hypothesis() const {
    const double a = (r2 / r - 1.0) / c_g;
    const double rad = 1.0 - a * a;
    return rad < 0.0 || r1 > r * std::sqrt(rad);
  }

  void validate(const ManifoldModel& m) const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(r1 > 0.0 && r1 < r && r < r2)) throw InvalidInput("need 0 < r1 < r < r2");
    check_radius(m, r);
    if (r2 >= m.injectivity_radius()) throw OutOfRegime("outer radius beyond injectivity radius");
    if (!radii_hypothesis()) throw InvalidInput("r1 too small for the given r, r2 and c_g");
  }
};

struct ThetaCycle {
  std::vector<Index> generators;
  Point center;
  double radius = 0.0;
  double phi = 0.0;
  bool certified = false;
};

struct ThetaResult {
  std::int64_t count = 0;          // certified cycles
  std::vector<ThetaCycle> cycles;  // every configuration meeting C1-C3
};

namespace detail {

/// Every point of the annulus eps rho <= dist(c, x) <= rho is within rho of the cloud.
inline bool annulus_certificate(const PointCloud& cloud, const SpatialGrid& grid,
                                const Point& center, double rho, double eps) {
  const auto& m = cloud.manifold;
  const double reach = rho * (1.0 - eps / 2.0);
  const bool gap = visit_net(m, eps * rho / 2.0, Annulus{center, eps * rho, rho}, [&](const Point& s) {
    return !grid.any_near(s.data(), [&](Index j) {
      return geodesic_distance(m, s.data(), cloud.data(j)) <= reach;
    });
  });
  return !gap;
}

}  // namespace detail

/**
 * Index-k critical configurations with rho in (r1, r], nothing else in the
 * closed r2-ball around the center and phi >= epsilon. Each is certified by a
 * deterministic (eps rho / 2)-net of the annulus whose points all need a cloud
 * point within rho (1 - eps / 2); count holds the certified ones.
 */
inline ThetaResult count_theta_cycles(const PointCloud& cloud, int k, const ThetaConfig& cfg) {
  const auto& m = cloud.manifold;
  cfg.validate(m);
  if (k < 1 || k > m.dim() - 1) throw InvalidInput("theta cycles need 1 <= k <= d - 1");
  ThetaResult out;
  if (cloud.size() <= static_cast<std::size_t>(k)) return out;
  const SpatialGrid grid(cloud, cfg.r2);
  for (auto& cp : enumerate_critical_points(cloud, k, cfg.r1, cfg.r)) {
    const bool crowded = grid.any_near(cp.center.data(), [&](Index j) {
      if (std::find(cp.generators.begin(), cp.generators.end(), j) != cp.generators.end())
        return false;
      return detail::geodesic_distance(m, cp.center.data(), cloud.data(j)) <= cfg.r2;
    });
    if (crowded) continue;
    std::vector<Point> ys;
    for (Index v : cp.generators) ys.push_back(cloud.point_copy(v));
    const double ph = phi(m, cp.center, ys);
    if (ph < cfg.epsilon) continue;
    ThetaCycle tc;
    tc.generators = std::move(cp.generators);
    tc.center = std::move(cp.center);
    tc.radius = cp.radius;
    tc.phi = ph;
    tc.certified = detail::annulus_certificate(cloud, grid, tc.center, tc.radius, cfg.epsilon);
    out.count += tc.certified;
    out.cycles.push_back(std::move(tc));
  }
  return out;
}

inline bool theta_lower_bound_check(const BettiVector& betti, std::int64_t theta_count, int k) {
  return betti.at(k) >= theta_count;
}

inline bool theta_lower_bound_check(const CechComplex& cx, std::int64_t theta_count,
                                    const ManifoldModel& /*m*/, int k) {
  if (k >= cx.dim_cap()) throw InsufficientDimension("degree " + std::to_string(k) +
                                                     " needs dim_cap > " + std::to_string(k));
  return theta_lower_bound_check(betti_numbers(cx), theta_count, k);
}

/// CSV: k, radius, phi, certificate flag.
inline void write_theta_csv(int k, const ThetaResult& res, std::ostream& os) {
  os << "k,radius,phi,certified\n";
  for (const auto& c : res.cycles)
    os << k << ',' << format_real(c.radius) << ',' << format_real(c.phi) << ','
       << (c.certified ? 1 : 0) << '\n';
}

}  // namespace rgc

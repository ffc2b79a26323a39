#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rgc/cech.hpp"
#include "rgc/error.hpp"
#include "rgc/homology.hpp"
#include "rgc/manifold.hpp"
#include "rgc/sampler.hpp"
#include "rgc/spatial_grid.hpp"

namespace rgc {

/// Center c(Y), radius rho(Y) and generators Y of an index-k critical point of the distance function.
struct CriticalPoint {
  int index = 0;
  Point center;
  double radius = 0.0;
  std::vector<Index> generators;
};

inline bool operator<(const CriticalPoint& a, const CriticalPoint& b) {
  if (a.radius != b.radius) return a.radius < b.radius;
  return a.generators < b.generators;
}

inline constexpr double kHullTolerance = 1e-9;
inline constexpr double kEmptyBallSlack = 1e-12;

namespace detail {

/**
 * Minimum Euclidean norm over the convex hull of vs. Every vertex subset is
 * tried: the minimum-norm point of its affine hull counts when its affine
 * weights are all non-negative.
 */
inline double hull_min_norm(const std::vector<Point>& vs) {
  const int m = static_cast<int>(vs.size());
  if (m == 0) throw InvalidInput("empty vertex set");
  const int d = static_cast<int>(vs[0].size());
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask >> i & 1u) idx.push_back(i);
    const int s = static_cast<int>(idx.size());
    const Eigen::Map<const Eigen::VectorXd> p0(vs[idx[0]].data(), d);
    if (s == 1) {
      best = std::min(best, p0.norm());
      continue;
    }
    Eigen::MatrixXd a(d, s - 1);
    for (int j = 1; j < s; ++j)
      a.col(j - 1) = Eigen::Map<const Eigen::VectorXd>(vs[idx[j]].data(), d) - p0;
    const Eigen::MatrixXd g = a.transpose() * a;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    lu.setThreshold(1e-12);
    if (lu.rank() < s - 1) continue;
    const Eigen::VectorXd mu = lu.solve(-a.transpose() * p0);
    if (mu.minCoeff() < -1e-12 || mu.sum() > 1.0 + 1e-12) continue;
    best = std::min(best, (p0 + a * mu).norm());
  }
  return best;
}

inline std::vector<Point> gradient_vectors(const ManifoldModel& m, std::span<const double> center,
                                           const std::vector<Point>& ys) {
  std::vector<Point> vs;
  vs.reserve(ys.size());
  for (const auto& y : ys) {
    auto v = log_map(m, center, y);
    for (double& x : v) x *= -2.0;
    vs.push_back(std::move(v));
  }
  return vs;
}

inline double mean_norm(const std::vector<Point>& vs) {
  double s = 0.0;
  for (const auto& v : vs) s += norm(v);
  return vs.empty() ? 0.0 : s / static_cast<double>(vs.size());
}

}  // namespace detail

/// Whether 0 lies in conv{-2 log_center(y)}, with closed-hull tolerance 1e-9 * 2 rho.
inline bool delta_polytope_contains_origin(const ManifoldModel& m, std::span<const double> center,
                                           const std::vector<Point>& ys) {
  if (ys.empty()) throw InvalidInput("empty generator set");
  const auto vs = detail::gradient_vectors(m, center, ys);
  const double scale = detail::mean_norm(vs);
  return detail::hull_min_norm(vs) <= kHullTolerance * std::max(scale, 1e-300);
}

namespace detail {

/// Candidate check shared by the enumeration; returns the critical point or nullopt.
inline std::optional<CriticalPoint> critical_candidate(const PointCloud& cloud,
                                                       std::span<const Index> verts, double r_lo,
                                                       double r_hi, std::span<const Index> nearby,
                                                       std::size_t& degenerate) {
  const auto& m = cloud.manifold;
  const int D = m.ambient_dim();
  const int s = static_cast<int>(verts.size());
  std::optional<Point> center;
  double rho;
  if (s == 2) {
    // The midpoint is always critical for a pair; only the radius and emptiness matter.
    rho = geodesic_distance(m, cloud.data(verts[0]), cloud.data(verts[1])) / 2.0;
    if (!(rho > r_lo) || rho > r_hi) return std::nullopt;
    const Coords a = to_chart(m, cloud.data(verts[0]), cloud.data(verts[0]));
    Coords mid = to_chart(m, cloud.data(verts[0]), cloud.data(verts[1]));
    for (int i = 0; i < D; ++i) mid[i] = (a[i] + mid[i]) / 2.0;
    center = chart_to_point(m, cloud.data(verts[0]), mid);
  } else {
    std::array<Coords, kMaxSimplexSize> c{};
    std::array<const Coords*, kMaxSimplexSize> ptr{};
    for (int i = 0; i < s; ++i) {
      c[i] = to_chart(m, cloud.data(verts[0]), cloud.data(verts[i]));
      ptr[i] = &c[i];
    }
    const auto cs = circumsphere(ptr.data(), s, D);
    if (cs.rank != s - 1) {
      ++degenerate;
      return std::nullopt;
    }
    center = chart_to_point(m, cloud.data(verts[0]), cs.ball.center);
    rho = geodesic_radius(m, cs.ball);
    if (center && (!(rho > r_lo) || rho > r_hi)) return std::nullopt;
  }
  if (!center) {
    ++degenerate;
    return std::nullopt;
  }

  for (Index p : nearby) {
    if (std::find(verts.begin(), verts.end(), p) != verts.end()) continue;
    if (geodesic_distance(m, center->data(), cloud.data(p)) <= rho - kEmptyBallSlack)
      return std::nullopt;
  }

  if (s > 2) {
    std::vector<Point> ys;
    ys.reserve(s);
    for (Index v : verts) ys.push_back(cloud.point_copy(v));
    if (!delta_polytope_contains_origin(m, *center, ys)) return std::nullopt;
  }
  CriticalPoint out;
  out.index = s - 1;
  out.center = std::move(*center);
  out.radius = rho;
  out.generators.assign(verts.begin(), verts.end());
  return out;
}

}  // namespace detail

/**
 * Index-k critical points with radius in (r_lo, r_hi], sorted by (radius, generators).
 *
 * Candidates are (k+1)-cliques of the 2 r_hi neighbor graph whose miniball
 * radius is at most r_hi. Affinely degenerate candidates are skipped and
 * counted in *degenerate. Index 0 returns every cloud point with radius 0.
 */
inline std::vector<CriticalPoint> enumerate_critical_points(const PointCloud& cloud, int k,
                                                            double r_lo, double r_hi,
                                                            std::size_t* degenerate = nullptr) {
  const auto& m = cloud.manifold;
  if (k < 0 || k > m.dim()) throw InvalidInput("index must lie in [0, d]");
  if (!(r_lo >= 0.0) || !(r_lo < r_hi)) throw InvalidInput("need 0 <= r_lo < r_hi");
  check_radius(m, r_hi);
  std::vector<CriticalPoint> out;
  std::size_t skipped = 0;
  if (k == 0) {
    for (std::size_t i = 0; i < cloud.size(); ++i)
      out.push_back({0, cloud.point_copy(i), 0.0, {static_cast<Index>(i)}});
  } else if (cloud.size() > static_cast<std::size_t>(k)) {
    const auto g = build_neighbor_graph(cloud, 2.0 * r_hi);
    detail::expand_cliques(cloud, g, r_hi, k, [&](int dim, std::span<const Index> s) {
      if (dim != k) return;
      if (auto cp = detail::critical_candidate(cloud, s, r_lo, r_hi, g.neighbors(s[0]), skipped))
        out.push_back(std::move(*cp));
    });
  }
  std::sort(out.begin(), out.end());
  if (degenerate) *degenerate = skipped;
  return out;
}

/// Sorted critical radii per index over (r_lo, r_hi]; index 0 always holds every cloud point.
struct CritCounts {
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<std::vector<double>> radii;
  std::size_t degenerate = 0;

  std::int64_t at(int k) const {
    return k >= 0 && k < static_cast<int>(radii.size()) ? static_cast<std::int64_t>(radii[k].size())
                                                        : 0;
  }

  /// C_k(a, b] restricted to the enumerated interval.
  std::int64_t between(int k, double a, double b) const {
    if (k == 0) return a < 0.0 && b >= 0.0 ? at(0) : 0;
    if (k < 0 || k >= static_cast<int>(radii.size())) return 0;
    const auto& v = radii[k];
    return std::upper_bound(v.begin(), v.end(), b) - std::upper_bound(v.begin(), v.end(), a);
  }
};

inline CritCounts crit_counts(const PointCloud& cloud, double r_lo, double r_hi, int k_max) {
  CritCounts c;
  c.r_lo = r_lo;
  c.r_hi = r_hi;
  k_max = std::min(k_max, cloud.manifold.dim());
  c.radii.resize(std::max(k_max, 0) + 1);
  for (int k = 0; k <= k_max; ++k) {
    std::size_t deg = 0;
    for (const auto& cp : enumerate_critical_points(cloud, k, r_lo, r_hi, &deg))
      c.radii[k].push_back(cp.radius);
    std::sort(c.radii[k].begin(), c.radii[k].end());
    c.degenerate += deg;
  }
  return c;
}

struct MorseCheck {
  int k = 0;
  std::int64_t beta = 0;
  std::int64_t weak_bound = 0;  // C_k(0, r], with C_0 = |P|
  bool weak_ok = true;
  std::optional<std::int64_t> relative_lhs;    // beta_k - beta_k(M)
  std::optional<std::int64_t> relative_bound;  // C_{k+1}(r, r0]
  bool relative_ok = true;
};

struct MorseReport {
  std::vector<MorseCheck> checks;
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const MorseCheck& c) { return c.weak_ok && c.relative_ok; });
  }
};

/**
 * Weak and relative Morse inequalities for the trusted Betti numbers of a
 * complex at radius r. counts must cover (0, r] and, when covered_at is
 * given, (r, covered_at].
 */
inline MorseReport morse_inequality_check(const BettiVector& betti, double r,
                                          const ManifoldModel& m, const CritCounts& counts,
                                          std::optional<double> covered_at) {
  MorseReport rep;
  const auto mb = manifold_betti(m);
  for (int k = 0; k < static_cast<int>(betti.betti.size()); ++k) {
    MorseCheck c;
    c.k = k;
    c.beta = betti.betti[k];
    c.weak_bound = k == 0 ? counts.at(0) : counts.between(k, 0.0, r);
    c.weak_ok = c.beta <= c.weak_bound;
    if (covered_at && k <= m.dim()) {
      c.relative_lhs = c.beta - mb.at(k);
      c.relative_bound = counts.between(k + 1, r, *covered_at);
      c.relative_ok = *c.relative_lhs <= *c.relative_bound;
    }
    rep.checks.push_back(c);
  }
  return rep;
}

inline MorseReport morse_inequality_check(const CechComplex& cx, const ManifoldModel& m,
                                          const CritCounts& counts,
                                          std::optional<double> covered_at) {
  return morse_inequality_check(betti_numbers(cx), cx.radius(), m, counts, covered_at);
}

/**
 * One-sided certificate that the r0-balls around the cloud cover M.
 *
 * A delta-net with delta = r0 / 8 is checked point by point: each net point
 * needs a cloud point within r0 - delta. By the triangle inequality every
 * point of M is then within r0 of the cloud.
 */
inline bool coverage_certificate(const PointCloud& cloud, double r0) {
  const auto& m = cloud.manifold;
  check_radius(m, r0);
  if (cloud.empty()) return false;
  const double delta = r0 / 8.0;
  const double reach = r0 - delta;
  const SpatialGrid grid(cloud, reach);
  const bool gap = visit_net(m, delta, std::nullopt, [&](const Point& s) {
    return !grid.any_near(s.data(), [&](Index j) {
      return detail::geodesic_distance(m, s.data(), cloud.data(j)) <= reach;
    });
  });
  return !gap;
}

/// Smallest r0 = r_start * factor^j that passes coverage_certificate, up to the convexity radius.
inline std::optional<double> coverage_radius(const PointCloud& cloud, double r_start,
                                             double factor = 1.1) {
  const double cap = cloud.manifold.convexity_radius();
  if (!(factor > 1.0)) throw InvalidInput("factor must exceed 1");
  for (double r0 = std::min(r_start, cap);; r0 = std::min(r0 * factor, cap)) {
    if (coverage_certificate(cloud, r0)) return r0;
    if (r0 >= cap) return std::nullopt;
  }
}

/// CSV: index, radius, center coordinates, space-separated generator indices.
inline void write_critical_csv(const ManifoldModel& m, const std::vector<CriticalPoint>& cps,
                               std::ostream& os) {
  os << "index,radius";
  for (int i = 0; i < m.ambient_dim(); ++i) os << ",c" << i;
  os << ",generators\n";
  for (const auto& cp : cps) {
    os << cp.index << ',' << format_real(cp.radius);
    for (double x : cp.center) os << ',' << format_real(x);
    os << ',';
    for (std::size_t i = 0; i < cp.generators.size(); ++i) os << (i ? " " : "") << cp.generators[i];
    os << '\n';
  }
}

}  // namespace rgc

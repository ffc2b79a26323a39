#pragma once

// Brute-force reference implementations. They share no geometry kernels with
// the production code: miniballs come from exhaustive support sets solved with
// Eigen, ranks from dense bit-packed elimination, critical points from all
// subsets of the cloud.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "rgc/cech.hpp"
#include "rgc/homology.hpp"
#include "rgc/manifold.hpp"
#include "rgc/morse.hpp"
#include "rgc/sampler.hpp"

namespace rgc::oracle {

namespace detail {

/// Lift of every point relative to the first: wrapped differences on the torus, raw on the sphere.
inline std::vector<Eigen::VectorXd> lift(const PointCloud& cloud, const std::vector<Index>& s) {
  const auto& m = cloud.manifold;
  const int D = m.ambient_dim();
  std::vector<Eigen::VectorXd> out;
  const double* b = cloud.data(s[0]);
  for (Index v : s) {
    Eigen::VectorXd x(D);
    const double* p = cloud.data(v);
    for (int i = 0; i < D; ++i) {
      if (m.is_torus()) {
        const double L = m.scale();
        x[i] = p[i] - b[i] - L * std::round((p[i] - b[i]) / L);
      } else {
        x[i] = p[i];
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

/// Center of the sphere through pts in their affine hull, or nullopt when affinely dependent.
inline std::optional<Eigen::VectorXd> affine_circumcenter(const std::vector<Eigen::VectorXd>& pts,
                                                          Eigen::VectorXd* weights = nullptr) {
  const int s = static_cast<int>(pts.size());
  const auto& p0 = pts[0];
  if (s == 1) {
    if (weights) *weights = Eigen::VectorXd::Ones(1);
    return p0;
  }
  Eigen::MatrixXd a(p0.size(), s - 1);
  for (int j = 1; j < s; ++j) a.col(j - 1) = pts[j] - p0;
  const Eigen::MatrixXd g = a.transpose() * a;
  Eigen::VectorXd rhs(s - 1);
  for (int j = 0; j < s - 1; ++j) rhs[j] = 0.5 * g(j, j);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
  qr.setThreshold(1e-10);
  if (qr.rank() < s - 1) return std::nullopt;
  const Eigen::VectorXd mu = qr.solve(rhs);
  if (weights) {
    weights->resize(s);
    (*weights)[0] = 1.0 - mu.sum();
    weights->tail(s - 1) = mu;
  }
  return Eigen::VectorXd(p0 + a * mu);
}

inline int popcount(unsigned x) { return std::popcount(x); }

/// Smallest Euclidean ball over all support subsets of size <= D + 1; returns its squared radius.
inline double euclid_miniball2(const std::vector<Eigen::VectorXd>& pts) {
  const int n = static_cast<int>(pts.size());
  const int D = static_cast<int>(pts[0].size());
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (popcount(mask) > D + 1) continue;
    std::vector<Eigen::VectorXd> sup;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) sup.push_back(pts[i]);
    const auto c = affine_circumcenter(sup);
    if (!c) continue;
    const double r2 = (sup[0] - *c).squaredNorm();
    if (r2 >= best) continue;
    bool all = true;
    for (const auto& p : pts)
      if ((p - *c).squaredNorm() > r2 * (1.0 + 1e-10) + 1e-300) all = false;
    if (all) best = r2;
  }
  return best;
}

/// Smallest spherical cap containing pts (sphere of radius R): angular radius times R.
inline double sphere_min_cap(const std::vector<Eigen::VectorXd>& pts, double R) {
  const int n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (popcount(mask) > static_cast<int>(pts[0].size())) continue;
    std::vector<Eigen::VectorXd> sup;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) sup.push_back(pts[i]);
    const auto c = affine_circumcenter(sup);
    if (!c || c->norm() < 1e-12 * R) continue;
    const Eigen::VectorXd u = *c / c->norm();
    auto angle = [&](const Eigen::VectorXd& p) {
      const double t = p.dot(u);
      return std::atan2((p - t * u).norm(), t);
    };
    const double ang = angle(sup[0]);
    if (ang * R >= best) continue;
    bool all = true;
    for (const auto& p : pts)
      if (angle(p) > ang * (1.0 + 1e-10) + 1e-15) all = false;
    if (all) best = ang * R;
  }
  return best;
}

inline double pair_distance(const ManifoldModel& m, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) {
  if (m.is_torus()) return (a - b).norm();
  return 2.0 * m.scale() * std::atan2((a - b).norm(), (a + b).norm());
}

}  // namespace detail

/// Geodesic miniball radius of a vertex subset.
inline double subset_radius(const PointCloud& cloud, const std::vector<Index>& s) {
  const auto& m = cloud.manifold;
  const auto pts = detail::lift(cloud, s);
  if (s.size() == 1) return 0.0;
  if (s.size() == 2) return detail::pair_distance(m, pts[0], pts[1]) / 2.0;
  if (m.is_torus()) return std::sqrt(detail::euclid_miniball2(pts));
  return detail::sphere_min_cap(pts, m.scale());
}

/// Every subset of size <= dim_cap + 1 with miniball radius <= r.
inline CechComplex cech_complex(const PointCloud& cloud, double r, int dim_cap) {
  const std::size_t n = cloud.size();
  std::vector<std::vector<Index>> flat(dim_cap + 1);
  std::vector<Index> s;
  auto rec = [&](auto&& self, Index from) -> void {
    for (Index v = from; v < n; ++v) {
      s.push_back(v);
      const int k = static_cast<int>(s.size()) - 1;
      if (subset_radius(cloud, s) <= r) {
        flat[k].insert(flat[k].end(), s.begin(), s.end());
        if (k < dim_cap) self(self, v + 1);
      }
      s.pop_back();
    }
  };
  rec(rec, 0);
  return CechComplex(r, dim_cap, std::move(flat));
}

/// Clique complex of the 2r graph: the miniball test removed.
inline CechComplex rips_complex(const PointCloud& cloud, double r, int dim_cap) {
  const std::size_t n = cloud.size();
  std::vector<std::vector<Index>> flat(dim_cap + 1);
  std::vector<Index> s;
  auto rec = [&](auto&& self, Index from) -> void {
    for (Index v = from; v < n; ++v) {
      bool ok = true;
      for (Index u : s)
        if (distance(cloud.manifold, cloud.point(u), cloud.point(v)) > 2.0 * r) ok = false;
      if (!ok) continue;
      s.push_back(v);
      const int k = static_cast<int>(s.size()) - 1;
      flat[k].insert(flat[k].end(), s.begin(), s.end());
      if (k < dim_cap) self(self, v + 1);
      s.pop_back();
    }
  };
  rec(rec, 0);
  return CechComplex(r, dim_cap, std::move(flat));
}

/// GF(2) rank by dense elimination on bit-packed rows.
inline std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows) {
  std::size_t rank = 0;
  if (rows.empty()) return 0;
  const std::size_t words = rows[0].size();
  for (std::size_t col = 0; col < words * 64 && rank < rows.size(); ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t piv = rank;
    while (piv < rows.size() && !(rows[piv][w] & bit)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != rank && (rows[i][w] & bit))
        for (std::size_t t = 0; t < words; ++t) rows[i][t] ^= rows[rank][t];
    ++rank;
  }
  return rank;
}

/// Betti numbers from dense ranks of every boundary map, faces located by linear search.
inline BettiVector betti_numbers(const CechComplex& cx) {
  const int cap = cx.dim_cap();
  std::vector<std::size_t> rank(cap + 2, 0);
  for (int k = 1; k <= cap; ++k) {
    const std::size_t nrows = cx.count(k - 1);
    const std::size_t words = (nrows + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows;
    for (std::size_t i = 0; i < cx.count(k); ++i) {
      std::vector<std::uint64_t> row(std::max<std::size_t>(words, 1), 0);
      const auto s = cx.simplex(k, i);
      for (int drop = 0; drop <= k; ++drop) {
        std::vector<Index> face;
        for (int j = 0; j <= k; ++j)
          if (j != drop) face.push_back(s[j]);
        for (std::size_t f = 0; f < nrows; ++f) {
          const auto t = cx.simplex(k - 1, f);
          if (std::equal(face.begin(), face.end(), t.begin())) {
            row[f / 64] ^= std::uint64_t{1} << (f % 64);
            break;
          }
        }
      }
      rows.push_back(std::move(row));
    }
    rank[k] = gf2_rank(std::move(rows));
  }
  BettiVector out;
  for (int k = 0; k <= cap; ++k) {
    const auto f = static_cast<std::int64_t>(cx.count(k));
    out.euler += k % 2 ? -f : f;
    const auto b = f - static_cast<std::int64_t>(rank[k]) - static_cast<std::int64_t>(rank[k + 1]);
    if (k < cap)
      out.betti.push_back(b);
    else
      out.top = b;
  }
  return out;
}

/**
 * Exhaustive index-k critical points over all (k+1)-subsets: circumcenter by
 * a normal-equation solve, criticality by non-negative barycentric weights of
 * the circumcenter, emptiness by scanning the whole cloud.
 */
inline std::vector<CriticalPoint> critical_points(const PointCloud& cloud, int k, double r_lo,
                                                  double r_hi) {
  const auto& m = cloud.manifold;
  const std::size_t n = cloud.size();
  std::vector<CriticalPoint> out;
  if (k == 0) {
    for (std::size_t i = 0; i < n; ++i)
      out.push_back({0, cloud.point_copy(i), 0.0, {static_cast<Index>(i)}});
    return out;
  }
  std::vector<Index> s;
  auto visit = [&]() {
    const auto pts = detail::lift(cloud, s);
    Eigen::VectorXd w;
    const auto c = detail::affine_circumcenter(pts, &w);
    if (!c) return;
    Point center(m.ambient_dim());
    double rho;
    if (m.is_torus()) {
      for (int i = 0; i < m.dim(); ++i) {
        const double L = m.scale();
        const double x = cloud.data(s[0])[i] + (*c)[i];
        center[i] = x - L * std::floor(x / L);
        if (center[i] >= L) center[i] -= L;
      }
      rho = (pts[0] - *c).norm();
    } else {
      if (c->norm() < 1e-12) return;
      const Eigen::VectorXd u = m.scale() * *c / c->norm();
      for (int i = 0; i < m.ambient_dim(); ++i) center[i] = u[i];
      rho = detail::pair_distance(m, u, pts[0]);
    }
    if (!(rho > r_lo) || rho > r_hi) return;
    if (w.minCoeff() < -1e-9) return;
    for (std::size_t p = 0; p < n; ++p) {
      if (std::find(s.begin(), s.end(), static_cast<Index>(p)) != s.end()) continue;
      if (distance(m, center, cloud.point(p)) <= rho - 1e-12) return;
    }
    out.push_back({k, center, rho, s});
  };
  auto rec = [&](auto&& self, Index from) -> void {
    if (static_cast<int>(s.size()) == k + 1) {
      visit();
      return;
    }
    for (Index v = from; v < n; ++v) {
      s.push_back(v);
      self(self, v + 1);
      s.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rgc::oracle

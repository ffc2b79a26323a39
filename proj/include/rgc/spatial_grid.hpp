#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

#include "rgc/sampler.hpp"

namespace rgc {

using Index = std::uint32_t;

/**
 * Uniform bucket grid in chart coordinates.
 *
 * Torus: periodic cells of side at least the query radius. Sphere: cubic
 * cells in the embedding space whose side is the chord of the query radius.
 * Cell coordinates are packed into 12-bit fields.
 */
class SpatialGrid {
 public:
  SpatialGrid(const PointCloud& cloud, double radius) : cloud_(&cloud), m_(cloud.manifold) {
    const int D = m_.ambient_dim();
    double h;
    if (m_.is_torus()) {
      h = radius * (1.0 + 1e-9);
      per_side_ = std::clamp(static_cast<int>(std::floor(m_.scale() / h)), 1, kMaxCells);
      cell_ = m_.scale() / per_side_;
    } else {
      const double R = m_.scale();
      h = 2.0 * R * std::sin(std::min(radius, std::numbers::pi * R) / (2.0 * R)) * (1.0 + 1e-9);
      h = std::max(h, 2.0 * R / (kMaxCells - 2));
      cell_ = h;
      per_side_ = static_cast<int>(std::floor(2.0 * R / h)) + 2;
    }
    const std::size_t n = cloud.size();
    cells_.resize(n);
    std::vector<std::pair<std::uint64_t, Index>> keyed(n);
    for (std::size_t i = 0; i < n; ++i) {
      cells_[i] = cell_of(cloud.data(i));
      keyed[i] = {pack(cells_[i], D), static_cast<Index>(i)};
    }
    std::sort(keyed.begin(), keyed.end());
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      order_[i] = keyed[i].second;
      auto& range = buckets_[keyed[i].first];
      if (range.second == 0) range.first = static_cast<Index>(i);
      range.second = static_cast<Index>(i + 1);
    }
  }

  /// Calls f(j) for every point j in the cells adjacent to point i (including i itself).
  template <class F>
  void for_each_candidate(std::size_t i, F&& f) const {
    visit(cells_[i], [&](Index j) {
      f(j);
      return false;
    });
  }

  /// Calls f(j) for the points in the cells adjacent to p until f returns true; returns whether it did.
  template <class F>
  bool any_near(const double* p, F&& f) const {
    return visit(cell_of(p), f);
  }

  double cell_size() const { return cell_; }

 private:
  static constexpr int kMaxCells = 4000;

  std::array<int, kMaxAmbient> cell_of(const double* p) const {
    std::array<int, kMaxAmbient> c{};
    for (int a = 0; a < m_.ambient_dim(); ++a) {
      const double shifted = m_.is_torus() ? p[a] : p[a] + m_.scale();
      c[a] = std::clamp(static_cast<int>(std::floor(shifted / cell_)), 0, per_side_ - 1);
    }
    return c;
  }

  template <class F>
  bool visit(const std::array<int, kMaxAmbient>& base, F&& f) const {
    const int D = m_.ambient_dim();
    std::array<int, kMaxAmbient> off{};
    for (auto& o : off) o = -1;
    std::array<std::uint64_t, 243> seen{};
    int nseen = 0;
    while (true) {
      std::array<int, kMaxAmbient> c = base;
      bool ok = true;
      for (int a = 0; a < D; ++a) {
        c[a] += off[a];
        if (m_.is_torus()) {
          c[a] = (c[a] % per_side_ + per_side_) % per_side_;
        } else if (c[a] < 0 || c[a] >= per_side_) {
          ok = false;
        }
      }
      if (ok) {
        const auto key = pack(c, D);
        if (per_side_ >= 3 || std::find(seen.begin(), seen.begin() + nseen, key) == seen.begin() + nseen) {
          if (per_side_ < 3) seen[nseen++] = key;
          if (auto it = buckets_.find(key); it != buckets_.end())
            for (Index s = it->second.first; s < it->second.second; ++s)
              if (f(order_[s])) return true;
        }
      }
      int a = 0;
      while (a < D && ++off[a] == 2) off[a++] = -1;
      if (a == D) break;
    }
    return false;
  }

  static std::uint64_t pack(const std::array<int, kMaxAmbient>& c, int D) {
    std::uint64_t k = 0;
    for (int a = 0; a < D; ++a) k = (k << 12) | static_cast<std::uint64_t>(c[a]);
    return k;
  }

  const PointCloud* cloud_;
  ManifoldModel m_;
  double cell_ = 0.0;
  int per_side_ = 1;
  std::vector<std::array<int, kMaxAmbient>> cells_;
  std::vector<Index> order_;
  std::unordered_map<std::uint64_t, std::pair<Index, Index>> buckets_;
};

/// Symmetric graph of pairs at geodesic distance <= radius, rows ascending.
struct NeighborGraph {
  std::vector<std::size_t> offset;
  std::vector<Index> nbr;
  std::vector<double> d2;  // squared chart distance of each stored pair

  std::size_t vertex_count() const { return offset.empty() ? 0 : offset.size() - 1; }
  std::span<const Index> neighbors(std::size_t i) const {
    return {nbr.data() + offset[i], offset[i + 1] - offset[i]};
  }
  std::span<const double> dist2(std::size_t i) const {
    return {d2.data() + offset[i], offset[i + 1] - offset[i]};
  }
  std::size_t edge_count() const { return nbr.size() / 2; }
};

inline NeighborGraph build_neighbor_graph(const PointCloud& cloud, double radius) {
  NeighborGraph g;
  const std::size_t n = cloud.size();
  g.offset.assign(n + 1, 0);
  if (n == 0) return g;
  const SpatialGrid grid(cloud, radius);
  const auto& m = cloud.manifold;
  std::vector<std::pair<Index, double>> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    const double* p = cloud.data(i);
    grid.for_each_candidate(i, [&](Index j) {
      if (j == i) return;
      const double* q = cloud.data(j);
      if (detail::geodesic_distance(m, p, q) <= radius)
        row.emplace_back(j, detail::chart_dist2(m, p, q));
    });
    std::sort(row.begin(), row.end());
    for (const auto& [j, d] : row) {
      g.nbr.push_back(j);
      g.d2.push_back(d);
    }
    g.offset[i + 1] = g.nbr.size();
  }
  return g;
}

}  // namespace rgc

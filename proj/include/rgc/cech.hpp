#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rgc/detail/ball.hpp"
#include "rgc/error.hpp"
#include "rgc/sampler.hpp"
#include "rgc/spatial_grid.hpp"

namespace rgc {

/// Highest dimension the fixed-size miniball kernels support.
inline constexpr int kMaxDimCap = kMaxSimplexSize - 1;

/**
 * Canonical geodesic miniball radius of the vertex set `verts` (sorted).
 *
 * Pairs return distance / 2 exactly. Larger sets run Welzl in the chart of
 * the first vertex, so the result depends only on the sorted vertex list.
 */
class SimplexBall {
 public:
  SimplexBall(const PointCloud& cloud) : cloud_(&cloud), builder_(cloud.manifold.ambient_dim()) {}

  void push(Index v) {
    const auto& m = cloud_->manifold;
    if (builder_.size() == 0) first_ = v;
    if (builder_.size() == 1) second_ = v;
    builder_.push(detail::to_chart(m, cloud_->data(first_), cloud_->data(v)));
  }

  double radius() const {
    const auto& m = cloud_->manifold;
    switch (builder_.size()) {
      case 0:
      case 1:
        return 0.0;
      case 2:
        return detail::geodesic_distance(m, cloud_->data(first_), cloud_->data(second_)) / 2.0;
      default:
        return detail::geodesic_radius(m, builder_.ball());
    }
  }

  const detail::EuclidBall& chart_ball() const { return builder_.ball(); }
  Index base() const { return first_; }

 private:
  const PointCloud* cloud_;
  detail::MiniballBuilder<kMaxSimplexSize> builder_;
  Index first_ = 0;
  Index second_ = 0;
};

inline double simplex_radius(const PointCloud& cloud, std::span<const Index> verts) {
  SimplexBall b(cloud);
  for (Index v : verts) b.push(v);
  return b.radius();
}

/// Simplices per dimension, each a strictly increasing vertex tuple, lexicographically sorted.
class CechComplex {
 public:
  CechComplex() = default;

  /// Takes per-dimension flat tuple lists; sorts and validates them.
  CechComplex(double r, int dim_cap, std::vector<std::vector<Index>> flat)
      : r_(r), dim_cap_(dim_cap), flat_(std::move(flat)) {
    if (dim_cap < 0) throw InvalidInput("dim_cap must be non-negative");
    if (static_cast<int>(flat_.size()) > dim_cap + 1) throw InvalidInput("simplex above dim_cap");
    flat_.resize(dim_cap + 1);
    for (int k = 0; k <= dim_cap; ++k) canonicalize(k);
  }

  static CechComplex from_simplices(const std::vector<std::vector<Index>>& simplices, int dim_cap,
                                    double r = 0.0) {
    std::vector<std::vector<Index>> flat(dim_cap + 1);
    for (auto s : simplices) {
      if (s.empty()) throw InvalidInput("empty simplex");
      const int k = static_cast<int>(s.size()) - 1;
      if (k > dim_cap) throw InvalidInput("simplex above dim_cap");
      std::sort(s.begin(), s.end());
      flat[k].insert(flat[k].end(), s.begin(), s.end());
    }
    return CechComplex(r, dim_cap, std::move(flat));
  }

  double radius() const { return r_; }
  int dim_cap() const { return dim_cap_; }
  std::uint64_t cloud_seed = 0;
  std::size_t cloud_size = 0;

  std::size_t count(int k) const {
    if (k < 0 || k > dim_cap_) return 0;
    return flat_[k].size() / (k + 1);
  }
  std::span<const Index> simplex(int k, std::size_t i) const {
    return {flat_[k].data() + i * (k + 1), static_cast<std::size_t>(k + 1)};
  }
  const std::vector<Index>& flat(int k) const { return flat_[k]; }

  /// Position of a sorted tuple within its dimension, or -1.
  std::ptrdiff_t find(std::span<const Index> s) const {
    const int k = static_cast<int>(s.size()) - 1;
    if (k < 0 || k > dim_cap_) return -1;
    std::size_t lo = 0, hi = count(k);
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const auto t = simplex(k, mid);
      if (std::lexicographical_compare(t.begin(), t.end(), s.begin(), s.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < count(k) && std::equal(s.begin(), s.end(), simplex(k, lo).begin())) return lo;
    return -1;
  }

  bool is_face_closed() const {
    std::vector<Index> face;
    for (int k = 1; k <= dim_cap_; ++k) {
      for (std::size_t i = 0; i < count(k); ++i) {
        const auto s = simplex(k, i);
        for (int drop = 0; drop <= k; ++drop) {
          face.clear();
          for (int j = 0; j <= k; ++j)
            if (j != drop) face.push_back(s[j]);
          if (find(face) < 0) return false;
        }
      }
    }
    return true;
  }

  /// Counts f_0..f_t where t is the highest non-empty dimension; empty for an empty complex.
  std::vector<std::size_t> f_vector() const {
    std::vector<std::size_t> f;
    for (int k = 0; k <= dim_cap_; ++k) f.push_back(count(k));
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
  }

  std::size_t total() const {
    std::size_t t = 0;
    for (int k = 0; k <= dim_cap_; ++k) t += count(k);
    return t;
  }

  std::string to_text() const {
    std::ostringstream os;
    for (int k = 0; k <= dim_cap_; ++k)
      for (std::size_t i = 0; i < count(k); ++i) {
        const auto s = simplex(k, i);
        for (int j = 0; j <= k; ++j) os << (j ? " " : "") << s[j];
        os << '\n';
      }
    return os.str();
  }

 private:
  void canonicalize(int k) {
    auto& f = flat_[k];
    const std::size_t w = k + 1;
    if (f.size() % w) throw InvalidInput("ragged simplex list");
    const std::size_t n = f.size() / w;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    bool sorted = true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 1; j < w; ++j)
        if (f[i * w + j - 1] >= f[i * w + j]) throw InvalidInput("vertex tuple not strictly increasing");
      if (i > 0 && !std::lexicographical_compare(f.begin() + (i - 1) * w, f.begin() + i * w,
                                                 f.begin() + i * w, f.begin() + (i + 1) * w))
        sorted = false;
    }
    if (sorted) return;
    auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(f.begin() + a * w, f.begin() + (a + 1) * w,
                                          f.begin() + b * w, f.begin() + (b + 1) * w);
    };
    std::sort(idx.begin(), idx.end(), less);
    std::vector<Index> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && !less(idx[i - 1], idx[i])) throw InvalidInput("duplicate simplex");
      out.insert(out.end(), f.begin() + idx[i] * w, f.begin() + (idx[i] + 1) * w);
    }
    f = std::move(out);
  }

  double r_ = 0.0;
  int dim_cap_ = 0;
  std::vector<std::vector<Index>> flat_{1};
};

inline void check_radius(const ManifoldModel& m, double r) {
  if (!(r > 0.0) || r > m.convexity_radius())
    throw OutOfRegime("radius " + format_real(r) + " outside (0, " +
                      format_real(m.convexity_radius()) + "]");
}

namespace detail {

/// Ordered clique expansion on the 2r graph with the miniball filter; calls
/// emit(k, verts) for every Cech simplex of dimension 1..cap in lexicographic order per dimension.
template <class Emit>
void expand_cliques(const PointCloud& cloud, const NeighborGraph& g, double r, int cap,
                    Emit&& emit) {
  const std::size_t n = cloud.size();
  std::array<Index, kMaxSimplexSize> verts{};
  std::vector<std::vector<Index>> cand(cap + 1);

  auto rec = [&](auto&& self, int k, const SimplexBall& ball) -> void {
    // verts[0..k] is a k-simplex; cand[k] holds higher common neighbors.
    const auto& c = cand[k];
    for (std::size_t t = 0; t < c.size(); ++t) {
      const Index v = c[t];
      SimplexBall next = ball;
      next.push(v);
      verts[k + 1] = v;
      if (k + 1 >= 2 && next.radius() > r) continue;
      emit(k + 1, std::span<const Index>(verts.data(), k + 2));
      if (k + 1 < cap) {
        auto& nc = cand[k + 1];
        nc.clear();
        const auto nv = g.neighbors(v);
        auto it = std::upper_bound(nv.begin(), nv.end(), v);
        std::set_intersection(c.begin() + t + 1, c.end(), it, nv.end(), std::back_inserter(nc));
        if (!nc.empty()) self(self, k + 1, next);
      }
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (cap < 1) break;
    verts[0] = static_cast<Index>(i);
    SimplexBall ball(cloud);
    ball.push(verts[0]);
    const auto nv = g.neighbors(i);
    cand[0].assign(std::upper_bound(nv.begin(), nv.end(), static_cast<Index>(i)), nv.end());
    rec(rec, 0, ball);
  }
}

}  // namespace detail

/// Cech complex at radius r (closed balls) up to dimension dim_cap (default d + 1).
inline CechComplex build_complex(const PointCloud& cloud, double r,
                                 std::optional<int> dim_cap = std::nullopt) {
  const auto& m = cloud.manifold;
  check_radius(m, r);
  const int cap = dim_cap.value_or(m.dim() + 1);
  if (cap < 0 || cap > kMaxDimCap)
    throw InvalidInput("dim_cap must lie in [0, " + std::to_string(kMaxDimCap) + "]");
  std::vector<std::vector<Index>> flat(cap + 1);
  for (std::size_t i = 0; i < cloud.size(); ++i) flat[0].push_back(static_cast<Index>(i));
  if (cap >= 1 && cloud.size() > 1) {
    const auto g = build_neighbor_graph(cloud, 2.0 * r);
    detail::expand_cliques(cloud, g, r, cap, [&](int k, std::span<const Index> s) {
      flat[k].insert(flat[k].end(), s.begin(), s.end());
    });
  }
  CechComplex cx(r, cap, std::move(flat));
  cx.cloud_seed = cloud.seed;
  cx.cloud_size = cloud.size();
  return cx;
}

}  // namespace rgc

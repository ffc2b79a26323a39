#pragma once

// Small dense geometry in a Euclidean chart: circumspheres of affinely
// independent point sets and the move-to-front Welzl minimal enclosing ball.

#include <algorithm>
#include <array>
#include <cmath>

namespace rgc {

inline constexpr int kMaxDim = 4;
inline constexpr int kMaxAmbient = kMaxDim + 1;
inline constexpr int kMaxSimplexSize = kMaxDim + 2;

using Coords = std::array<double, kMaxAmbient>;

namespace detail {

inline double dot(const Coords& a, const Coords& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double dist2(const Coords& a, const Coords& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

struct EuclidBall {
  Coords center{};
  double radius2 = -1.0;  // negative means empty
};

inline bool inside(const Coords& p, const EuclidBall& b, int n) {
  if (b.radius2 < 0.0) return false;
  return dist2(p, b.center, n) <= b.radius2 * (1.0 + 1e-12);
}

struct Circumsphere {
  EuclidBall ball;
  std::array<double, kMaxSimplexSize> bary{};  // affine weights of the center
  int rank = 0;                                // affine rank of the point set
};

/**
 * Center of the sphere through pts[0..m) lying in their affine hull.
 *
 * Uses modified Gram-Schmidt on the edge vectors from pts[0]. Vectors whose
 * residual falls below a relative tolerance are dropped, so the result is
 * still a ball containing every input point when the set is degenerate.
 */
inline Circumsphere circumsphere(const Coords* const* pts, int m, int n) {
  Circumsphere out;
  if (m == 0) return out;
  const Coords& p0 = *pts[0];
  out.ball.center = p0;
  out.ball.radius2 = 0.0;
  out.bary[0] = 1.0;
  if (m == 1) return out;

  const int e = m - 1;
  std::array<Coords, kMaxSimplexSize> a{};
  std::array<Coords, kMaxSimplexSize> q{};
  std::array<std::array<double, kMaxSimplexSize>, kMaxSimplexSize> rr{};
  std::array<int, kMaxSimplexSize> used{};
  int rank = 0;
  for (int j = 0; j < e; ++j) {
    for (int i = 0; i < n; ++i) a[j][i] = (*pts[j + 1])[i] - p0[i];
    Coords v = a[j];
    const double norm0 = std::sqrt(dot(v, v, n));
    for (int t = 0; t < rank; ++t) {
      const double c = dot(q[t], v, n);
      rr[t][rank] = c;
      for (int i = 0; i < n; ++i) v[i] -= c * q[t][i];
    }
    const double res = std::sqrt(dot(v, v, n));
    if (norm0 == 0.0 || res <= 1e-10 * norm0) continue;
    rr[rank][rank] = res;
    for (int i = 0; i < n; ++i) q[rank][i] = v[i] / res;
    used[rank] = j;
    ++rank;
  }
  out.rank = rank;

  // a_j . x = |a_j|^2 / 2 with x = sum_t y_t q_t; R is upper triangular.
  std::array<double, kMaxSimplexSize> y{};
  for (int t = 0; t < rank; ++t) {
    const int j = used[t];
    double s = 0.5 * dot(a[j], a[j], n);
    for (int u = 0; u < t; ++u) s -= rr[u][t] * y[u];
    y[t] = s / rr[t][t];
  }
  // x = sum_t lambda_t a_{used[t]}  <=>  R lambda = y.
  std::array<double, kMaxSimplexSize> lam{};
  for (int t = rank - 1; t >= 0; --t) {
    double s = y[t];
    for (int u = t + 1; u < rank; ++u) s -= rr[t][u] * lam[u];
    lam[t] = s / rr[t][t];
  }
  Coords x{};
  for (int t = 0; t < rank; ++t)
    for (int i = 0; i < n; ++i) x[i] += y[t] * q[t][i];

  double lsum = 0.0;
  for (int t = 0; t < rank; ++t) {
    out.bary[used[t] + 1] = lam[t];
    lsum += lam[t];
  }
  out.bary[0] = 1.0 - lsum;
  for (int i = 0; i < n; ++i) out.ball.center[i] = p0[i] + x[i];
  double r2 = dot(x, x, n);
  for (int j = 1; j < m; ++j) r2 = std::max(r2, dist2(*pts[j], out.ball.center, n));
  out.ball.radius2 = r2;
  return out;
}

inline EuclidBall mtf_recurse(const Coords* pts, int* order, int count, const Coords** support,
                              int ns, int n) {
  EuclidBall b = ns == 0 ? EuclidBall{} : circumsphere(support, ns, n).ball;
  if (ns == n + 1) return b;
  for (int i = 0; i < count; ++i) {
    const Coords& p = pts[order[i]];
    if (inside(p, b, n)) continue;
    support[ns] = &p;
    b = mtf_recurse(pts, order, i, support, ns + 1, n);
    std::rotate(order, order + i, order + i + 1);
  }
  return b;
}

/**
 * Incremental move-to-front Welzl over at most Cap points.
 *
 * Pushing points one at a time reproduces exactly the computation of a
 * single run over the whole ordered list, so a cached prefix state can be
 * extended by one vertex and still give the canonical result bit for bit.
 */
template <int Cap>
class MiniballBuilder {
 public:
  explicit MiniballBuilder(int n) : n_(n) {}

  void push(const Coords& p) {
    pts_[count_] = p;
    order_[count_] = count_;
    if (!inside(p, ball_, n_)) {
      std::array<const Coords*, kMaxSimplexSize + 1> support{};
      support[0] = &pts_[count_];
      ball_ = mtf_recurse(pts_.data(), order_.data(), count_, support.data(), 1, n_);
      std::rotate(order_.begin(), order_.begin() + count_, order_.begin() + count_ + 1);
    }
    ++count_;
  }

  const EuclidBall& ball() const { return ball_; }
  int size() const { return count_; }

 private:
  int n_;
  int count_ = 0;
  std::array<Coords, Cap> pts_{};
  std::array<int, Cap> order_{};
  EuclidBall ball_{};
};

}  // namespace detail
}  // namespace rgc

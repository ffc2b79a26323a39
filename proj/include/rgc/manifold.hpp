#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgc/detail/ball.hpp"
#include "rgc/error.hpp"
#include "rgc/random.hpp"

namespace rgc {

using Point = std::vector<double>;

/// Volume of the Euclidean unit d-ball, pi^{d/2} / Gamma(d/2 + 1).
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

enum class ManifoldKind { flat_torus, round_sphere };

/// Flat torus [0, L)^d or round sphere of radius R embedded in R^{d+1}.
class ManifoldModel {
 public:
  static ManifoldModel flat_torus(int d, double side = 1.0) {
    return ManifoldModel(ManifoldKind::flat_torus, d, side);
  }
  static ManifoldModel round_sphere(int d, double radius = 1.0) {
    return ManifoldModel(ManifoldKind::round_sphere, d, radius);
  }
  /// Sphere whose total volume is one.
  static ManifoldModel unit_volume_sphere(int d) {
    const double area = (d + 1) * unit_ball_volume(d + 1);
    return round_sphere(d, std::pow(1.0 / area, 1.0 / d));
  }

  ManifoldKind kind() const { return kind_; }
  bool is_torus() const { return kind_ == ManifoldKind::flat_torus; }
  int dim() const { return d_; }
  double scale() const { return scale_; }
  int ambient_dim() const { return is_torus() ? d_ : d_ + 1; }
  std::string name() const { return is_torus() ? "torus" : "sphere"; }

  double volume() const {
    if (is_torus()) return std::pow(scale_, d_);
    return (d_ + 1) * unit_ball_volume(d_ + 1) * std::pow(scale_, d_);
  }
  double scalar_curvature() const {
    return is_torus() ? 0.0 : d_ * (d_ - 1) / (scale_ * scale_);
  }
  double convexity_radius() const {
    return is_torus() ? scale_ / 4.0 : std::numbers::pi * scale_ / 4.0;
  }
  double injectivity_radius() const {
    return is_torus() ? scale_ / 2.0 : std::numbers::pi * scale_;
  }

  /// Throws InvalidInput unless p has the ambient dimension and lies on the manifold.
  void check_point(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != ambient_dim())
      throw InvalidInput("point has dimension " + std::to_string(p.size()) + ", expected " +
                         std::to_string(ambient_dim()));
    for (double x : p)
      if (!std::isfinite(x)) throw InvalidInput("non-finite coordinate");
    if (is_torus()) {
      for (double x : p)
        if (x < 0.0 || x >= scale_) throw InvalidInput("torus coordinate outside [0, L)");
    } else {
      double s = 0.0;
      for (double x : p) s += x * x;
      if (std::abs(std::sqrt(s) - scale_) > 1e-12 * scale_)
        throw InvalidInput("point is not on the sphere");
    }
  }

  /// Shortest signed representative of a coordinate difference on the torus.
  double wrap_diff(double x) const {
    const double h = 0.5 * scale_;
    if (x > h) return x - scale_;
    if (x < -h) return x + scale_;
    return x;
  }

  /// Reduce a torus coordinate into [0, L).
  double wrap_coord(double x) const {
    double y = x - scale_ * std::floor(x / scale_);
    if (y >= scale_ || y < 0.0) y = 0.0;
    return y;
  }

 private:
  ManifoldModel(ManifoldKind kind, int d, double scale) : kind_(kind), d_(d), scale_(scale) {
    if (d < 1 || d > kMaxDim)
      throw InvalidInput("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("scale must be positive");
  }

  ManifoldKind kind_;
  int d_;
  double scale_;
};

inline bool operator==(const ManifoldModel& a, const ManifoldModel& b) {
  return a.kind() == b.kind() && a.dim() == b.dim() && a.scale() == b.scale();
}

namespace detail {

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Squared chart distance: wrapped on the torus, chordal on the sphere.
inline double chart_dist2(const ManifoldModel& m, const double* p, const double* q) {
  double s = 0.0;
  if (m.is_torus()) {
    for (int i = 0; i < m.dim(); ++i) {
      const double t = m.wrap_diff(q[i] - p[i]);
      s += t * t;
    }
  } else {
    for (int i = 0; i <= m.dim(); ++i) {
      const double t = q[i] - p[i];
      s += t * t;
    }
  }
  return s;
}

inline double geodesic_distance(const ManifoldModel& m, const double* p, const double* q) {
  if (m.is_torus()) return std::sqrt(chart_dist2(m, p, q));
  double dm = 0.0, dp = 0.0;
  for (int i = 0; i <= m.dim(); ++i) {
    dm += (p[i] - q[i]) * (p[i] - q[i]);
    dp += (p[i] + q[i]) * (p[i] + q[i]);
  }
  return 2.0 * m.scale() * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

/// Chart coordinates of p: lifted relative to base on the torus, raw on the sphere.
inline Coords to_chart(const ManifoldModel& m, const double* base, const double* p) {
  Coords c{};
  if (m.is_torus()) {
    for (int i = 0; i < m.dim(); ++i) c[i] = m.wrap_diff(p[i] - base[i]);
  } else {
    for (int i = 0; i <= m.dim(); ++i) c[i] = p[i];
  }
  return c;
}

/// Geodesic radius of a chart ball.
inline double geodesic_radius(const ManifoldModel& m, const EuclidBall& b) {
  const double rho = std::sqrt(std::max(0.0, b.radius2));
  if (m.is_torus()) return rho;
  const double c = std::sqrt(dot(b.center, b.center, m.ambient_dim()));
  return m.scale() * std::atan2(rho, c);
}

/// Manifold point of a chart center; nullopt when a sphere center sits at the origin.
inline std::optional<Point> chart_to_point(const ManifoldModel& m, const double* base,
                                           const Coords& c) {
  Point out(m.ambient_dim());
  if (m.is_torus()) {
    for (int i = 0; i < m.dim(); ++i) out[i] = m.wrap_coord(base[i] + c[i]);
    return out;
  }
  const double nc = std::sqrt(dot(c, c, m.ambient_dim()));
  if (nc <= 1e-12 * m.scale()) return std::nullopt;
  for (int i = 0; i < m.ambient_dim(); ++i) out[i] = m.scale() * c[i] / nc;
  return out;
}

/// Orthonormal tangent frame at a sphere point from a Householder reflection.
struct SphereFrame {
  std::array<Coords, kMaxDim> f{};

  SphereFrame(const ManifoldModel& m, const double* p) {
    const int D = m.ambient_dim();
    const int d = m.dim();
    Coords w{};
    double n = 0.0;
    for (int i = 0; i < D; ++i) n += p[i] * p[i];
    n = std::sqrt(n);
    for (int i = 0; i < D; ++i) w[i] = p[i] / n;
    const double s = w[d] >= 0.0 ? 1.0 : -1.0;
    w[d] += s;
    const double ww = dot(w, w, D);
    for (int j = 0; j < d; ++j) {
      Coords e{};
      e[j] = 1.0;
      const double k = 2.0 * w[j] / ww;
      for (int i = 0; i < D; ++i) e[i] -= k * w[i];
      f[j] = e;
    }
  }
};

}  // namespace detail

/// Geodesic distance.
inline double distance(const ManifoldModel& m, std::span<const double> p,
                       std::span<const double> q) {
  return detail::geodesic_distance(m, p.data(), q.data());
}

/**
 * Tangent vector at p pointing to q with length distance(p, q), expressed in
 * an orthonormal frame. Torus frame: coordinate axes. Sphere frame: image of
 * the first d axes under the Householder reflection taking p/|p| to -+e_d.
 */
inline Point log_map(const ManifoldModel& m, std::span<const double> p,
                     std::span<const double> q) {
  const int d = m.dim();
  Point v(d, 0.0);
  if (m.is_torus()) {
    for (int i = 0; i < d; ++i) {
      const double raw = q[i] - p[i];
      const double t = m.wrap_diff(raw);
      if (std::abs(t) == 0.5 * m.scale())
        throw DegenerateGeodesic("torus points are exactly half a period apart");
      v[i] = t;
    }
    return v;
  }
  const int D = m.ambient_dim();
  const double R = m.scale();
  double sum2 = 0.0;
  for (int i = 0; i < D; ++i) sum2 += (p[i] + q[i]) * (p[i] + q[i]);
  if (std::sqrt(sum2) <= 1e-12 * R) throw DegenerateGeodesic("antipodal points on the sphere");
  const double theta = distance(m, p, q) / R;
  if (theta == 0.0) return v;
  Coords u{};
  double pd = 0.0;
  for (int i = 0; i < D; ++i) pd += p[i] * (q[i] - p[i]);
  pd /= R * R;
  for (int i = 0; i < D; ++i) u[i] = (q[i] - p[i]) - pd * p[i];
  const double un = std::sqrt(detail::dot(u, u, D));
  if (un == 0.0) return v;
  const detail::SphereFrame fr(m, p.data());
  for (int j = 0; j < d; ++j) v[j] = theta * R * detail::dot(fr.f[j], u, D) / un;
  return v;
}

/// Inverse of log_map for |v| below the injectivity radius.
inline Point exp_map(const ManifoldModel& m, std::span<const double> p, std::span<const double> v) {
  const int d = m.dim();
  if (static_cast<int>(v.size()) != d) throw InvalidInput("tangent vector has wrong dimension");
  const double t = detail::norm(v);
  if (t >= m.injectivity_radius()) throw OutOfRegime("tangent vector beyond injectivity radius");
  Point out(m.ambient_dim());
  if (m.is_torus()) {
    for (int i = 0; i < d; ++i) out[i] = m.wrap_coord(p[i] + v[i]);
    return out;
  }
  const int D = m.ambient_dim();
  const double R = m.scale();
  if (t == 0.0) return Point(p.begin(), p.end());
  const detail::SphereFrame fr(m, p.data());
  Coords u{};
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < D; ++i) u[i] += v[j] * fr.f[j][i];
  const double th = t / R;
  double n2 = 0.0;
  for (int i = 0; i < D; ++i) {
    out[i] = p[i] * std::cos(th) + R * std::sin(th) * u[i] / t;
    n2 += out[i] * out[i];
  }
  const double k = R / std::sqrt(n2);
  for (double& x : out) x *= k;
  return out;
}

/// Center and geodesic radius of a ball.
struct GeodesicBall {
  Point center;
  double radius = 0.0;
};

/**
 * Point equidistant from all of Y inside the image of their affine hull.
 * Returns nullopt for affinely dependent Y or a sphere center at the origin.
 */
inline std::optional<GeodesicBall> circumcenter(const ManifoldModel& m,
                                                const std::vector<Point>& ys) {
  const int k = static_cast<int>(ys.size());
  if (k == 0 || k > m.dim() + 1) throw InvalidInput("circumcenter needs 1..d+1 points");
  for (const auto& y : ys) m.check_point(y);
  const int D = m.ambient_dim();
  std::array<Coords, kMaxSimplexSize> c{};
  std::array<const Coords*, kMaxSimplexSize> ptr{};
  for (int i = 0; i < k; ++i) {
    c[i] = detail::to_chart(m, ys[0].data(), ys[i].data());
    ptr[i] = &c[i];
  }
  const auto cs = detail::circumsphere(ptr.data(), k, D);
  if (cs.rank != k - 1) return std::nullopt;
  auto center = detail::chart_to_point(m, ys[0].data(), cs.ball.center);
  if (!center) return std::nullopt;
  return GeodesicBall{std::move(*center), detail::geodesic_radius(m, cs.ball)};
}

/// Smallest geodesic ball containing Y; Y must have diameter below twice the convexity radius.
inline GeodesicBall min_enclosing_ball(const ManifoldModel& m, const std::vector<Point>& ys) {
  if (ys.empty()) throw InvalidInput("min_enclosing_ball of an empty set");
  for (const auto& y : ys) m.check_point(y);
  const double lim = 2.0 * m.convexity_radius();
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (std::size_t j = i + 1; j < ys.size(); ++j)
      if (distance(m, ys[i], ys[j]) >= lim) throw OutOfRegime("point set too spread out");
  if (ys.size() == 1) return {ys[0], 0.0};
  if (ys.size() == 2) {
    auto v = log_map(m, ys[0], ys[1]);
    for (double& x : v) x *= 0.5;
    return {exp_map(m, ys[0], v), distance(m, ys[0], ys[1]) / 2.0};
  }
  const int D = m.ambient_dim();
  std::vector<Coords> c(ys.size());
  std::vector<int> order(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    c[i] = detail::to_chart(m, ys[0].data(), ys[i].data());
    order[i] = static_cast<int>(i);
  }
  std::array<const Coords*, kMaxSimplexSize + 1> support{};
  const auto b = detail::mtf_recurse(c.data(), order.data(), static_cast<int>(c.size()),
                                     support.data(), 0, D);
  auto center = detail::chart_to_point(m, ys[0].data(), b.center);
  if (!center) throw OutOfRegime("enclosing ball center is undefined");
  return {std::move(*center), detail::geodesic_radius(m, b)};
}

/// Volume of a geodesic ball of radius r.
inline double ball_volume(const ManifoldModel& m, double r) {
  if (!(r >= 0.0)) throw InvalidInput("radius must be non-negative");
  const int d = m.dim();
  if (m.is_torus()) {
    if (r > m.scale() / 2.0) throw OutOfRegime("ball wraps around the torus");
    return unit_ball_volume(d) * std::pow(r, d);
  }
  const double R = m.scale();
  if (r > std::numbers::pi * R) throw OutOfRegime("radius exceeds the sphere diameter");
  const double th = r / R;
  // I_k = int_0^th sin^k, I_k = (-sin^{k-1} cos + (k-1) I_{k-2}) / k
  double i0 = th, i1 = 1.0 - std::cos(th);
  double ik = d - 1 == 0 ? i0 : i1;
  for (int k = 2; k <= d - 1; ++k) {
    ik = (-std::pow(std::sin(th), k - 1) * std::cos(th) + (k - 1) * i0) / k;
    i0 = i1;
    i1 = ik;
  }
  return d * unit_ball_volume(d) * std::pow(R, d) * ik;
}

/// Small-radius expansion omega_d r^d (1 - s r^2 / (6 (d + 2))).
inline double ball_volume_expansion(const ManifoldModel& m, double r) {
  const int d = m.dim();
  return unit_ball_volume(d) * std::pow(r, d) *
         (1.0 - m.scalar_curvature() * r * r / (6.0 * (d + 2)));
}

/// Annulus {x : r_in <= dist(center, x) <= r_out}.
struct Annulus {
  Point center;
  double r_in = 0.0;
  double r_out = 0.0;
};

namespace detail {

/// Cubic lattice in [-half, half]^dim with spacing h, visited in odometer order.
template <class F>
void for_each_lattice(int dim, int per_side, double h, double origin, F&& f) {
  std::array<int, kMaxAmbient> idx{};
  Coords x{};
  while (true) {
    for (int i = 0; i < dim; ++i) x[i] = origin + h * idx[i];
    f(x);
    int i = 0;
    while (i < dim && ++idx[i] == per_side) idx[i++] = 0;
    if (i == dim) break;
  }
}

}  // namespace detail

/**
 * Deterministic delta-net: every point of the manifold (or of the annulus)
 * lies within delta of some visited point. Calls f(point) until it returns
 * true; returns whether it did.
 *
 * Torus: cubic lattice with spacing at most delta / sqrt(d).
 * Sphere: cube-sphere lattice, each face gridded and projected radially.
 * Annulus: cubic lattice in the tangent ball pushed through exp_map.
 */
template <class F>
bool visit_net(const ManifoldModel& m, double delta, const std::optional<Annulus>& region, F&& f) {
  if (!(delta > 0.0)) throw InvalidInput("net spacing must be positive");
  const int d = m.dim();
  bool stop = false;
  if (region) {
    const auto& a = *region;
    m.check_point(a.center);
    if (!(a.r_in >= 0.0) || a.r_out < a.r_in) throw InvalidInput("bad annulus radii");
    const double h = delta / std::sqrt(static_cast<double>(d));
    const double slack = 0.5 * h * std::sqrt(static_cast<double>(d));
    if (a.r_out + slack >= m.injectivity_radius()) throw OutOfRegime("annulus too large");
    const int per_side = 2 * static_cast<int>(std::ceil((a.r_out + slack) / h)) + 1;
    const double origin = -h * (per_side / 2);
    detail::for_each_lattice(d, per_side, h, origin, [&](const Coords& x) {
      if (stop) return;
      double n = 0.0;
      for (int i = 0; i < d; ++i) n += x[i] * x[i];
      n = std::sqrt(n);
      if (n < a.r_in - slack || n > a.r_out + slack) return;
      stop = f(exp_map(m, a.center, std::span<const double>(x.data(), d)));
    });
    return stop;
  }
  if (m.is_torus()) {
    const double L = m.scale();
    const int per_side = std::max(1, static_cast<int>(std::ceil(L * std::sqrt(1.0 * d) / delta)));
    const double h = L / per_side;
    detail::for_each_lattice(d, per_side, h, 0.0, [&](const Coords& x) {
      if (!stop) stop = f(Point(x.begin(), x.begin() + d));
    });
    return stop;
  }
  const double R = m.scale();
  const int D = m.ambient_dim();
  if (delta >= std::numbers::pi * R) {
    Point p(D, 0.0);
    p[d] = R;
    return f(std::move(p));
  }
  // Face lattice spacing h on the cube [-1, 1]^{D}; radial projection is 1-Lipschitz
  // from the cube surface, so a face covering radius sqrt(d) h / 2 maps to a chord
  // of at most R sqrt(d) h / 2.
  const double chord = 2.0 * R * std::sin(delta / (2.0 * R));
  const double h0 = 2.0 * chord / (R * std::sqrt(1.0 * d));
  const int per_side = std::max(1, static_cast<int>(std::ceil(2.0 / h0))) + 1;
  const double h = 2.0 / (per_side - 1);
  for (int axis = 0; axis < D && !stop; ++axis) {
    for (int sgn = -1; sgn <= 1 && !stop; sgn += 2) {
      detail::for_each_lattice(d, per_side, h, -1.0, [&](const Coords& x) {
        if (stop) return;
        Point p(D);
        int j = 0;
        double n2 = 1.0;
        for (int i = 0; i < D; ++i) {
          if (i == axis) {
            p[i] = sgn;
          } else {
            p[i] = x[j++];
            n2 += p[i] * p[i];
          }
        }
        const double k = R / std::sqrt(n2);
        for (double& v : p) v *= k;
        stop = f(std::move(p));
      });
    }
  }
  return stop;
}

inline std::vector<Point> build_net(const ManifoldModel& m, double delta,
                                    const std::optional<Annulus>& region = std::nullopt) {
  std::vector<Point> out;
  visit_net(m, delta, region, [&](Point p) {
    out.push_back(std::move(p));
    return false;
  });
  return out;
}

/// count independent uniform points, appended to a flat buffer.
inline void uniform_sample_into(const ManifoldModel& m, std::size_t count, Rng& rng,
                                std::vector<double>& flat) {
  const int D = m.ambient_dim();
  flat.reserve(flat.size() + count * D);
  for (std::size_t s = 0; s < count; ++s) {
    if (m.is_torus()) {
      for (int i = 0; i < D; ++i) flat.push_back(m.wrap_coord(m.scale() * rng.uniform()));
    } else {
      Coords g{};
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (int i = 0; i < D; ++i) {
          g[i] = rng.normal();
          n2 += g[i] * g[i];
        }
      } while (n2 == 0.0);
      const double k = m.scale() / std::sqrt(n2);
      for (int i = 0; i < D; ++i) flat.push_back(g[i] * k);
    }
  }
}

inline std::vector<Point> uniform_sample(const ManifoldModel& m, std::size_t count, Rng& rng) {
  std::vector<double> flat;
  uniform_sample_into(m, count, rng, flat);
  const int D = m.ambient_dim();
  std::vector<Point> out(count);
  for (std::size_t s = 0; s < count; ++s)
    out[s].assign(flat.begin() + s * D, flat.begin() + (s + 1) * D);
  return out;
}

}  // namespace rgc

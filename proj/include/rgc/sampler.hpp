#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "rgc/error.hpp"
#include "rgc/manifold.hpp"
#include "rgc/random.hpp"

namespace rgc {

/// Points stored flat with stride ambient_dim().
struct PointCloud {
  ManifoldModel manifold;
  std::vector<double> coords;
  double intensity_n = 0.0;
  std::uint64_t seed = 0;

  explicit PointCloud(ManifoldModel m) : manifold(m) {}
  PointCloud(ManifoldModel m, const std::vector<Point>& pts) : manifold(m) {
    for (const auto& p : pts) add(p);
    intensity_n = static_cast<double>(pts.size());
  }

  std::size_t size() const { return coords.size() / manifold.ambient_dim(); }
  bool empty() const { return coords.empty(); }
  const double* data(std::size_t i) const { return coords.data() + i * manifold.ambient_dim(); }
  std::span<const double> point(std::size_t i) const {
    return {data(i), static_cast<std::size_t>(manifold.ambient_dim())};
  }
  Point point_copy(std::size_t i) const { return Point(data(i), data(i) + manifold.ambient_dim()); }

  void add(std::span<const double> p) {
    manifold.check_point(p);
    coords.insert(coords.end(), p.begin(), p.end());
  }
};

/// Poisson(mean) variate: inversion below 30, Hormann's PTRS rejection above.
inline std::uint64_t poisson_variate(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p == 0.0 && cdf < u) break;
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_pos();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

/// Homogeneous Poisson process with intensity n on m, deterministic in seed.
inline PointCloud poisson_process(const ManifoldModel& m, double n, std::uint64_t seed) {
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("intensity must be positive");
  Rng rng(seed);
  const auto count = poisson_variate(rng, n);
  PointCloud cloud(m);
  cloud.intensity_n = n;
  cloud.seed = seed;
  uniform_sample_into(m, count, rng, cloud.coords);
  return cloud;
}

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv(const PointCloud& cloud, std::ostream& os) {
  const int D = cloud.manifold.ambient_dim();
  for (int i = 0; i < D; ++i) os << (i ? "," : "") << 'x' << i;
  os << '\n';
  for (std::size_t s = 0; s < cloud.size(); ++s) {
    const double* p = cloud.data(s);
    for (int i = 0; i < D; ++i) os << (i ? "," : "") << format_real(p[i]);
    os << '\n';
  }
}

/// Parses a point CSV; every row is validated against m.
inline PointCloud read_csv(const ManifoldModel& m, std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("missing CSV header");
  std::string expect;
  for (int i = 0; i < m.ambient_dim(); ++i) expect += (i ? ",x" : "x") + std::to_string(i);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expect) throw InvalidInput("CSV header '" + line + "' does not match '" + expect + "'");
  PointCloud cloud(m);
  Point p(m.ambient_dim());
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    int i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= m.ambient_dim()) throw InvalidInput("too many columns on row " + std::to_string(row));
      try {
        std::size_t used = 0;
        p[i] = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InvalidInput("bad number on row " + std::to_string(row));
      }
      ++i;
    }
    if (i != m.ambient_dim()) throw InvalidInput("too few columns on row " + std::to_string(row));
    cloud.add(p);
  }
  cloud.intensity_n = static_cast<double>(cloud.size());
  return cloud;
}

}  // namespace rgc

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "rgc/sampler.hpp"

namespace {

using rgc::ManifoldModel;

TEST(Poisson, MeanCount) {
  const auto m = ManifoldModel::flat_torus(2);
  const int seeds = 10000;
  double s = 0.0;
  for (int i = 0; i < seeds; ++i) s += static_cast<double>(rgc::poisson_process(m, 100, i).size());
  EXPECT_NEAR(s / seeds, 100.0, 0.4);
}

TEST(Poisson, LargeMeanCountAndVariance) {
  rgc::Rng rng(1);
  const int draws = 20000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = static_cast<double>(rgc::poisson_variate(rng, 500.0));
    s += x;
    s2 += x * x;
  }
  const double mean = s / draws;
  const double var = s2 / draws - mean * mean;
  EXPECT_NEAR(mean, 500.0, 4.0 * std::sqrt(500.0 / draws));
  EXPECT_NEAR(var, 500.0, 25.0);
}

TEST(Poisson, SpatialIndependence) {
  const auto m = ManifoldModel::flat_torus(2);
  const int seeds = 10000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < seeds; ++i) {
    const auto c = rgc::poisson_process(m, 200, 1000000 + i);
    double in = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) in += c.data(j)[0] <= 0.5;
    s += in;
    s2 += in * in;
  }
  const double mean = s / seeds;
  const double var = (s2 - seeds * mean * mean) / (seeds - 1);
  EXPECT_NEAR(mean, 100.0, 0.4);
  EXPECT_NEAR(var, 100.0, 5.0);
}

TEST(Poisson, CountChiSquare) {
  const auto m = ManifoldModel::flat_torus(2);
  const int trials = 10000;
  const double n = 50.0;
  std::vector<double> obs(200, 0.0);
  for (int i = 0; i < trials; ++i) obs[rgc::poisson_process(m, n, 5000000 + i).size()] += 1.0;
  // bins with expected count >= 5, tails pooled
  std::vector<double> pmf(obs.size());
  pmf[0] = std::exp(-n);
  for (std::size_t k = 1; k < pmf.size(); ++k) pmf[k] = pmf[k - 1] * n / static_cast<double>(k);
  std::size_t lo = 0, hi = pmf.size() - 1;
  while (pmf[lo] * trials < 5.0) ++lo;
  while (pmf[hi] * trials < 5.0) --hi;
  std::vector<double> o, e;
  double ol = 0.0, el = 0.0, oh = 0.0, eh = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (k <= lo) {
      ol += obs[k];
      el += pmf[k] * trials;
    } else if (k >= hi) {
      oh += obs[k];
      eh += pmf[k] * trials;
    } else {
      o.push_back(obs[k]);
      e.push_back(pmf[k] * trials);
    }
  }
  o.push_back(ol);
  e.push_back(el);
  o.push_back(oh);
  e.push_back(eh + (1.0 - std::accumulate(pmf.begin(), pmf.end(), 0.0)) * trials);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) chi2 += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  // Wilson-Hilferty upper quantile at 1e-3
  const double df = static_cast<double>(o.size() - 1);
  const double z = 3.090232;
  const double crit = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
  EXPECT_LT(chi2, crit) << "df " << df;
}

TEST(Poisson, DisjointBoxesUncorrelated) {
  const auto m = ManifoldModel::flat_torus(2);
  const int trials = 10000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < trials; ++i) {
    const auto c = rgc::poisson_process(m, 200, 7000000 + i);
    double a = 0, b = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double x = c.data(j)[0], y = c.data(j)[1];
      if (x < 0.5 && y < 0.5) a += 1;
      if (x >= 0.5 && y >= 0.5) b += 1;
    }
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  const double t = trials;
  const double cov = sab / t - (sa / t) * (sb / t);
  const double va = saa / t - (sa / t) * (sa / t);
  const double vb = sbb / t - (sb / t) * (sb / t);
  EXPECT_LE(std::abs(cov / std::sqrt(va * vb)), 0.05);
}

TEST(Poisson, Deterministic) {
  const auto m = ManifoldModel::unit_volume_sphere(2);
  const auto a = rgc::poisson_process(m, 300, 77);
  const auto b = rgc::poisson_process(m, 300, 77);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_NE(a.coords, rgc::poisson_process(m, 300, 78).coords);
}

TEST(Poisson, RejectsBadIntensity) {
  const auto m = ManifoldModel::flat_torus(2);
  EXPECT_THROW(rgc::poisson_process(m, 0.0, 1), rgc::InvalidInput);
  EXPECT_THROW(rgc::poisson_process(m, -3.0, 1), rgc::InvalidInput);
}

TEST(Csv, RoundTripIsExact) {
  const auto m = ManifoldModel::unit_volume_sphere(2);
  const auto c = rgc::poisson_process(m, 50, 3);
  std::stringstream ss;
  rgc::write_csv(c, ss);
  const auto back = rgc::read_csv(m, ss);
  EXPECT_EQ(back.coords, c.coords);
}

TEST(Csv, RejectsBadInput) {
  const auto m = ManifoldModel::flat_torus(2);
  std::stringstream wrong_header("a,b\n0.1,0.2\n");
  EXPECT_THROW(rgc::read_csv(m, wrong_header), rgc::InvalidInput);
  std::stringstream off("x0,x1\n1.5,0.2\n");
  EXPECT_THROW(rgc::read_csv(m, off), rgc::InvalidInput);
  std::stringstream junk("x0,x1\n0.1,abc\n");
  EXPECT_THROW(rgc::read_csv(m, junk), rgc::InvalidInput);
}

TEST(FormatReal, SeventeenDigits) {
  EXPECT_EQ(rgc::format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(rgc::format_real(2.0), "2");
}

}  // namespace

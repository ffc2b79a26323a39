#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rgc/theta.hpp"

namespace {

using rgc::ManifoldModel;
using rgc::Point;
using rgc::PointCloud;

const double kPi = std::numbers::pi;

TEST(Phi, SymmetricPair) {
  const auto m = ManifoldModel::flat_torus(2);
  EXPECT_NEAR(rgc::phi(m, Point{0.5, 0.5}, {Point{0.45, 0.5}, Point{0.55, 0.5}}), 1.0, 1e-12);
}

TEST(Phi, EquilateralTriple) {
  const auto m = ManifoldModel::flat_torus(2);
  std::vector<Point> ys;
  for (int i = 0; i < 3; ++i)
    ys.push_back({0.5 + 0.05 * std::cos(2 * kPi * i / 3), 0.5 + 0.05 * std::sin(2 * kPi * i / 3)});
  EXPECT_NEAR(rgc::phi(m, Point{0.5, 0.5}, ys), 0.5, 1e-12);
}

TEST(Phi, OriginOnFacet) {
  const auto m = ManifoldModel::flat_torus(2);
  EXPECT_NEAR(rgc::phi(m, Point{0.5, 0.5}, {Point{0.45, 0.5}, Point{0.55, 0.5}, Point{0.5, 0.55}}), 0.0,
              1e-12);
}

TEST(Phi, RejectsOriginOutside) {
  const auto m = ManifoldModel::flat_torus(2);
  EXPECT_THROW(rgc::phi(m, Point{0.5, 0.5}, {Point{0.55, 0.5}, Point{0.5, 0.55}}),
               rgc::InvalidConfiguration);
  EXPECT_THROW(rgc::phi(m, Point{0.5, 0.5}, {Point{0.55, 0.5}}), rgc::InvalidInput);
}

TEST(Phi, InRangeAndScaleInvariant) {
  int seen = 0;
  for (int t = 0; t < 4; ++t) {
    const auto m = t % 2 ? ManifoldModel::unit_volume_sphere(2) : ManifoldModel::flat_torus(2);
    const auto c = rgc::poisson_process(m, 200, 500 + t);
    for (int k = 1; k <= 2; ++k)
      for (const auto& cp : rgc::enumerate_critical_points(c, k, 0.0, m.convexity_radius() * 0.4)) {
        std::vector<Point> ys, doubled;
        for (auto v : cp.generators) {
          ys.push_back(c.point_copy(v));
          auto w = rgc::log_map(m, cp.center, ys.back());
          for (double& x : w) x *= 2.0;
          doubled.push_back(rgc::exp_map(m, cp.center, w));
        }
        const double a = rgc::phi(m, cp.center, ys);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0 + 1e-12);
        EXPECT_NEAR(rgc::phi(m, cp.center, doubled), a, 1e-9);
        ++seen;
      }
  }
  EXPECT_GT(seen, 100);
}

TEST(CgConstant, Torus) {
  EXPECT_EQ(rgc::c_g_constant(ManifoldModel::flat_torus(2), 0.1), 1.0);
  EXPECT_EQ(rgc::c_g_constant(ManifoldModel::flat_torus(3), 0.01), 1.0);
}

TEST(CgConstant, SphereClosedForm) {
  const auto m = ManifoldModel::round_sphere(2);
  EXPECT_NEAR(rgc::c_g_constant(m, 0.1), 1.00675, 5e-6);
  EXPECT_NEAR(rgc::c_g_constant(m, 0.1), 1.0 / std::sqrt(0.2 / std::tan(0.2)), 1e-15);
}

// Second difference of dist(p, .)^2 / 2 across the geodesic at distance t from p.
double transverse_hessian(const ManifoldModel& m, double t) {
  const Point p{1, 0, 0};
  const Point x = rgc::exp_map(m, p, Point{t, 0});
  auto f = [&](double s) {
    const auto y = rgc::exp_map(m, x, Point{0, s});
    const double d = rgc::distance(m, p, y);
    return d * d / 2.0;
  };
  const double h = 1e-4;
  return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
}

TEST(CgConstant, MatchesNumericHessian) {
  const auto m = ManifoldModel::round_sphere(2);
  for (double r : {0.01, 0.05, 0.1, 0.2}) {
    const double a = std::min(1.0, transverse_hessian(m, 2.0 * r));
    EXPECT_NEAR(rgc::c_g_constant(m, r), 1.0 / std::sqrt(a), 1e-6) << r;
  }
}

TEST(CgConstant, ApproachesOneMonotonically) {
  const auto m = ManifoldModel::round_sphere(2);
  double prev = 1.0;
  for (double r : {0.01, 0.05, 0.1}) {
    const double c = rgc::c_g_constant(m, r);
    EXPECT_GT(c, prev);
    EXPECT_LT(c - 1.0, r * r);
    prev = c;
  }
}

TEST(CgConstant, LimitAtSmallRadius) {
  EXPECT_NEAR(rgc::c_g_constant(ManifoldModel::round_sphere(2), 1e-3), 1.0, 1e-4);
  EXPECT_GE(rgc::c_g_constant(ManifoldModel::round_sphere(3), 1e-3), 1.0);
}

TEST(AnnulusCertificate, PassImpliesCoveredSamples) {
  const auto m = ManifoldModel::flat_torus(2);
  const auto c = rgc::poisson_process(m, 2000, 61);
  const double eps = 0.2;
  rgc::Rng rng(62);
  int passed = 0;
  for (int t = 0; t < 200 && passed < 5; ++t) {
    const double rho = 0.02 + 0.03 * rng.uniform();
    const Point center = rgc::uniform_sample(m, 1, rng)[0];
    const rgc::SpatialGrid grid(c, rho);
    if (!rgc::detail::annulus_certificate(c, grid, center, rho, eps)) continue;
    ++passed;
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform(), th = 2.0 * kPi * rng.uniform();
      const double s = rho * std::sqrt(eps * eps + (1.0 - eps * eps) * u);
      const Point x = rgc::exp_map(m, center, Point{s * std::cos(th), s * std::sin(th)});
      double best = 1e300;
      for (std::size_t j = 0; j < c.size(); ++j) best = std::min(best, rgc::distance(m, x, c.point(j)));
      ASSERT_LE(best, rho);
    }
  }
  EXPECT_GE(passed, 1);
}

TEST(ThetaRadii, Example) {
  const auto [r1, r2] = rgc::theta_radii(0.02, 10.0, 1.0);
  EXPECT_NEAR(r1, 0.0199, 1e-15);
  EXPECT_NEAR(r2, 0.022, 1e-15);
  rgc::ThetaConfig c;
  c.r = 0.02;
  c.r1 = r1;
  c.r2 = r2;
  EXPECT_NEAR(0.02 * std::sqrt(1.0 - 0.01), 0.0198997, 1e-7);
  EXPECT_TRUE(c.radii_hypothesis());
}

TEST(ThetaRadii, SmallXiLimit) {
  const auto [r1, r2] = rgc::theta_radii(0.05, 1e9, 1.0);
  EXPECT_NEAR(r1, 0.05, 1e-12);
  EXPECT_NEAR(r2, 0.05, 1e-9);
}

TEST(ThetaRadii, Rejects) {
  EXPECT_THROW(rgc::theta_radii(0.02, 0.5, 1.0), rgc::InvalidInput);
  EXPECT_THROW(rgc::theta_radii(0.2, 10.0, 1.0, 0.21), rgc::OutOfRegime);
}

// Pair at distance 2 rho about the center, a dense ring just outside r2, nothing else near.
PointCloud theta_instance(bool with_ring) {
  const auto m = ManifoldModel::flat_torus(2);
  std::vector<Point> pts = {{0.45, 0.5}, {0.55, 0.5}};
  if (with_ring)
    for (int i = 0; i < 80; ++i) {
      const double a = 2.0 * kPi * (i + 0.5) / 80;
      pts.push_back({0.5 + 0.055 * std::cos(a), 0.5 + 0.055 * std::sin(a)});
    }
  return PointCloud(m, pts);
}

rgc::ThetaConfig instance_config() {
  rgc::ThetaConfig c;
  c.epsilon = 0.4;
  c.r = 0.0501;
  c.r1 = 0.04997;
  c.r2 = 0.054;
  c.xi = c.r2 / c.r - 1.0;
  c.c_g = 1.0;
  return c;
}

TEST(ThetaCount, ConstructiveInstance) {
  const auto cloud = theta_instance(true);
  const auto cfg = instance_config();
  ASSERT_NO_THROW(cfg.validate(cloud.manifold));
  const auto res = rgc::count_theta_cycles(cloud, 1, cfg);
  EXPECT_EQ(res.count, 1);
  ASSERT_EQ(res.cycles.size(), 1u);
  EXPECT_EQ(res.cycles[0].generators, (std::vector<rgc::Index>{0, 1}));
  EXPECT_NEAR(res.cycles[0].radius, 0.05, 1e-12);
  EXPECT_NEAR(res.cycles[0].phi, 1.0, 1e-12);

  const auto cx = rgc::build_complex(cloud, cfg.r, 2);
  EXPECT_GE(rgc::betti_numbers(cx).betti[1], 1);
  EXPECT_TRUE(rgc::theta_lower_bound_check(cx, res.count, cloud.manifold, 1));
}

TEST(ThetaCount, WithoutRingNotCertified) {
  const auto res = rgc::count_theta_cycles(theta_instance(false), 1, instance_config());
  EXPECT_EQ(res.count, 0);
  ASSERT_EQ(res.cycles.size(), 1u);
  EXPECT_FALSE(res.cycles[0].certified);
}

TEST(ThetaCount, EmptyCloud) {
  const PointCloud c(ManifoldModel::flat_torus(2));
  EXPECT_EQ(rgc::count_theta_cycles(c, 1, instance_config()).count, 0);
}

TEST(ThetaCount, RejectsBadDegreeAndRadii) {
  const auto cloud = theta_instance(true);
  EXPECT_THROW(rgc::count_theta_cycles(cloud, 2, instance_config()), rgc::InvalidInput);
  auto bad = instance_config();
  bad.r1 = 0.04;
  EXPECT_THROW(rgc::count_theta_cycles(cloud, 1, bad), rgc::InvalidInput);
}

TEST(ThetaBound, ZeroCountAlwaysHolds) {
  rgc::BettiVector b;
  b.betti = {1, 0};
  EXPECT_TRUE(rgc::theta_lower_bound_check(b, 0, 1));
  EXPECT_FALSE(rgc::theta_lower_bound_check(b, 1, 1));
  EXPECT_THROW(rgc::theta_lower_bound_check(rgc::CechComplex(0.0, 1, {}), 0,
                                            ManifoldModel::flat_torus(2), 1),
               rgc::InsufficientDimension);
}

TEST(ThetaConfig, DefaultRadiiAtSweepScale) {
  const auto m = ManifoldModel::flat_torus(2);
  const auto c = rgc::ThetaConfig::make(m, 0.02, 10.0, 0.1);
  EXPECT_NEAR(c.r1, 0.0199, 1e-15);
  EXPECT_NEAR(c.r2, 0.022, 1e-15);
  EXPECT_NO_THROW(c.validate(m));
}

TEST(ThetaCsv, Format) {
  const auto res = rgc::count_theta_cycles(theta_instance(true), 1, instance_config());
  std::ostringstream os;
  rgc::write_theta_csv(1, res, os);
  EXPECT_EQ(os.str().substr(0, 23), "k,radius,phi,certified\n");
  EXPECT_EQ(os.str().back(), '\n');
  EXPECT_NE(os.str().find(",1\n"), std::string::npos);
}

}  // namespace

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>

#include "rgc/manifold.hpp"
#include "rgc/random.hpp"

namespace {

using rgc::ManifoldModel;
using rgc::Point;

const double kPi = std::numbers::pi;

TEST(Manifold, UnitBallVolumes) {
  EXPECT_DOUBLE_EQ(rgc::unit_ball_volume(1), 2.0);
  EXPECT_DOUBLE_EQ(rgc::unit_ball_volume(2), kPi);
  EXPECT_NEAR(rgc::unit_ball_volume(3), 4.0 * kPi / 3.0, 1e-14);
}

TEST(Manifold, RejectsBadModels) {
  EXPECT_THROW(ManifoldModel::flat_torus(0), rgc::InvalidInput);
  EXPECT_THROW(ManifoldModel::flat_torus(2, -1.0), rgc::InvalidInput);
  EXPECT_THROW(ManifoldModel::round_sphere(2, 0.0), rgc::InvalidInput);
}

TEST(Manifold, UnitVolumeSphere) {
  const auto m = ManifoldModel::unit_volume_sphere(2);
  EXPECT_NEAR(m.volume(), 1.0, 1e-12);
  EXPECT_NEAR(m.scale(), 1.0 / std::sqrt(4.0 * kPi), 1e-12);
}

TEST(Distance, TorusWrap) {
  const auto m = ManifoldModel::flat_torus(2);
  EXPECT_NEAR(rgc::distance(m, Point{0.1, 0.1}, Point{0.9, 0.1}), 0.2, 1e-15);
  EXPECT_NEAR(rgc::distance(m, Point{0.0, 0.0}, Point{0.3, 0.4}), 0.5, 1e-15);
}

TEST(Distance, SphereQuarterCircle) {
  const auto m = ManifoldModel::round_sphere(2);
  EXPECT_NEAR(rgc::distance(m, Point{1, 0, 0}, Point{0, 1, 0}), kPi / 2, 1e-15);
}

TEST(Distance, TriangleInequalityAndSymmetry) {
  for (const auto& m : {ManifoldModel::flat_torus(2), ManifoldModel::round_sphere(2, 2.0),
                        ManifoldModel::flat_torus(3)}) {
    rgc::Rng rng(5);
    const auto pts = rgc::uniform_sample(m, 60, rng);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const double dij = rgc::distance(m, pts[i], pts[j]);
        ASSERT_DOUBLE_EQ(dij, rgc::distance(m, pts[j], pts[i]));
        for (std::size_t k = 0; k < 10; ++k)
          ASSERT_LE(dij, rgc::distance(m, pts[i], pts[k]) + rgc::distance(m, pts[k], pts[j]) + 1e-12);
      }
  }
}

TEST(LogMap, TorusFlat) {
  const auto m = ManifoldModel::flat_torus(2);
  const auto v = rgc::log_map(m, Point{0.5, 0.5}, Point{0.7, 0.5});
  EXPECT_NEAR(v[0], 0.2, 1e-15);
  EXPECT_NEAR(v[1], 0.0, 1e-15);
  const auto w = rgc::log_map(m, Point{0.05, 0.0}, Point{0.95, 0.0});
  EXPECT_NEAR(w[0], -0.1, 1e-15);
  EXPECT_NEAR(w[1], 0.0, 1e-15);
}

TEST(LogMap, SphereNormAndDirection) {
  const auto m = ManifoldModel::round_sphere(2);
  const Point p{1, 0, 0}, q{0, 1, 0};
  const auto v = rgc::log_map(m, p, q);
  EXPECT_NEAR(rgc::detail::norm(v), kPi / 2, 1e-12);
  const auto back = rgc::exp_map(m, p, v);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], q[i], 1e-12);
}

TEST(LogMap, ExpInvertsLog) {
  for (const auto& m : {ManifoldModel::flat_torus(2), ManifoldModel::round_sphere(2, 0.7)}) {
    rgc::Rng rng(6);
    const auto pts = rgc::uniform_sample(m, 200, rng);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      if (rgc::distance(m, pts[i], pts[i + 1]) > 0.9 * m.injectivity_radius()) continue;
      const auto v = rgc::log_map(m, pts[i], pts[i + 1]);
      EXPECT_NEAR(rgc::detail::norm(v), rgc::distance(m, pts[i], pts[i + 1]), 1e-12);
      const auto q = rgc::exp_map(m, pts[i], v);
      EXPECT_LT(rgc::distance(m, q, pts[i + 1]), 1e-10);
    }
  }
}

TEST(Circumcenter, Examples) {
  const auto m = ManifoldModel::flat_torus(2);
  auto b = rgc::circumcenter(m, {Point{0, 0}, Point{0.2, 0}});
  ASSERT_TRUE(b);
  EXPECT_NEAR(b->center[0], 0.1, 1e-12);
  EXPECT_NEAR(b->center[1], 0.0, 1e-12);
  EXPECT_NEAR(b->radius, 0.1, 1e-12);

  b = rgc::circumcenter(m, {Point{0, 0}, Point{0.2, 0}, Point{0.1, 0.1}});
  ASSERT_TRUE(b);
  EXPECT_NEAR(b->center[0], 0.1, 1e-12);
  EXPECT_NEAR(b->center[1], 0.0, 1e-12);
  EXPECT_NEAR(b->radius, 0.1, 1e-12);

  b = rgc::circumcenter(m, {Point{0.3, 0.4}});
  ASSERT_TRUE(b);
  EXPECT_EQ(b->radius, 0.0);

  EXPECT_FALSE(rgc::circumcenter(m, {Point{0, 0}, Point{0.1, 0}, Point{0.2, 0}}));
}

TEST(Circumcenter, EquidistantOnSphere) {
  const auto m = ManifoldModel::round_sphere(2);
  rgc::Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto c = rgc::uniform_sample(m, 1, rng)[0];
    std::vector<Point> ys;
    for (int i = 0; i < 3; ++i) ys.push_back(rgc::exp_map(m, c, Point{0.3 * rng.normal(), 0.3 * rng.normal()}));
    const auto b = rgc::circumcenter(m, ys);
    if (!b) continue;
    for (const auto& y : ys) EXPECT_NEAR(rgc::distance(m, b->center, y), b->radius, 1e-9);
  }
}

TEST(MinEnclosingBall, Examples) {
  const auto m = ManifoldModel::flat_torus(2);
  auto b = rgc::min_enclosing_ball(m, {Point{0, 0}, Point{0.2, 0}, Point{0.1, 0.02}});
  EXPECT_NEAR(b.center[0], 0.1, 1e-12);
  EXPECT_NEAR(b.center[1], 0.0, 1e-12);
  EXPECT_NEAR(b.radius, 0.1, 1e-12);

  const double h = 0.1 * std::sqrt(3.0) / 2.0;
  b = rgc::min_enclosing_ball(m, {Point{0.5, 0.5}, Point{0.6, 0.5}, Point{0.55, 0.5 + h}});
  EXPECT_NEAR(b.radius, 0.1 / std::sqrt(3.0), 1e-12);

  b = rgc::min_enclosing_ball(m, {Point{0.95, 0.5}, Point{0.05, 0.5}});
  EXPECT_NEAR(b.radius, 0.05, 1e-12);
  EXPECT_NEAR(rgc::distance(m, b.center, Point{0.0, 0.5}), 0.0, 1e-12);

  EXPECT_THROW(rgc::min_enclosing_ball(m, {}), rgc::InvalidInput);
}

TEST(MinEnclosingBall, ContainsAllPoints) {
  for (const auto& m : {ManifoldModel::flat_torus(2), ManifoldModel::round_sphere(2)}) {
    rgc::Rng rng(8);
    for (int t = 0; t < 200; ++t) {
      const auto c = rgc::uniform_sample(m, 1, rng)[0];
      std::vector<Point> ys;
      const int k = 1 + static_cast<int>(rng.uniform() * 6);
      for (int i = 0; i < k; ++i) {
        Point v(m.dim());
        for (double& x : v) x = 0.05 * rng.normal();
        ys.push_back(rgc::exp_map(m, c, v));
      }
      const auto b = rgc::min_enclosing_ball(m, ys);
      for (const auto& y : ys) EXPECT_LE(rgc::distance(m, b.center, y), b.radius + 1e-9);
    }
  }
}

TEST(MinEnclosingBall, NoGridPointDoesBetter) {
  const int half = 40;
  const double span = 0.2, h = span / half;
  for (const auto& m : {ManifoldModel::flat_torus(2), ManifoldModel::round_sphere(2)}) {
    rgc::Rng rng(21);
    for (int t = 0; t < 500; ++t) {
      const auto c = rgc::uniform_sample(m, 1, rng)[0];
      std::vector<Point> ys;
      for (int i = 0; i < 3; ++i) {
        Point v(2);
        for (double& x : v) x = 0.04 * rng.normal();
        ys.push_back(rgc::exp_map(m, c, v));
      }
      const auto b = rgc::min_enclosing_ball(m, ys);
      double best = 1e300;
      for (int i = -half; i <= half; ++i)
        for (int j = -half; j <= half; ++j) {
          const Point x = rgc::exp_map(m, c, Point{i * h, j * h});
          double worst = 0.0;
          for (const auto& y : ys) worst = std::max(worst, rgc::distance(m, x, y));
          best = std::min(best, worst);
        }
      ASSERT_GE(best, b.radius - h) << "trial " << t;
    }
  }
}

TEST(BallVolume, Examples) {
  EXPECT_NEAR(rgc::ball_volume(ManifoldModel::flat_torus(2), 0.1), kPi * 0.01, 1e-15);
  const auto s = ManifoldModel::round_sphere(2);
  EXPECT_NEAR(rgc::ball_volume(s, kPi / 2), 2.0 * kPi, 1e-12);
  const double exact = rgc::ball_volume(s, 0.1);
  EXPECT_NEAR(exact, 2.0 * kPi * (1.0 - std::cos(0.1)), 1e-15);
  const double approx = rgc::ball_volume_expansion(s, 0.1);
  EXPECT_NEAR(approx, kPi * 0.01 * (1.0 - (2.0 / 24.0) * 0.01), 1e-15);
  EXPECT_LT(std::abs(exact - approx) / exact, 1e-5);
}

TEST(BallVolume, MonotoneAndMonteCarlo) {
  for (const auto& [m, r] : {std::pair{ManifoldModel::flat_torus(2), 0.2},
                             std::pair{ManifoldModel::round_sphere(2), 1.0},
                             std::pair{ManifoldModel::flat_torus(3), 0.2}}) {
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
      const double v = rgc::ball_volume(m, m.convexity_radius() * i / 50.0);
      EXPECT_GT(v, prev);
      prev = v;
    }
    rgc::Rng rng(33);
    const Point c = rgc::uniform_sample(m, 1, rng)[0];
    const int samples = 1000000;
    int hits = 0;
    for (const auto& x : rgc::uniform_sample(m, samples, rng)) hits += rgc::distance(m, c, x) <= r;
    const double p = rgc::ball_volume(m, r) / m.volume();
    const double sigma = std::sqrt(p * (1.0 - p) / samples);
    EXPECT_NEAR(static_cast<double>(hits) / samples, p, 4.0 * sigma);
  }
}

double net_gap(const ManifoldModel& m, const std::vector<Point>& net, int samples) {
  rgc::Rng rng(9);
  double worst = 0.0;
  for (const auto& x : rgc::uniform_sample(m, samples, rng)) {
    double best = 1e300;
    for (const auto& s : net) best = std::min(best, rgc::distance(m, x, s));
    worst = std::max(worst, best);
  }
  return worst;
}

TEST(Net, TorusCoarse) {
  const auto m = ManifoldModel::flat_torus(2);
  const auto net = rgc::build_net(m, 0.5);
  EXPECT_LE(net.size(), 9u);
  EXPECT_LE(net_gap(m, net, 10000), 0.5);
}

TEST(Net, FineAudit) {
  const auto t = ManifoldModel::flat_torus(3);
  EXPECT_LE(net_gap(t, rgc::build_net(t, 0.1), 10000), 0.1);
  const auto s = ManifoldModel::unit_volume_sphere(2);
  EXPECT_LE(net_gap(s, rgc::build_net(s, 0.02), 10000), 0.02);
}

TEST(Net, SphereAndTorusAudit) {
  for (double delta : {0.3, 0.1, 0.05}) {
    const auto t = ManifoldModel::flat_torus(2);
    EXPECT_LE(net_gap(t, rgc::build_net(t, delta), 3000), delta);
    const auto s = ManifoldModel::round_sphere(2);
    EXPECT_LE(net_gap(s, rgc::build_net(s, delta), 3000), delta);
  }
}

TEST(Net, HugeDeltaStillCovers) {
  const auto s = ManifoldModel::round_sphere(2);
  const auto net = rgc::build_net(s, 10.0);
  EXPECT_GE(net.size(), 1u);
  EXPECT_LE(net_gap(s, net, 1000), 10.0);
}

TEST(Net, AnnulusShell) {
  const auto m = ManifoldModel::flat_torus(2);
  const rgc::Annulus a{Point{0.5, 0.5}, 0.2, 0.2};
  const double delta = 0.02;
  const auto net = rgc::build_net(m, delta, a);
  ASSERT_FALSE(net.empty());
  for (const auto& p : net) EXPECT_LE(std::abs(rgc::distance(m, p, a.center) - 0.2), delta + 1e-12);
  for (int i = 0; i < 360; ++i) {
    const double th = 2.0 * kPi * i / 360;
    const Point x{0.5 + 0.2 * std::cos(th), 0.5 + 0.2 * std::sin(th)};
    double best = 1e300;
    for (const auto& s : net) best = std::min(best, rgc::distance(m, x, s));
    EXPECT_LE(best, delta);
  }
}

TEST(Sampling, TorusMeans) {
  const auto m = ManifoldModel::flat_torus(2);
  rgc::Rng rng(10);
  const int n = 100000;
  const auto pts = rgc::uniform_sample(m, n, rng);
  for (int i = 0; i < 2; ++i) {
    double s = 0.0;
    for (const auto& p : pts) {
      ASSERT_GE(p[i], 0.0);
      ASSERT_LT(p[i], 1.0);
      s += p[i];
    }
    EXPECT_NEAR(s / n, 0.5, 4.0 / std::sqrt(12.0 * n));
  }
}

TEST(Sampling, SphereMeanAndNorm) {
  const auto m = ManifoldModel::round_sphere(2, 2.0);
  rgc::Rng rng(11);
  const int n = 100000;
  double mean[3] = {0, 0, 0};
  for (const auto& p : rgc::uniform_sample(m, n, rng)) {
    ASSERT_NEAR(rgc::detail::norm(p), 2.0, 1e-12 * 2.0);
    for (int i = 0; i < 3; ++i) mean[i] += p[i] / n;
  }
  EXPECT_LE(std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]),
            4.0 * 2.0 / std::sqrt(n));
}

TEST(Sampling, SameSeedSamePoint) {
  const auto m = ManifoldModel::round_sphere(2);
  rgc::Rng a(12), b(12);
  EXPECT_EQ(rgc::uniform_sample(m, 1, a), rgc::uniform_sample(m, 1, b));
}

TEST(Sampling, CheckPointRejectsOffManifold) {
  const auto s = ManifoldModel::round_sphere(2);
  EXPECT_THROW(s.check_point(Point{1.1, 0, 0}), rgc::InvalidInput);
  EXPECT_THROW(s.check_point(Point{1, 0}), rgc::InvalidInput);
  const auto t = ManifoldModel::flat_torus(2);
  EXPECT_THROW(t.check_point(Point{1.0, 0.0}), rgc::InvalidInput);
}

}  // namespace

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rgc/cech.hpp"
#include "rgc/oracles.hpp"

namespace {

using rgc::ManifoldModel;
using rgc::Point;
using rgc::PointCloud;

PointCloud equilateral() {
  const double h = 0.1 * std::sqrt(3.0) / 2.0;
  return PointCloud(ManifoldModel::flat_torus(2), {Point{0.5, 0.5}, Point{0.6, 0.5}, Point{0.55, 0.5 + h}});
}

PointCloud random_cloud(const ManifoldModel& m, std::uint64_t seed, int n) {
  rgc::Rng rng(seed);
  return PointCloud(m, rgc::uniform_sample(m, n, rng));
}

TEST(Cech, EquilateralBelowCircumradius) {
  const auto cx = rgc::build_complex(equilateral(), 0.055);
  EXPECT_EQ(cx.count(0), 3u);
  EXPECT_EQ(cx.count(1), 3u);
  EXPECT_EQ(cx.count(2), 0u);
}

TEST(Cech, EquilateralAboveCircumradius) {
  const auto cx = rgc::build_complex(equilateral(), 0.06);
  EXPECT_EQ(cx.f_vector(), (std::vector<std::size_t>{3, 3, 1}));
}

TEST(Cech, EmptyCloud) {
  const auto cx = rgc::build_complex(PointCloud(ManifoldModel::flat_torus(2)), 0.1);
  EXPECT_EQ(cx.total(), 0u);
}

TEST(Cech, TwoIsolatedPoints) {
  const PointCloud c(ManifoldModel::flat_torus(2), {Point{0.1, 0.1}, Point{0.6, 0.6}});
  const auto cx = rgc::build_complex(c, 0.1);
  EXPECT_EQ(cx.count(0), 2u);
  EXPECT_EQ(cx.count(1), 0u);
}

TEST(Cech, RejectsRadiusAndDimCap) {
  const auto c = equilateral();
  EXPECT_THROW(rgc::build_complex(c, -0.1), rgc::OutOfRegime);
  EXPECT_THROW(rgc::build_complex(c, 0.3), rgc::OutOfRegime);
  EXPECT_THROW(rgc::build_complex(c, 0.05, 9), rgc::InvalidInput);
}

TEST(Cech, SimplexBallPairIsHalfDistance) {
  const auto m = ManifoldModel::unit_volume_sphere(2);
  const auto c = random_cloud(m, 1, 2);
  const rgc::Index s[2] = {0, 1};
  EXPECT_EQ(rgc::simplex_radius(c, s), rgc::distance(m, c.point(0), c.point(1)) / 2.0);
}

TEST(Cech, EdgeCriterion) {
  for (const auto& m : {ManifoldModel::flat_torus(2), ManifoldModel::unit_volume_sphere(2)}) {
    const auto c = random_cloud(m, 2, 150);
    const double r = 0.6 * m.convexity_radius();
    const auto cx = rgc::build_complex(c, r, 1);
    std::size_t edges = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        const bool near = rgc::distance(m, c.point(i), c.point(j)) <= 2.0 * r;
        const rgc::Index s[2] = {static_cast<rgc::Index>(i), static_cast<rgc::Index>(j)};
        EXPECT_EQ(cx.find(s) >= 0, near);
        edges += near;
      }
    EXPECT_EQ(cx.count(1), edges);
  }
}

TEST(Cech, FaceClosedAndMonotone) {
  for (const auto& m : {ManifoldModel::flat_torus(2), ManifoldModel::unit_volume_sphere(2),
                        ManifoldModel::flat_torus(3)}) {
    const auto c = random_cloud(m, 3, 120);
    const double r1 = 0.3 * m.convexity_radius(), r2 = 0.45 * m.convexity_radius();
    const auto a = rgc::build_complex(c, r1);
    const auto b = rgc::build_complex(c, r2);
    EXPECT_TRUE(a.is_face_closed());
    EXPECT_TRUE(b.is_face_closed());
    for (int k = 0; k <= a.dim_cap(); ++k)
      for (std::size_t i = 0; i < a.count(k); ++i) EXPECT_GE(b.find(a.simplex(k, i)), 0);
  }
}

TEST(Cech, MatchesBruteForceOracle) {
  for (int t = 0; t < 40; ++t) {
    const auto m = t % 2 ? ManifoldModel::unit_volume_sphere(2) : ManifoldModel::flat_torus(2);
    const auto c = random_cloud(m, 100 + t, 18);
    const double r = m.convexity_radius() * (0.1 + 0.8 * (t % 10) / 10.0);
    const auto cx = rgc::build_complex(c, r);
    const auto ref = rgc::oracle::cech_complex(c, r, cx.dim_cap());
    for (int k = 0; k <= cx.dim_cap(); ++k) ASSERT_EQ(cx.flat(k), ref.flat(k)) << "trial " << t << " k " << k;
  }
}

TEST(Cech, RipsMutationIsDetected) {
  bool differs = false;
  for (int t = 0; t < 20 && !differs; ++t) {
    const auto m = ManifoldModel::flat_torus(2);
    const auto c = random_cloud(m, 200 + t, 20);
    const double r = 0.12;
    const auto cx = rgc::build_complex(c, r);
    const auto rips = rgc::oracle::rips_complex(c, r, cx.dim_cap());
    for (int k = 0; k <= cx.dim_cap(); ++k) differs = differs || rips.flat(k) != cx.flat(k);
  }
  EXPECT_TRUE(differs);
}

TEST(Cech, FromSimplicesCanonicalizes) {
  const auto cx = rgc::CechComplex::from_simplices({{2, 0}, {0}, {2}, {1}, {1, 0}}, 1);
  EXPECT_EQ(cx.count(0), 3u);
  EXPECT_EQ(cx.count(1), 2u);
  const rgc::Index e[2] = {0, 2};
  EXPECT_GE(cx.find(e), 0);
  EXPECT_THROW(rgc::CechComplex::from_simplices({{0}, {0}}, 1), rgc::InvalidInput);
  EXPECT_FALSE(rgc::CechComplex::from_simplices({{0, 1}}, 1).is_face_closed());
}

}  // namespace

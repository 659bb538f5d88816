// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/random.hpp"
#include "support/fixtures.hpp"

namespace lidarcl {
namespace {

TEST(Augment, QuarterTurnMapsXToY) {
  AugmentationParams p;
  p.rotation_rad = std::numbers::pi / 2;
  const Vec3 q = augment_point(Vec3(1, 0, 0), p);
  EXPECT_NEAR(q.x(), 0.0, 1e-15);
  EXPECT_NEAR(q.y(), 1.0, 1e-15);
  EXPECT_EQ(q.z(), 0.0);
}

TEST(Augment, IdentityLeavesCloudUnchanged) {
  Rng rng(3);
  const PointCloud c = fixtures::random_cloud(rng, 50, 10.0);
  const PointCloud out = augment(c, {});
  ASSERT_EQ(out.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(out.points[i], c.points[i]);
  EXPECT_EQ(out.intensities, c.intensities);
}

TEST(Augment, ScaleThenFlip) {
  AugmentationParams p;
  p.scale = 2.0;
  EXPECT_EQ(augment_point(Vec3(1, 2, 3), p), Vec3(2, 4, 6));
  p.flip_x = true;
  EXPECT_EQ(augment_point(Vec3(1, 2, 3), p), Vec3(-2, 4, 6));
  p.flip_x = false;
  p.flip_y = true;
  EXPECT_EQ(augment_point(Vec3(1, 2, 3), p), Vec3(2, -4, 6));
}

TEST(Augment, EmptyCloud) { EXPECT_TRUE(augment(PointCloud{}, {}).empty()); }

TEST(Augment, RejectsBadParams) {
  AugmentationParams p;
  p.scale = 0.0;
  EXPECT_THROW((void)augment(PointCloud{}, p), ValidationError);
  p.scale = 1.0;
  p.rotation_rad = std::nan("");
  EXPECT_THROW((void)augment(PointCloud{}, p), ValidationError);
}

TEST(Augment, RigidMotionsPreserveDistancesAndScaleMultipliesThem) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud c = fixtures::random_cloud(rng, 20, 30.0);
    AugmentationParams p;
    p.rotation_rad = rng.uniform(-4.0, 4.0);
    p.flip_x = rng.bernoulli(0.5);
    p.flip_y = rng.bernoulli(0.5);
    const double s = rng.uniform(0.5, 2.0);
    const PointCloud rigid = augment(c, p);
    p.scale = s;
    const PointCloud scaled = augment(c, p);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        const double d = (c.points[i] - c.points[j]).norm();
        EXPECT_NEAR((rigid.points[i] - rigid.points[j]).norm(), d, 1e-12 * d);
        EXPECT_NEAR((scaled.points[i] - scaled.points[j]).norm(), s * d, 1e-12 * s * d);
      }
    }
    EXPECT_EQ(rigid.intensities, c.intensities);
  }
}

TEST(PointCloud, ValidateCatchesMisalignedIntensityAndNaN) {
  PointCloud c;
  c.points.push_back(Vec3::Zero());
  EXPECT_THROW(c.validate(), ValidationError);
  c.intensities.push_back(0.0);
  EXPECT_NO_THROW(c.validate());
  c.points[0].x() = std::nan("");
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Rng, DeterministicAndStreamsDiffer) {
  Rng a(5), b(5), c(5, 1), d(5, 2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(c.next_u64(), d.next_u64());
  EXPECT_NE(Rng::mix(1, 0), Rng::mix(1, 1));
}

TEST(Rng, UniformAndNormalRanges) {
  Rng r(9);
  double mean = 0.0, sq = 0.0;
  constexpr int kN = 20000;
  for (int i = 0; i < kN; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(7), 7u);
    const double z = r.normal();
    mean += z;
    sq += z * z;
  }
  mean /= kN;
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(sq / kN, 1.0, 0.05);
}

}  // namespace
}  // namespace lidarcl

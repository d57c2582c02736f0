#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "tsdf_dse/geometry.hpp"

using namespace tsdf;

namespace {

Intrinsics vga500() {
  Intrinsics intr;
  intr.fx = 500.0;
  intr.fy = 500.0;
  intr.cx = 320.0;
  intr.cy = 240.0;
  intr.width = 640;
  intr.height = 480;
  return intr;
}

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Quaterniond q(u(rng), u(rng), u(rng), u(rng));
  q.normalize();
  return Pose(q.toRotationMatrix(), Vec3{u(rng), u(rng), u(rng)} * 3.0);
}

}  // namespace

TEST(Pose, IdentityLeavesPointsAlone) {
  const Vec3 p = world_to_camera(Pose::identity(), {1, 2, 3});
  EXPECT_EQ(p, Vec3(1, 2, 3));
}

TEST(Pose, TranslationInverse) {
  const Vec3 p = world_to_camera(Pose::translation_only({1, 0, 0}), {1, 0, 0});
  EXPECT_NEAR(p.norm(), 0.0, 1e-15);
}

TEST(Pose, WorldCameraRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const Pose pose = random_pose(rng);
    const Vec3 p{u(rng), u(rng), u(rng)};
    EXPECT_LT((camera_to_world(pose, world_to_camera(pose, p)) - p).norm(), 1e-9);
    EXPECT_LT((world_to_camera(pose, camera_to_world(pose, p)) - p).norm(), 1e-9);
  }
}

TEST(Pose, CompositionStaysOrthonormal) {
  std::mt19937_64 rng(11);
  Pose acc;
  for (int i = 0; i < 1000; ++i) acc = acc * random_pose(rng);
  const Mat3& r = acc.rotation();
  EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-6);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-6);
}

TEST(Pose, RejectsNonRotation) {
  Mat3 r = Mat3::Identity();
  r(0, 0) = 2.0;
  EXPECT_THROW(Pose(r, Vec3::Zero()), std::invalid_argument);
}

TEST(Pose, RowMajorRoundTrip) {
  std::mt19937_64 rng(3);
  const Pose pose = random_pose(rng);
  const auto rm = pose.row_major();
  const Pose back = Pose::from_row_major(rm);
  EXPECT_LT((back.matrix() - pose.matrix()).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(rm[3], pose.translation().x());
}

TEST(Pose, LookAtPointsOpticalAxisAtTarget) {
  const Vec3 eye{1, 2, 1}, target{3, 2, 1};
  const Pose pose = Pose::look_at(eye, target, {0, 0, 1});
  const Vec3 c = world_to_camera(pose, target);
  EXPECT_NEAR(c.x(), 0.0, 1e-12);
  EXPECT_NEAR(c.y(), 0.0, 1e-12);
  EXPECT_NEAR(c.z(), 2.0, 1e-12);
  // world up appears as -y in the image
  EXPECT_LT(world_to_camera(pose, target + Vec3{0, 0, 1}).y(), 0.0);
}

TEST(Project, OpticalAxisHitsPrincipalPoint) {
  const Intrinsics intr = vga500();
  const PixelCoord px = project(intr, {0, 0, 2});
  EXPECT_DOUBLE_EQ(px.u, 320.0);
  EXPECT_DOUBLE_EQ(px.v, 240.0);
  EXPECT_DOUBLE_EQ(px.z, 2.0);
}

TEST(Project, FormulaExample) {
  const PixelCoord px = project(vga500(), {0.1, 0, 1});
  EXPECT_DOUBLE_EQ(px.u, 370.0);
  EXPECT_DOUBLE_EQ(px.v, 240.0);
  EXPECT_DOUBLE_EQ(px.z, 1.0);
}

TEST(Project, ZeroDepthThrows) {
  EXPECT_THROW(project(vga500(), {1, 0, 0}), std::domain_error);
}

TEST(BackProject, Examples) {
  const Intrinsics intr = vga500();
  EXPECT_LT((back_project(intr, 320, 240, 2) - Vec3(0, 0, 2)).norm(), 1e-15);
  EXPECT_LT((back_project(intr, 370, 240, 1) - Vec3(0.1, 0, 1)).norm(), 1e-15);
  EXPECT_THROW(back_project(intr, 10, 10, 0.0), std::invalid_argument);
  EXPECT_THROW(back_project(intr, 10, 10, -1.0), std::invalid_argument);
}

TEST(BackProject, RoundTrips) {
  const Intrinsics intr = vga500();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uu(-50, 690), vv(-50, 530), dd(0.05, 30);
  for (int i = 0; i < 500; ++i) {
    const double u = uu(rng), v = vv(rng), d = dd(rng);
    const PixelCoord px = project(intr, back_project(intr, u, v, d));
    EXPECT_NEAR(px.u, u, 1e-9 * std::abs(u) + 1e-9);
    EXPECT_NEAR(px.v, v, 1e-9 * std::abs(v) + 1e-9);
    EXPECT_NEAR(px.z, d, 1e-9 * d);
    const Vec3 p{uu(rng) / 700, vv(rng) / 700, d};
    const PixelCoord q = project(intr, p);
    EXPECT_LT((back_project(intr, q.u, q.v, q.z) - p).norm(), 1e-9 * p.norm());
  }
}

TEST(NearestPixel, RoundsHalfUpAndRejectsOutside) {
  const Intrinsics intr = vga500();
  auto px = nearest_pixel(intr, 10.5, 3.49);
  ASSERT_TRUE(px);
  EXPECT_EQ(px->u, 11);
  EXPECT_EQ(px->v, 3);
  EXPECT_TRUE(nearest_pixel(intr, -0.5, 0.0));
  EXPECT_FALSE(nearest_pixel(intr, -0.51, 0.0));
  EXPECT_TRUE(nearest_pixel(intr, 639.49, 479.49));
  EXPECT_FALSE(nearest_pixel(intr, 639.5, 0.0));
  EXPECT_FALSE(nearest_pixel(intr, 0.0, 479.5));
}

TEST(Intrinsics, Validation) {
  Intrinsics intr = vga500();
  EXPECT_NO_THROW(intr.validate());
  intr.fx = 0;
  EXPECT_THROW(intr.validate(), std::invalid_argument);
  intr = vga500();
  intr.width = 0;
  EXPECT_THROW(intr.validate(), std::invalid_argument);
  intr = vga500();
  intr.cx = 700;
  EXPECT_THROW(intr.validate(), std::invalid_argument);
  intr = vga500();
  intr.depth_scale = 0;
  EXPECT_THROW(intr.validate(), std::invalid_argument);
}

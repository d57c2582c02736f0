#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tsdf_dse/accuracy.hpp"
#include "tsdf_dse/error.hpp"
#include "tsdf_dse/fusion.hpp"

using namespace tsdf;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, double extent) {
  std::uniform_real_distribution<double> u(0.0, extent);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));
  return c;
}

bool brute_within(const Vec3& p, const PointCloud& cloud, double tau) {
  for (const auto& q : cloud.points) {
    const double ex = q.x() - p.x(), ey = q.y() - p.y(), ez = q.z() - p.z();
    if (ex * ex + ey * ey + ez * ez <= tau * tau) return true;
  }
  return false;
}

FScoreReport brute_fscore(const PointCloud& recon, const PointCloud& gt, double tau) {
  FScoreReport r;
  r.tau = tau;
  if (recon.empty()) return r;
  std::size_t a = 0, b = 0;
  for (const auto& p : recon.points) a += brute_within(p, gt, tau);
  for (const auto& p : gt.points) b += brute_within(p, recon, tau);
  r.precision = static_cast<double>(a) / recon.size();
  r.recall = static_cast<double>(b) / gt.size();
  r.fscore = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

void set_voxel(VoxelGrid& g, long gx, long gy, long gz, float t) {
  const int dim = g.params().block_dim;
  const auto fdiv = [dim](long v) { return static_cast<int>(std::floor(static_cast<double>(v) / dim)); };
  const BlockCoord b{fdiv(gx), fdiv(gy), fdiv(gz)};
  VolumeBlock& blk = g.get_or_allocate(b);
  const int k = blk.flat_index({static_cast<int>(gx - static_cast<long>(b.x) * dim),
                                static_cast<int>(gy - static_cast<long>(b.y) * dim),
                                static_cast<int>(gz - static_cast<long>(b.z) * dim)});
  blk.values()[static_cast<std::size_t>(k)] = t;
  blk.weights()[static_cast<std::size_t>(k)] = 1.0f;
}

}  // namespace

TEST(ExtractSurface, SymmetricPairGivesMidpoint) {
  VoxelGrid g({}, StorageMode::Classic);
  set_voxel(g, 3, 4, 5, 0.5f);
  set_voxel(g, 4, 4, 5, -0.5f);
  const auto s = extract_surface(g);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_LT((s.points[0] - Vec3(0.04, 0.045, 0.055)).norm(), 1e-12);
}

TEST(ExtractSurface, InterpolatesAcrossBlockBorders) {
  VoxelGrid g({}, StorageMode::Classic);
  set_voxel(g, -1, 0, 0, 0.75f);
  set_voxel(g, 0, 0, 0, -0.25f);
  set_voxel(g, 15, 2, 2, -0.1f);
  set_voxel(g, 15, 2, 3, 0.3f);  // same block, z neighbor
  set_voxel(g, 16, 2, 2, 0.3f);  // next block, x neighbor
  const auto s = extract_surface(g);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.points[0].x(), -0.005 + 0.75 * 0.01, 1e-12);
  EXPECT_NEAR(s.points[1].z(), 0.025 + 0.25 * 0.01, 1e-9);
  EXPECT_NEAR(s.points[2].x(), 0.155 + 0.25 * 0.01, 1e-9);
}

TEST(ExtractSurface, ZeroVoxelIsTheCrossing) {
  VoxelGrid g({}, StorageMode::Classic);
  set_voxel(g, 2, 2, 2, 0.0f);
  set_voxel(g, 2, 2, 3, 0.4f);
  const auto s = extract_surface(g);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_LT((s.points[0] - Vec3(0.025, 0.025, 0.025)).norm(), 1e-12);
}

TEST(ExtractSurface, NoCrossingNoPoints) {
  VoxelGrid g({}, StorageMode::Classic);
  for (int i = 0; i < 20; ++i) set_voxel(g, i, i % 3, 0, 0.3f + 0.01f * i);
  EXPECT_TRUE(extract_surface(g).empty());
  VoxelGrid e({}, StorageMode::Classic);
  EXPECT_THROW(extract_surface(e), std::invalid_argument);
  e.get_or_allocate({0, 0, 0});
  EXPECT_THROW(extract_surface(e), std::invalid_argument);
}

TEST(ExtractSurface, UnobservedNeighborsAreIgnored) {
  VoxelGrid g({}, StorageMode::RunningSum);
  set_voxel(g, 0, 0, 0, -0.5f);  // its +x neighbor exists but has weight 0
  EXPECT_TRUE(extract_surface(g).empty());
}

TEST(ExtractSurface, FusedWallLiesOnItsPlane) {
  SceneSpec scene;
  scene.room = {{0, 0, 0}, {2, 2, 2}};
  Trajectory traj;
  traj.kind = TrajectoryKind::Static;
  traj.frame_count = 1;
  traj.center = {0.6, 1.0, 1.0};
  traj.target = {2.0, 1.0, 1.0};
  const auto seq = generate_synthetic(scene, traj, tsdf::testing::small_intrinsics());
  VoxelGrid g({}, StorageMode::Classic);
  fuse_sequence(g, seq.frames, FusionConfig{});
  const auto s = extract_surface(g);
  ASSERT_GT(s.size(), 1000u);
  const double vs = g.params().voxel_size;
  double sq = 0.0;
  for (const auto& p : s.points) {
    EXPECT_LE(std::abs(p.x() - 2.0), vs / 2);
    sq += (p.x() - 2.0) * (p.x() - 2.0);
  }
  EXPECT_LE(std::sqrt(sq / s.size()), vs / 4);
  EXPECT_TRUE(std::is_sorted(s.points.begin(), s.points.end(), [](const Vec3& a, const Vec3& b) {
    return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
  }));
}

TEST(FScore, Examples) {
  std::mt19937_64 rng(4);
  const PointCloud gt = random_cloud(rng, 500, 1.0);
  const auto same = fscore(gt, gt, 0.05);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.fscore, 1.0);
  const auto none = fscore(PointCloud{}, gt, 0.05);
  EXPECT_EQ(none.fscore, 0.0);
  EXPECT_EQ(none.precision, 0.0);
  PointCloud shifted = gt;
  for (auto& p : shifted.points) p.x() += 0.025;
  const auto off = fscore(shifted, gt, 0.05);
  EXPECT_EQ(off.fscore, 1.0);
  PointCloud far = gt;
  for (auto& p : far.points) p.x() += 10.0;
  EXPECT_EQ(fscore(far, gt, 0.05).fscore, 0.0);
  EXPECT_THROW(fscore(gt, PointCloud{}, 0.05), std::invalid_argument);
  EXPECT_THROW(fscore(gt, gt, 0.0), std::invalid_argument);
}

TEST(FScore, MatchesBruteForce) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> n(1, 600);
  std::uniform_real_distribution<double> tau(0.005, 0.2);
  for (int trial = 0; trial < 40; ++trial) {
    const PointCloud a = random_cloud(rng, n(rng), 1.0);
    const PointCloud b = random_cloud(rng, n(rng), 1.0);
    const double t = tau(rng);
    const auto fast = fscore(a, b, t);
    const auto slow = brute_fscore(a, b, t);
    EXPECT_EQ(fast.precision, slow.precision);
    EXPECT_EQ(fast.recall, slow.recall);
    EXPECT_EQ(fast.fscore, slow.fscore);
  }
}

TEST(FScore, SwapExchangesPrecisionAndRecall) {
  std::mt19937_64 rng(21);
  const PointCloud a = random_cloud(rng, 300, 1.0);
  const PointCloud b = random_cloud(rng, 200, 1.0);
  const auto ab = fscore(a, b, 0.07);
  const auto ba = fscore(b, a, 0.07);
  EXPECT_EQ(ab.precision, ba.recall);
  EXPECT_EQ(ab.recall, ba.precision);
  EXPECT_DOUBLE_EQ(ab.fscore, ba.fscore);
}

TEST(FScore, RigidTransformInvariance) {
  std::mt19937_64 rng(8);
  const PointCloud a = random_cloud(rng, 300, 1.0);
  const PointCloud b = random_cloud(rng, 300, 1.0);
  const Pose t(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix(), Vec3(5, -3, 2));
  PointCloud ta = a, tb = b;
  for (auto& p : ta.points) p = camera_to_world(t, p);
  for (auto& p : tb.points) p = camera_to_world(t, p);
  const auto x = fscore(a, b, 0.08);
  const auto y = fscore(ta, tb, 0.08);
  EXPECT_EQ(x.precision, y.precision);
  EXPECT_EQ(x.recall, y.recall);
}

TEST(FScore, MonotoneInTau) {
  std::mt19937_64 rng(30);
  const PointCloud a = random_cloud(rng, 400, 1.0);
  const PointCloud b = random_cloud(rng, 400, 1.0);
  FScoreReport prev = fscore(a, b, 0.001);
  for (double tau = 0.01; tau < 0.3; tau += 0.01) {
    const auto r = fscore(a, b, tau);
    EXPECT_GE(r.precision, prev.precision);
    EXPECT_GE(r.recall, prev.recall);
    prev = r;
  }
}

TEST(AccuracyLoss, Examples) {
  EXPECT_EQ(accuracy_loss(0.90, 0.90), 0.0);
  EXPECT_NEAR(accuracy_loss(0.88, 0.90), 0.02, 1e-15);
  EXPECT_LT(accuracy_loss(0.95, 0.90), 0.0);
}

TEST(PointCloudXyz, RoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "tsdf_accuracy_xyz";
  std::filesystem::create_directories(dir);
  PointCloud c;
  c.points = {{1.0, -2.5, 0.0000004}, {0.1234567, 3, 4}};
  write_xyz(dir / "a.xyz", c);
  std::ifstream in(dir / "a.xyz");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "1.000000 -2.500000 0.000000");
  const auto back = read_xyz(dir / "a.xyz");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_DOUBLE_EQ(back.points[1].x(), 0.123457);
  std::ofstream(dir / "bad.xyz") << "1 2 3\n4 five 6\n";
  EXPECT_THROW(read_xyz(dir / "bad.xyz"), FormatError);
  EXPECT_THROW(read_xyz(dir / "missing.xyz"), IoError);
  std::filesystem::remove_all(dir);
}

#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tsdf_dse/point_cloud.hpp"
#include "tsdf_dse/voxel_grid.hpp"

namespace tsdf {

inline constexpr double kDefaultFScoreTau = 0.05;

struct FScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  double tau = kDefaultFScoreTau;
};

/// Zero crossings between face-adjacent observed voxels, linearly
/// interpolated between voxel centers and deduplicated within voxel_size/4.
/// Output is sorted lexicographically. Throws std::invalid_argument when no
/// voxel has been observed.
PointCloud extract_surface(const VoxelGrid& grid);

/// Uniform-cell index answering "is any point within tau?" exactly.
class PointIndex {
 public:
  PointIndex(const PointCloud& cloud, double tau);

  bool any_within(const Vec3& p) const;

 private:
  struct Key {
    std::int64_t x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  Key key_of(const Vec3& p) const;

  const PointCloud* cloud_;
  double tau_;
  double tau_sq_;
  double cell_;
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
};

/// Throws std::invalid_argument when gt is empty or tau <= 0.
FScoreReport fscore(const PointCloud& recon, const PointCloud& gt, double tau = kDefaultFScoreTau);

/// baseline - design; positive means the design lost accuracy.
double accuracy_loss(double design_fscore, double baseline_fscore);

}  // namespace tsdf

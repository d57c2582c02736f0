#pragma once

#include <filesystem>
#include <vector>

#include "tsdf_dse/geometry.hpp"

namespace tsdf {

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Plain-text XYZ: one "x y z" line per point, meters, 6 decimals.
void write_xyz(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_xyz(const std::filesystem::path& path);

}  // namespace tsdf

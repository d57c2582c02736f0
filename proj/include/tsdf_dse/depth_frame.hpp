#pragma once

#include <cstdint>
#include <vector>

#include "tsdf_dse/geometry.hpp"

namespace tsdf {

/// Largest depth, in meters, a raster may encode. Anything farther is stored
/// as 0 (invalid).
inline constexpr double kMaxDepthMeters = 20.0;

/// One posed depth image. Raw samples are stored depth units; 0 = invalid.
struct DepthFrame {
  int index = 0;
  Intrinsics intr;
  Pose pose;  ///< camera-to-world
  std::vector<std::uint16_t> depth;

  std::uint16_t raw(int u, int v) const { return depth[static_cast<std::size_t>(v) * intr.width + u]; }
  bool valid(int u, int v) const { return raw(u, v) != 0; }
  /// Depth in meters at pixel (u, v); 0 when invalid.
  double depth_m(int u, int v) const { return raw(u, v) * intr.depth_scale; }

  std::size_t valid_count() const;

  /// Throws std::invalid_argument on size mismatch or bad intrinsics.
  void validate() const;
};

}  // namespace tsdf

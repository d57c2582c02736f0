#pragma once

#include <cmath>

#include "tsdf_dse/fusion.hpp"

namespace tsdf::detail {

// Per-frame constants for the voxel hot loop. Every eligibility decision in
// the library goes through classify() so pruned and unpruned runs agree
// bit for bit.
struct CameraView {
  CameraView(const DepthFrame& frame, const GridParams& params)
      : rt(frame.pose.rotation().transpose()),
        t(frame.pose.translation()),
        fx(frame.intr.fx),
        fy(frame.intr.fy),
        cx(frame.intr.cx),
        cy(frame.intr.cy),
        width(frame.intr.width),
        height(frame.intr.height),
        depth_scale(frame.intr.depth_scale),
        trunc(params.trunc),
        depth(frame.depth.data()) {}

  Vec3 to_camera(const Vec3& p_world) const { return rt * (p_world - t); }

  Classification classify(const Vec3& p_world) const {
    const Vec3 p = to_camera(p_world);
    const double z = p.z();
    if (!(z > 0.0)) return {VoxelStatus::BehindCameraPlane, 0.0};
    // floor(t) lies in [0, n) exactly when t does, so the range test comes
    // first and the truncating cast is the floor.
    const double tu = fx * p.x() / z + cx + 0.5;
    const double tv = fy * p.y() / z + cy + 0.5;
    if (!(tu >= 0.0 && tu < width && tv >= 0.0 && tv < height)) return {VoxelStatus::OutOfImageScope, 0.0};
    const auto raw = depth[static_cast<std::size_t>(tv) * static_cast<std::size_t>(width) + static_cast<std::size_t>(tu)];
    if (raw == 0) return {VoxelStatus::InvalidDepth, 0.0};
    const double sdf = (raw * depth_scale - z) / trunc;
    if (std::abs(sdf) > 1.0) return {VoxelStatus::OutOfTruncBand, sdf};
    return {VoxelStatus::Fused, sdf};
  }

  bool in_band(const Vec3& p_world) const { return classify(p_world).status == VoxelStatus::Fused; }

  Mat3 rt;
  Vec3 t;
  double fx, fy, cx, cy;
  int width, height;
  double depth_scale;
  double trunc;
  const std::uint16_t* depth;
};

}  // namespace tsdf::detail

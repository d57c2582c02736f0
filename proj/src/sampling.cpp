#include <cmath>
#include <stdexcept>

#include "tsdf_dse/dataflow.hpp"

namespace tsdf {

int SamplingConfig::stride() const {
  if (!(target_fps > 0.0) || !(source_fps > 0.0)) throw std::invalid_argument("sampling: rates must be positive");
  if (target_fps > source_fps) throw std::invalid_argument("sampling: target rate exceeds source rate");
  const double ratio = source_fps / target_fps;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) > 1e-9 * ratio) {
    throw std::invalid_argument("sampling: source/target rate ratio is not an integer");
  }
  return static_cast<int>(k);
}

std::vector<DepthFrame> sample_uniform(std::span<const DepthFrame> stream, const SamplingConfig& config) {
  const int k = config.stride();
  std::vector<DepthFrame> out;
  for (const auto& f : stream) {
    if (f.index % k == 0) out.push_back(f);
  }
  return out;
}

double redundancy(const DepthFrame& current, const DepthFrame& last_fused, double tol) {
  current.validate();
  last_fused.validate();
  const Pose to_last = last_fused.pose.inverse() * current.pose;
  std::size_t valid = 0;
  std::size_t seen = 0;
  for (int v = 0; v < current.intr.height; ++v) {
    for (int u = 0; u < current.intr.width; ++u) {
      if (!current.valid(u, v)) continue;
      ++valid;
      const Vec3 p = camera_to_world(to_last, back_project(current.intr, u, v, current.depth_m(u, v)));
      if (!(p.z() > 0.0)) continue;
      const PixelCoord pc = project(last_fused.intr, p);
      const auto px = nearest_pixel(last_fused.intr, pc.u, pc.v);
      if (!px || !last_fused.valid(px->u, px->v)) continue;
      if (std::abs(last_fused.depth_m(px->u, px->v) - p.z()) <= tol) ++seen;
    }
  }
  return valid == 0 ? 0.0 : static_cast<double>(seen) / static_cast<double>(valid);
}

}  // namespace tsdf

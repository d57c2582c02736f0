#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "camera_view.hpp"
#include "tsdf_dse/fusion.hpp"

namespace tsdf {

namespace {

using detail::CameraView;

constexpr double kPlaneEps = 1e-9;

// Camera-space half-space a . p + c >= 0.
struct Plane {
  Vec3 a;
  double c;
  double eval(const Vec3& p) const { return a.dot(p) + c; }
};

// Convex camera-space region: pixels [u0, u1] x [v0, v1] (pixel edges at +-0.5)
// and depth [z0, z1].
struct Piece {
  double u0, u1, v0, v1, z0, z1;
};

std::array<Plane, 6> piece_planes(const Piece& pc, const CameraView& view) {
  const double a = pc.u0 - 0.5 - view.cx;
  const double b = pc.u1 + 0.5 - view.cx;
  const double c = pc.v0 - 0.5 - view.cy;
  const double d = pc.v1 + 0.5 - view.cy;
  return {{
      {{view.fx, 0.0, -a}, 0.0},
      {{-view.fx, 0.0, b}, 0.0},
      {{0.0, view.fy, -c}, 0.0},
      {{0.0, -view.fy, d}, 0.0},
      {{0.0, 0.0, 1.0}, -pc.z0},
      {{0.0, 0.0, -1.0}, pc.z1},
  }};
}

std::array<Vec3, 8> block_corners(BlockCoord b, const GridParams& gp) {
  std::array<Vec3, 8> out;
  const long dim = gp.block_dim;
  for (int k = 0; k < 8; ++k) {
    out[static_cast<std::size_t>(k)] = {static_cast<double>(b.x * dim + ((k & 1) ? dim : 0)) * gp.voxel_size,
                                        static_cast<double>(b.y * dim + ((k & 2) ? dim : 0)) * gp.voxel_size,
                                        static_cast<double>(b.z * dim + ((k & 4) ? dim : 0)) * gp.voxel_size};
  }
  return out;
}

double plane_scale(const Plane& p) { return kPlaneEps * (1.0 + p.a.lpNorm<Eigen::Infinity>()); }

// True unless every corner lies strictly outside a single plane.
bool corners_meet(const std::array<Vec3, 8>& cam, const std::array<Plane, 6>& planes) {
  for (const auto& pl : planes) {
    const double eps = plane_scale(pl);
    bool all_out = true;
    for (const auto& p : cam) {
      if (pl.eval(p) >= -eps) {
        all_out = false;
        break;
      }
    }
    if (all_out) return false;
  }
  return true;
}

// Positive-vertex test of an axis-aligned camera-space box against planes.
bool aabb_meets(const Vec3& lo, const Vec3& hi, const std::array<Plane, 6>& planes) {
  for (const auto& pl : planes) {
    Vec3 pv;
    for (int i = 0; i < 3; ++i) pv[i] = pl.a[i] >= 0.0 ? hi[i] : lo[i];
    if (pl.eval(pv) < -plane_scale(pl)) return false;
  }
  return true;
}

std::array<Vec3, 8> piece_corners_world(const Piece& pc, const CameraView& view, const Pose& pose) {
  std::array<Vec3, 8> out;
  const double us[2] = {pc.u0 - 0.5, pc.u1 + 0.5};
  const double vs[2] = {pc.v0 - 0.5, pc.v1 + 0.5};
  const double zs[2] = {pc.z0, pc.z1};
  for (int k = 0; k < 8; ++k) {
    const double z = zs[(k >> 2) & 1];
    const Vec3 p_cam{(us[k & 1] - view.cx) * z / view.fx, (vs[(k >> 1) & 1] - view.cy) * z / view.fy, z};
    out[static_cast<std::size_t>(k)] = camera_to_world(pose, p_cam);
  }
  return out;
}

void sort_unique(std::vector<BlockCoord>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<BlockCoord> frustum_blocks(const VoxelGrid& grid, const DepthFrame& frame) {
  const GridParams& gp = grid.params();
  const CameraView view(frame, gp);
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -dmin;
  for (auto raw : frame.depth) {
    if (raw == 0) continue;
    const double d = raw * frame.intr.depth_scale;
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  std::vector<BlockCoord> out;
  if (!(dmax >= dmin)) return out;

  const Piece whole{0.0, frame.intr.width - 1.0, 0.0, frame.intr.height - 1.0, std::max(0.0, dmin - gp.trunc),
                    dmax + gp.trunc};
  const auto planes = piece_planes(whole, view);
  grid.for_each_block([&](const VolumeBlock& block) {
    const auto corners = block_corners(block.coord(), gp);
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto& c : corners) {
      const Vec3 p = view.to_camera(c);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    if (aabb_meets(lo, hi, planes)) out.push_back(block.coord());
  });
  sort_unique(out);
  return out;
}

std::vector<BlockCoord> surface_blocks(const GridParams& params, const DepthFrame& frame) {
  params.validate();
  const CameraView view(frame, params);
  const int tile = std::max(1, params.block_dim / 2);
  const int w = frame.intr.width;
  const int h = frame.intr.height;
  const double bs = params.block_size();
  const double trunc = params.trunc;

  struct Interval {
    double lo, hi;
    int u0, u1, v0, v1;
  };
  std::vector<Interval> ivals;
  std::vector<BlockCoord> out;

  for (int tv = 0; tv < h; tv += tile) {
    for (int tu = 0; tu < w; tu += tile) {
      ivals.clear();
      for (int v = tv; v < std::min(tv + tile, h); ++v) {
        for (int u = tu; u < std::min(tu + tile, w); ++u) {
          const auto raw = frame.raw(u, v);
          if (raw == 0) continue;
          const double d = raw * frame.intr.depth_scale;
          ivals.push_back({d - trunc, d + trunc, u, u, v, v});
        }
      }
      if (ivals.empty()) continue;
      std::sort(ivals.begin(), ivals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

      std::vector<Interval> merged;
      for (const auto& iv : ivals) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
          auto& m = merged.back();
          m.hi = std::max(m.hi, iv.hi);
          m.u0 = std::min(m.u0, iv.u0);
          m.u1 = std::max(m.u1, iv.u1);
          m.v0 = std::min(m.v0, iv.v0);
          m.v1 = std::max(m.v1, iv.v1);
        } else {
          merged.push_back(iv);
        }
      }

      for (const auto& m : merged) {
        const Piece pc{static_cast<double>(m.u0), static_cast<double>(m.u1), static_cast<double>(m.v0),
                       static_cast<double>(m.v1), std::max(0.0, m.lo), m.hi};
        if (!(pc.z1 > 0.0)) continue;
        const auto planes = piece_planes(pc, view);
        Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        Vec3 hi = -lo;
        for (const auto& c : piece_corners_world(pc, view, frame.pose)) {
          lo = lo.cwiseMin(c);
          hi = hi.cwiseMax(c);
        }
        const double pad = 1e-9 * (1.0 + std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
        const auto bmin = ((lo.array() - pad) / bs).floor().cast<int>();
        const auto bmax = ((hi.array() + pad) / bs).floor().cast<int>();
        for (int bz = bmin[2]; bz <= bmax[2]; ++bz) {
          for (int by = bmin[1]; by <= bmax[1]; ++by) {
            for (int bx = bmin[0]; bx <= bmax[0]; ++bx) {
              const BlockCoord b{bx, by, bz};
              auto corners = block_corners(b, params);
              for (auto& c : corners) c = view.to_camera(c);
              if (corners_meet(corners, planes)) out.push_back(b);
            }
          }
        }
      }
    }
  }
  sort_unique(out);
  return out;
}

VisibleSet visible_blocks(VoxelGrid& grid, const DepthFrame& frame) {
  VisibleSet vs;
  vs.blocks = frustum_blocks(grid, frame);
  const auto surface = surface_blocks(grid.params(), frame);
  for (const auto& c : surface) {
    bool created = false;
    grid.get_or_allocate(c, &created);
    if (created) ++vs.newly_allocated;
  }
  vs.blocks.insert(vs.blocks.end(), surface.begin(), surface.end());
  sort_unique(vs.blocks);
  return vs;
}

}  // namespace tsdf

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsdf_dse/depth_frame.hpp"
#include "tsdf_dse/point_cloud.hpp"

namespace tsdf {

// ---------------------------------------------------------------------------
// Synthetic scenes

struct AxisBox {
  Vec3 min;
  Vec3 max;
};

struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

using Primitive = std::variant<AxisBox, Sphere>;

/// A closed room (seen from inside) holding box and sphere props.
struct SceneSpec {
  AxisBox room;
  std::vector<Primitive> objects;

  /// Throws std::invalid_argument when an object leaves the room or has a
  /// non-positive size.
  void validate() const;

  /// 3 x 3 x 2.5 m room with a table, a cabinet and a ball.
  static SceneSpec default_room();
};

/// {"room": {"min": [..], "max": [..]},
///  "objects": [{"type": "box", "min": [..], "max": [..]},
///              {"type": "sphere", "center": [..], "radius": r}]}
SceneSpec parse_scene(std::string_view json_text);
SceneSpec load_scene(const std::filesystem::path& path);

enum class TrajectoryKind { Orbit, Lawnmower, Static };

TrajectoryKind parse_trajectory_kind(std::string_view name);

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::Orbit;
  int frame_count = 90;
  double frame_rate = 30.0;  ///< FPS
  Vec3 center{1.5, 1.5, 1.4};  ///< orbit center / lawnmower start / static eye
  Vec3 target{1.5, 1.5, 0.9};  ///< orbit look-at point
  double radius = 0.6;         ///< orbit radius (m) or lawnmower row length (m)
  double speed = 0.6;          ///< orbit rad/s or lawnmower m/s
  double pitch = 0.6;          ///< lawnmower downward pitch (rad)

  /// Throws std::invalid_argument for frame_count < 1 or degenerate motion.
  void validate() const;
  std::vector<Pose> poses() const;

  /// Orbit/lawnmower defaults placed relative to a room.
  static Trajectory for_room(const AxisBox& room, TrajectoryKind kind, int frame_count);
};

struct SyntheticOptions {
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;  ///< Gaussian depth noise, meters
  double gt_spacing = 0.005; ///< ground-truth sample spacing, meters
};

struct SyntheticSequence {
  std::vector<DepthFrame> frames;
  PointCloud ground_truth;  ///< surface samples seen by at least one frame
};

/// Camera-space z of the first surface hit through continuous pixel (u, v),
/// or 0 when the ray escapes.
double raycast_depth(const SceneSpec& scene, const Pose& pose, const Intrinsics& intr, double u, double v);

SyntheticSequence generate_synthetic(const SceneSpec& scene, const Trajectory& traj, const Intrinsics& intr,
                                     const SyntheticOptions& options = {});

// ---------------------------------------------------------------------------
// Frame sampling and redundancy

struct SamplingConfig {
  double target_fps = 30.0;
  double source_fps = 30.0;

  /// Throws std::invalid_argument when source/target is not a positive integer.
  int stride() const;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

/// Frames whose index is a multiple of the stride, order preserved.
std::vector<DepthFrame> sample_uniform(std::span<const DepthFrame> stream, const SamplingConfig& config);

inline constexpr double kDefaultRedundancyTolerance = 0.05;

/// Fraction of valid pixels in `current` whose surface point is also seen by
/// `last_fused` (in image, valid depth within `tol` of the point's depth).
double redundancy(const DepthFrame& current, const DepthFrame& last_fused, double tol = kDefaultRedundancyTolerance);

// ---------------------------------------------------------------------------
// Sequence directory format
//
//   intrinsics.json  {"fx", "fy", "cx", "cy", "width", "height", "depth_scale"}
//   frames.jsonl     {"index": int, "depth": "rel/path.d16", "pose": [16 numbers]}
//                    pose is a row-major 4x4 camera-to-world matrix
//   *.d16            "D16\0", u32 LE width, u32 LE height, u16 LE depth[w*h]

std::vector<std::uint8_t> encode_d16(int width, int height, std::span<const std::uint16_t> depth);
struct D16Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> depth;
};
/// Throws FormatError on bad magic or size mismatch.
D16Raster decode_d16(std::span<const std::uint8_t> bytes);
D16Raster read_d16(const std::filesystem::path& path);
void write_d16(const std::filesystem::path& path, int width, int height, std::span<const std::uint16_t> depth);

void write_intrinsics(const std::filesystem::path& path, const Intrinsics& intr);
Intrinsics read_intrinsics(const std::filesystem::path& path);

/// Writes intrinsics.json, frames.jsonl and depth/NNNNNN.d16. All frames
/// must share intrinsics.
void write_sequence(const std::filesystem::path& dir, std::span<const DepthFrame> frames);

/// Throws IoError for missing files and FormatError for malformed content;
/// messages name the offending file.
std::vector<DepthFrame> load_sequence(const std::filesystem::path& dir);

}  // namespace tsdf

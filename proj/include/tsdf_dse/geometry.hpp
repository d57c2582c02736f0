#pragma once

#include <array>
#include <optional>
#include <span>

#include <Eigen/Core>

namespace tsdf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Pinhole intrinsics of a depth camera. Pixel (i, j) covers the continuous
/// range [i - 0.5, i + 0.5) x [j - 0.5, j + 0.5).
struct Intrinsics {
  double fx = 260.0;
  double fy = 260.0;
  double cx = 160.0;
  double cy = 120.0;
  int width = 320;
  int height = 240;
  double depth_scale = 0.001;  ///< meters per stored depth unit

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

/// Rigid camera-to-world transform.
class Pose {
 public:
  Pose();
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return Pose(); }
  static Pose translation_only(const Vec3& t) { return Pose(Mat3::Identity(), t); }
  static Pose from_matrix(const Mat4& m);
  static Pose from_row_major(std::span<const double, 16> values);
  /// Camera at `eye` looking at `target` (x right, y down, z forward).
  static Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Mat4 matrix() const;
  std::array<double, 16> row_major() const;
  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

/// Continuous image coordinates plus camera-space depth (not ray length).
struct PixelCoord {
  double u;
  double v;
  double z;
};

struct PixelIndex {
  int u;
  int v;
};

Vec3 camera_to_world(const Pose& pose, const Vec3& p_cam);
Vec3 world_to_camera(const Pose& pose, const Vec3& p_world);

/// Throws std::domain_error when p_cam.z() == 0.
PixelCoord project(const Intrinsics& intr, const Vec3& p_cam);

/// Throws std::invalid_argument when depth <= 0.
Vec3 back_project(const Intrinsics& intr, double u, double v, double depth);

/// Nearest pixel with round-half-up, or nullopt when outside the raster.
std::optional<PixelIndex> nearest_pixel(const Intrinsics& intr, double u, double v);

}  // namespace tsdf

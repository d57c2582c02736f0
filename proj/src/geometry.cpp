#include "tsdf_dse/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

namespace tsdf {

namespace {

constexpr double kRotationTolerance = 1e-6;

void check_rotation(const Mat3& r) {
  if (!r.allFinite()) throw std::invalid_argument("pose: rotation has non-finite entries");
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTolerance) {
    throw std::invalid_argument("pose: rotation is not orthonormal (max |R^T R - I| = " + std::to_string(ortho) +
                                ")");
  }
  if (std::abs(r.determinant() - 1.0) > kRotationTolerance) {
    throw std::invalid_argument("pose: rotation determinant is not +1");
  }
}

}  // namespace

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("intrinsics: fx and fy must be positive");
  if (width <= 0 || height <= 0) throw std::invalid_argument("intrinsics: width and height must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw std::invalid_argument("intrinsics: principal point outside the image");
  }
  if (!(depth_scale > 0.0)) throw std::invalid_argument("intrinsics: depth_scale must be positive");
}

Pose::Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

Pose::Pose(const Mat3& rotation, const Vec3& translation) : rotation_(rotation), translation_(translation) {
  check_rotation(rotation_);
  if (!translation_.allFinite()) throw std::invalid_argument("pose: translation has non-finite entries");
}

Pose Pose::from_matrix(const Mat4& m) {
  const Eigen::RowVector4d last = m.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("pose: last row of a rigid transform must be [0 0 0 1]");
  }
  return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Pose Pose::from_row_major(std::span<const double, 16> values) {
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = values[static_cast<std::size_t>(r * 4 + c)];
  return from_matrix(m);
}

Pose Pose::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = target - eye;
  if (forward.norm() < 1e-12) throw std::invalid_argument("look_at: eye and target coincide");
  const Vec3 z = forward.normalized();
  const Vec3 x_raw = z.cross(up);
  if (x_raw.norm() < 1e-9) throw std::invalid_argument("look_at: up is parallel to the view direction");
  const Vec3 x = x_raw.normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose(r, eye);
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

std::array<double, 16> Pose::row_major() const {
  const Mat4 m = matrix();
  std::array<double, 16> out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[static_cast<std::size_t>(r * 4 + c)] = m(r, c);
  return out;
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return Pose(rt, -(rt * translation_));
}

Pose Pose::operator*(const Pose& rhs) const {
  return Pose(rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_);
}

Vec3 camera_to_world(const Pose& pose, const Vec3& p_cam) {
  return pose.rotation() * p_cam + pose.translation();
}

Vec3 world_to_camera(const Pose& pose, const Vec3& p_world) {
  return pose.rotation().transpose() * (p_world - pose.translation());
}

PixelCoord project(const Intrinsics& intr, const Vec3& p_cam) {
  const double z = p_cam.z();
  if (z == 0.0) throw std::domain_error("project: point lies on the camera plane (z = 0)");
  return {intr.fx * p_cam.x() / z + intr.cx, intr.fy * p_cam.y() / z + intr.cy, z};
}

Vec3 back_project(const Intrinsics& intr, double u, double v, double depth) {
  if (!(depth > 0.0)) throw std::invalid_argument("back_project: depth must be positive");
  return {(u - intr.cx) * depth / intr.fx, (v - intr.cy) * depth / intr.fy, depth};
}

std::optional<PixelIndex> nearest_pixel(const Intrinsics& intr, double u, double v) {
  const double ui = std::floor(u + 0.5);
  const double vi = std::floor(v + 0.5);
  if (!(ui >= 0.0 && ui < intr.width && vi >= 0.0 && vi < intr.height)) return std::nullopt;
  return PixelIndex{static_cast<int>(ui), static_cast<int>(vi)};
}

}  // namespace tsdf

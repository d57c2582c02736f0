#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tsdf_dse/dataflow.hpp"
#include "tsdf_dse/error.hpp"

namespace tsdf {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool box_ok(const AxisBox& b) { return (b.max.array() > b.min.array()).all(); }

bool box_inside(const AxisBox& inner, const AxisBox& outer) {
  return (inner.min.array() >= outer.min.array()).all() && (inner.max.array() <= outer.max.array()).all();
}

bool point_in_box(const Vec3& p, const AxisBox& b) {
  return (p.array() > b.min.array()).all() && (p.array() < b.max.array()).all();
}

// Distance at which a ray starting inside `room` leaves it.
double room_exit(const AxisBox& room, const Vec3& o, const Vec3& dir) {
  double t = kInf;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] > 0.0) t = std::min(t, (room.max[i] - o[i]) / dir[i]);
    if (dir[i] < 0.0) t = std::min(t, (room.min[i] - o[i]) / dir[i]);
  }
  return t;
}

// Entry distance into a solid box, or +inf.
double box_entry(const AxisBox& b, const Vec3& o, const Vec3& dir) {
  double t0 = 0.0;
  double t1 = kInf;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) {
      if (o[i] < b.min[i] || o[i] > b.max[i]) return kInf;
      continue;
    }
    double ta = (b.min[i] - o[i]) / dir[i];
    double tb = (b.max[i] - o[i]) / dir[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return kInf;
  }
  return t0 > 0.0 ? t0 : kInf;
}

double sphere_entry(const Sphere& s, const Vec3& o, const Vec3& dir) {
  const Vec3 oc = o - s.center;
  const double a = dir.squaredNorm();
  const double b = dir.dot(oc);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - a * c;
  if (disc < 0.0) return kInf;
  const double q = -(b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return kInf;
  const double t1 = q / a;
  const double t2 = c / q;
  double t = kInf;
  if (t1 > 0.0) t = std::min(t, t1);
  if (t2 > 0.0) t = std::min(t, t2);
  return t;
}

double first_hit(const SceneSpec& scene, const Vec3& o, const Vec3& dir) {
  double t = room_exit(scene.room, o, dir);
  for (const auto& obj : scene.objects) {
    const double ti = std::visit(
        [&](const auto& prim) {
          using T = std::decay_t<decltype(prim)>;
          if constexpr (std::is_same_v<T, AxisBox>) {
            return box_entry(prim, o, dir);
          } else {
            return sphere_entry(prim, o, dir);
          }
        },
        obj);
    t = std::min(t, ti);
  }
  return t;
}

Vec3 read_vec3(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 3) throw std::invalid_argument(std::string("scene: '") + key + "' needs 3 numbers");
  return {v[0], v[1], v[2]};
}

// Cell-centered samples on the rectangle origin + s*e1 + t*e2, s,t in [0,1].
void sample_face(const Vec3& origin, const Vec3& e1, const Vec3& e2, double spacing, std::vector<Vec3>& out) {
  const auto n1 = std::max<long>(1, std::lround(e1.norm() / spacing));
  const auto n2 = std::max<long>(1, std::lround(e2.norm() / spacing));
  for (long j = 0; j < n2; ++j) {
    for (long i = 0; i < n1; ++i) {
      out.push_back(origin + e1 * ((i + 0.5) / n1) + e2 * ((j + 0.5) / n2));
    }
  }
}

void sample_box(const AxisBox& b, double spacing, std::vector<Vec3>& out) {
  const Vec3 d = b.max - b.min;
  const Vec3 ex{d.x(), 0, 0}, ey{0, d.y(), 0}, ez{0, 0, d.z()};
  sample_face(b.min, ex, ey, spacing, out);
  sample_face(b.min + ez, ex, ey, spacing, out);
  sample_face(b.min, ex, ez, spacing, out);
  sample_face(b.min + ey, ex, ez, spacing, out);
  sample_face(b.min, ey, ez, spacing, out);
  sample_face(b.min + ex, ey, ez, spacing, out);
}

void sample_sphere(const Sphere& s, double spacing, std::vector<Vec3>& out) {
  const double area = 4.0 * std::numbers::pi * s.radius * s.radius;
  const auto n = std::max<long>(1, std::lround(area / (spacing * spacing)));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (long i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.push_back(s.center + s.radius * Vec3{r * std::cos(phi), r * std::sin(phi), z});
  }
}

bool visible_from(const SceneSpec& scene, const Pose& pose, const Intrinsics& intr, const Vec3& p) {
  const Vec3 pc = world_to_camera(pose, p);
  if (!(pc.z() > 0.0)) return false;
  const double u = intr.fx * pc.x() / pc.z() + intr.cx;
  const double v = intr.fy * pc.y() / pc.z() + intr.cy;
  if (!nearest_pixel(intr, u, v)) return false;
  const Vec3 dir = p - pose.translation();
  return first_hit(scene, pose.translation(), dir) >= 1.0 - 1e-6;
}

}  // namespace

void SceneSpec::validate() const {
  if (!box_ok(room)) throw std::invalid_argument("scene: room min must be below max on every axis");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& obj = objects[i];
    const std::string tag = "scene: object " + std::to_string(i);
    if (const auto* b = std::get_if<AxisBox>(&obj)) {
      if (!box_ok(*b)) throw std::invalid_argument(tag + " has non-positive extent");
      if (!box_inside(*b, room)) throw std::invalid_argument(tag + " leaves the room");
    } else {
      const auto& s = std::get<Sphere>(obj);
      if (!(s.radius > 0.0)) throw std::invalid_argument(tag + " has non-positive radius");
      const Vec3 r = Vec3::Constant(s.radius);
      if (!box_inside({s.center - r, s.center + r}, room)) throw std::invalid_argument(tag + " leaves the room");
    }
  }
}

SceneSpec SceneSpec::default_room() {
  SceneSpec s;
  s.room = {{0.0, 0.0, 0.0}, {3.0, 3.0, 2.5}};
  s.objects.emplace_back(AxisBox{{1.9, 1.0, 0.0}, {2.5, 1.8, 0.75}});
  s.objects.emplace_back(AxisBox{{0.3, 2.2, 0.0}, {0.9, 2.8, 1.2}});
  s.objects.emplace_back(Sphere{{1.0, 1.0, 0.4}, 0.3});
  return s;
}

SceneSpec parse_scene(std::string_view json_text) {
  SceneSpec s;
  try {
    const json j = json::parse(json_text);
    const auto& room = j.at("room");
    s.room = {read_vec3(room, "min"), read_vec3(room, "max")};
    if (j.contains("objects")) {
      for (const auto& o : j.at("objects")) {
        const auto type = o.at("type").get<std::string>();
        if (type == "box") {
          s.objects.emplace_back(AxisBox{read_vec3(o, "min"), read_vec3(o, "max")});
        } else if (type == "sphere") {
          s.objects.emplace_back(Sphere{read_vec3(o, "center"), o.at("radius").get<double>()});
        } else {
          throw std::invalid_argument("scene: unknown object type '" + type + "'");
        }
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene: ") + e.what());
  }
  s.validate();
  return s;
}

SceneSpec load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scene(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

TrajectoryKind parse_trajectory_kind(std::string_view name) {
  if (name == "orbit") return TrajectoryKind::Orbit;
  if (name == "lawnmower") return TrajectoryKind::Lawnmower;
  if (name == "static") return TrajectoryKind::Static;
  throw std::invalid_argument("unknown trajectory '" + std::string(name) + "' (orbit, lawnmower, static)");
}

void Trajectory::validate() const {
  if (frame_count < 1) throw std::invalid_argument("trajectory: frame_count must be >= 1");
  if (!(frame_rate > 0.0)) throw std::invalid_argument("trajectory: frame_rate must be positive");
  if (!(radius >= 0.0) || !(speed >= 0.0)) throw std::invalid_argument("trajectory: radius and speed must be >= 0");
  if (kind != TrajectoryKind::Static && frame_count > 1 && (radius == 0.0 || speed == 0.0)) {
    throw std::invalid_argument("trajectory: moving trajectory has zero radius or speed");
  }
  if (kind == TrajectoryKind::Lawnmower) {
    if (!(radius > 0.0)) throw std::invalid_argument("trajectory: lawnmower row length must be positive");
    if (!(std::abs(pitch) < std::numbers::pi / 2)) throw std::invalid_argument("trajectory: pitch out of range");
  }
}

std::vector<Pose> Trajectory::poses() const {
  validate();
  const Vec3 up{0.0, 0.0, 1.0};
  constexpr double kRowGap = 0.3;
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(frame_count));
  for (int i = 0; i < frame_count; ++i) {
    const double t = i / frame_rate;
    switch (kind) {
      case TrajectoryKind::Orbit: {
        const double a = speed * t;
        const Vec3 eye = center + radius * Vec3{std::cos(a), std::sin(a), 0.0};
        out.push_back(Pose::look_at(eye, target, up));
        break;
      }
      case TrajectoryKind::Lawnmower: {
        const double s = speed * t;
        const auto row = static_cast<long>(std::floor(s / radius));
        double along = s - static_cast<double>(row) * radius;
        if (row % 2 == 1) along = radius - along;
        const Vec3 eye = center + Vec3{along, kRowGap * static_cast<double>(row), 0.0};
        const Vec3 look{0.0, std::cos(pitch), -std::sin(pitch)};
        out.push_back(Pose::look_at(eye, eye + look, up));
        break;
      }
      case TrajectoryKind::Static:
        out.push_back(Pose::look_at(center, target, up));
        break;
    }
  }
  return out;
}

Trajectory Trajectory::for_room(const AxisBox& room, TrajectoryKind kind, int frame_count) {
  const Vec3 ext = room.max - room.min;
  Trajectory t;
  t.kind = kind;
  t.frame_count = frame_count;
  if (kind == TrajectoryKind::Lawnmower) {
    t.center = room.min + Vec3{0.25 * ext.x(), 0.25 * ext.y(), 0.56 * ext.z()};
    t.radius = 0.5 * ext.x();
    t.speed = 0.5;
  } else {
    t.center = room.min + Vec3{0.5 * ext.x(), 0.5 * ext.y(), 0.56 * ext.z()};
    t.radius = 0.2 * std::min(ext.x(), ext.y());
  }
  t.target = room.min + Vec3{0.5 * ext.x(), 0.5 * ext.y(), 0.36 * ext.z()};
  return t;
}

double raycast_depth(const SceneSpec& scene, const Pose& pose, const Intrinsics& intr, double u, double v) {
  const Vec3 dir = pose.rotation() * Vec3{(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0};
  const double t = first_hit(scene, pose.translation(), dir);
  return std::isfinite(t) ? t : 0.0;
}

SyntheticSequence generate_synthetic(const SceneSpec& scene, const Trajectory& traj, const Intrinsics& intr,
                                     const SyntheticOptions& options) {
  scene.validate();
  intr.validate();
  if (!(options.noise_sigma >= 0.0)) throw std::invalid_argument("synthetic: noise_sigma must be >= 0");
  if (!(options.gt_spacing > 0.0)) throw std::invalid_argument("synthetic: gt_spacing must be positive");

  const auto poses = traj.poses();
  for (const auto& p : poses) {
    const Vec3& eye = p.translation();
    bool inside_object = false;
    for (const auto& obj : scene.objects) {
      if (const auto* b = std::get_if<AxisBox>(&obj)) {
        inside_object = inside_object || point_in_box(eye, *b);
      } else {
        const auto& s = std::get<Sphere>(obj);
        inside_object = inside_object || (eye - s.center).norm() < s.radius;
      }
    }
    if (!point_in_box(eye, scene.room) || inside_object) {
      throw std::invalid_argument("synthetic: camera leaves free space of the room");
    }
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, options.noise_sigma > 0.0 ? options.noise_sigma : 1.0);
  const double max_units = std::min(kMaxDepthMeters / intr.depth_scale, 65535.0);

  SyntheticSequence seq;
  seq.frames.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    DepthFrame f;
    f.index = static_cast<int>(i);
    f.intr = intr;
    f.pose = poses[i];
    f.depth.assign(static_cast<std::size_t>(intr.width) * static_cast<std::size_t>(intr.height), 0);
    for (int v = 0; v < intr.height; ++v) {
      for (int u = 0; u < intr.width; ++u) {
        double z = raycast_depth(scene, f.pose, intr, u, v);
        if (options.noise_sigma > 0.0 && z > 0.0) z += noise(rng);
        const double units = std::round(z / intr.depth_scale);
        if (!(units >= 1.0) || units > max_units) continue;
        f.depth[static_cast<std::size_t>(v) * static_cast<std::size_t>(intr.width) + static_cast<std::size_t>(u)] =
            static_cast<std::uint16_t>(units);
      }
    }
    seq.frames.push_back(std::move(f));
  }

  std::vector<Vec3> samples;
  sample_box(scene.room, options.gt_spacing, samples);
  for (const auto& obj : scene.objects) {
    if (const auto* b = std::get_if<AxisBox>(&obj)) {
      sample_box(*b, options.gt_spacing, samples);
    } else {
      sample_sphere(std::get<Sphere>(obj), options.gt_spacing, samples);
    }
  }
  for (const auto& p : samples) {
    for (const auto& pose : poses) {
      if (visible_from(scene, pose, intr, p)) {
        seq.ground_truth.points.push_back(p);
        break;
      }
    }
  }
  return seq;
}

}  // namespace tsdf

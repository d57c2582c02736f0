#include "tsdf_dse/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsdf_dse/error.hpp"

namespace tsdf {

FreqLevel FreqLevel::percent(int pct) {
  if (pct < 50 || pct > 100 || pct % 10 != 0) {
    throw std::invalid_argument("frequency level must be one of 100, 90, 80, 70, 60, 50 (got " +
                                std::to_string(pct) + ")");
  }
  return FreqLevel(pct);
}

const std::array<FreqLevel, 6>& FreqLevel::all() {
  static const std::array<FreqLevel, 6> levels{FreqLevel(100), FreqLevel(90), FreqLevel(80),
                                               FreqLevel(70),  FreqLevel(60), FreqLevel(50)};
  return levels;
}

void PowerModel::validate() const {
  if (!(p_static_w >= 0.0)) throw std::invalid_argument("power model: p_static_w must be >= 0");
  if (!(p_dyn_max_w > 0.0)) throw std::invalid_argument("power model: p_dyn_max_w must be positive");
  if (!(v_floor > 0.0 && v_floor < 1.0)) throw std::invalid_argument("power model: v_floor must be in (0, 1)");
  if (cores < 1) throw std::invalid_argument("power model: cores must be >= 1");
}

void WorkCosts::validate() const {
  for (double c : {c_frame, c_block, c_alloc, c_position, c_classify, c_fuse_classic, c_fuse_running}) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("work costs must be finite and >= 0");
  }
}

WorkUnits work_from_stats(const FusionStats& stats, StorageMode mode, const WorkCosts& costs) {
  const double fuse = mode == StorageMode::RunningSum ? costs.c_fuse_running : costs.c_fuse_classic;
  WorkUnits w;
  w.serial = costs.c_frame * static_cast<double>(stats.frames) +
             costs.c_block * static_cast<double>(stats.blocks_visited) +
             costs.c_alloc * static_cast<double>(stats.blocks_allocated);
  w.parallel = costs.c_position * static_cast<double>(stats.positions_tested) +
               costs.c_classify * static_cast<double>(stats.voxels_classified()) +
               fuse * static_cast<double>(stats.count(VoxelStatus::Fused));
  return w;
}

std::string_view to_string(LatencyMode mode) { return mode == LatencyMode::Modeled ? "modeled" : "measured"; }

LatencyMode parse_latency_mode(std::string_view name) {
  if (name == "modeled") return LatencyMode::Modeled;
  if (name == "measured") return LatencyMode::Measured;
  throw std::invalid_argument("unknown latency mode '" + std::string(name) + "' (modeled, measured)");
}

void LatencyModel::validate() const {
  if (!(throughput_units_per_s > 0.0) || !std::isfinite(throughput_units_per_s)) {
    throw std::invalid_argument("latency model: throughput must be positive");
  }
  if (!(sigma >= 0.0)) throw std::invalid_argument("latency model: sigma must be >= 0");
}

double LatencyModel::efficiency(int threads) const {
  if (threads < 1) throw std::invalid_argument("latency model: threads must be >= 1");
  return 1.0 / (1.0 + sigma * (threads - 1));
}

double voltage_fraction(const PowerModel& model, FreqLevel f) {
  return model.v_floor + (1.0 - model.v_floor) * f.fraction();
}

double power(const PowerModel& model, FreqLevel f, double utilization) {
  if (!(utilization >= 0.0 && utilization <= 1.0 + 1e-12)) {
    throw std::invalid_argument("power: utilization must be in [0, 1]");
  }
  const double v = voltage_fraction(model, f);
  return model.p_static_w + model.p_dyn_max_w * v * v * f.fraction() * utilization;
}

double latency_frame(const WorkUnits& work, const LatencyModel& lat, FreqLevel f, int threads) {
  return (work.serial + work.parallel / (threads * lat.efficiency(threads))) /
         (lat.throughput_units_per_s * f.fraction());
}

double measured_latency(double wall_clock_s, FreqLevel f) { return wall_clock_s / f.fraction(); }

double energy(double total_time_s, const PowerModel& model, FreqLevel f) {
  return power(model, f) * total_time_s;
}

ExecutionCost execution_cost(const WorkUnits& work, const LatencyModel& lat, const PowerModel& pm, FreqLevel f,
                             int threads) {
  if (threads > pm.cores) throw std::invalid_argument("execution_cost: more threads than modeled cores");
  ExecutionCost c;
  c.time_s = latency_frame(work, lat, f, threads);
  if (!(c.time_s > 0.0)) return c;
  const double busy = (work.serial + work.parallel / lat.efficiency(threads)) /
                      (lat.throughput_units_per_s * f.fraction());
  c.utilization = std::min(1.0, busy / (c.time_s * pm.cores));
  c.energy_j = power(pm, f, c.utilization) * c.time_s;
  return c;
}

Calibration calibrate(std::span<const WorkSample> work_samples, std::span<const double> wall_clock_s,
                      const LatencyModel& base) {
  if (work_samples.size() != wall_clock_s.size()) throw std::invalid_argument("calibrate: span sizes differ");
  if (work_samples.size() < 2) throw std::invalid_argument("calibrate: need at least 2 samples");
  bool varied = false;
  bool multi_thread = false;
  for (std::size_t i = 0; i < work_samples.size(); ++i) {
    const auto& a = work_samples[i];
    const auto& b = work_samples.front();
    if (a.threads < 1) throw std::invalid_argument("calibrate: threads must be >= 1");
    if (!(wall_clock_s[i] > 0.0)) throw std::invalid_argument("calibrate: timings must be positive");
    varied = varied || a.work.serial != b.work.serial || a.work.parallel != b.work.parallel;
    multi_thread = multi_thread || a.threads != b.threads;
  }
  if (!varied) throw std::invalid_argument("calibrate: all samples carry the same work");

  // t = k * (S + P / n) + (k * sigma) * P * (n - 1) / n
  const auto features = [](const WorkSample& s) {
    const double n = s.threads;
    return std::pair{s.work.serial + s.work.parallel / n, s.work.parallel * (n - 1.0) / n};
  };
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < work_samples.size(); ++i) {
    const auto [x1, x2] = features(work_samples[i]);
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    b1 += x1 * wall_clock_s[i];
    b2 += x2 * wall_clock_s[i];
  }

  Calibration out;
  out.model = base;
  double k = 0.0;
  double ks = 0.0;
  const double det = s11 * s22 - s12 * s12;
  if (multi_thread && s22 > 0.0 && std::abs(det) > 1e-12 * s11 * s22) {
    k = (b1 * s22 - b2 * s12) / det;
    ks = (s11 * b2 - s12 * b1) / det;
  }
  if (!(k > 0.0) || ks < 0.0) {
    // Fall back to a throughput-only fit with the base sigma.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < work_samples.size(); ++i) {
      const auto [x1, x2] = features(work_samples[i]);
      const double x = x1 + base.sigma * x2;
      num += x * wall_clock_s[i];
      den += x * x;
    }
    if (!(den > 0.0)) throw std::invalid_argument("calibrate: samples carry no work");
    k = num / den;
    ks = base.sigma * k;
  }
  if (!(k > 0.0)) throw std::invalid_argument("calibrate: fit produced a non-positive cost");
  out.model.throughput_units_per_s = 1.0 / k;
  out.model.sigma = ks / k;

  std::vector<double> errs;
  for (std::size_t i = 0; i < work_samples.size(); ++i) {
    const double pred = latency_frame(work_samples[i].work, out.model, FreqLevel::percent(100), work_samples[i].threads);
    errs.push_back(std::abs(pred - wall_clock_s[i]) / wall_clock_s[i]);
  }
  std::sort(errs.begin(), errs.end());
  const std::size_t m = errs.size() / 2;
  out.median_relative_error = errs.size() % 2 ? errs[m] : 0.5 * (errs[m - 1] + errs[m]);
  return out;
}

PerfModel parse_perf_model(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("perf model: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("perf model: expected a JSON object");
  PerfModel m;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw std::invalid_argument("perf model: '" + key + "' must be a number");
    const double v = value.get<double>();
    if (key == "p_static_w") {
      m.power.p_static_w = v;
    } else if (key == "p_dyn_max_w") {
      m.power.p_dyn_max_w = v;
    } else if (key == "v_floor") {
      m.power.v_floor = v;
    } else if (key == "sigma") {
      m.latency.sigma = v;
    } else if (key == "throughput_units_per_s") {
      m.latency.throughput_units_per_s = v;
    } else {
      throw std::invalid_argument("perf model: unknown key '" + key + "'");
    }
  }
  m.power.validate();
  m.latency.validate();
  return m;
}

PerfModel load_perf_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_perf_model(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace tsdf

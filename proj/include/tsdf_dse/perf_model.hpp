#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string_view>

#include "tsdf_dse/fusion.hpp"

namespace tsdf {

/// Processor frequency as a percentage of the maximum: 100, 90, ..., 50.
class FreqLevel {
 public:
  /// Throws std::invalid_argument for any other percentage.
  static FreqLevel percent(int pct);
  /// The six levels, highest first.
  static const std::array<FreqLevel, 6>& all();

  int percent() const { return pct_; }
  double fraction() const { return pct_ / 100.0; }

  friend bool operator==(FreqLevel, FreqLevel) = default;
  friend auto operator<=>(FreqLevel, FreqLevel) = default;

 private:
  explicit FreqLevel(int pct) : pct_(pct) {}
  int pct_ = 100;
};

/// P(f) = p_static + p_dyn_max * v(f)^2 * (f / f_max) * utilization
/// v(f) = v_floor + (1 - v_floor) * (f / f_max)
/// utilization is the busy share of the `cores` workers (1 = all busy).
struct PowerModel {
  double p_static_w = 0.5;
  double p_dyn_max_w = 8.0;
  double v_floor = 0.6;
  int cores = 8;

  void validate() const;
};

/// Relative cost of each unit of work counted in FusionStats.
struct WorkCosts {
  double c_frame = 20000.0;      ///< per frame: setup, frustum bounds
  double c_block = 200.0;        ///< per visited block: visibility, dispatch
  double c_alloc = 4096.0;       ///< per newly allocated block
  double c_position = 4.0;       ///< per pruning position tested
  double c_classify = 1.0;       ///< per classified voxel
  double c_fuse_classic = 1.5;   ///< weighted-average update (division)
  double c_fuse_running = 0.5;   ///< running-sum update

  void validate() const;
};

struct WorkUnits {
  double serial = 0.0;    ///< frame setup, visibility, allocation
  double parallel = 0.0;  ///< voxel classification and fusion

  WorkUnits& operator+=(const WorkUnits& rhs) {
    serial += rhs.serial;
    parallel += rhs.parallel;
    return *this;
  }
};

WorkUnits work_from_stats(const FusionStats& stats, StorageMode mode, const WorkCosts& costs = {});

enum class LatencyMode { Modeled, Measured };

std::string_view to_string(LatencyMode mode);
LatencyMode parse_latency_mode(std::string_view name);

struct LatencyModel {
  LatencyMode mode = LatencyMode::Modeled;
  double throughput_units_per_s = 5.0e7;  ///< at 100% frequency, one worker
  double sigma = 0.08;                    ///< parallel overhead per extra worker

  void validate() const;
  /// eff(n) = 1 / (1 + sigma * (n - 1))
  double efficiency(int threads) const;
};

double voltage_fraction(const PowerModel& model, FreqLevel f);
double power(const PowerModel& model, FreqLevel f, double utilization = 1.0);

/// (serial + parallel / (threads * eff(threads))) / (throughput * f / f_max)
double latency_frame(const WorkUnits& work, const LatencyModel& lat, FreqLevel f, int threads);

/// Host wall-clock scaled to frequency f (latency is linear in 1/f).
double measured_latency(double wall_clock_s, FreqLevel f);

/// power(model, f) * total_time.
double energy(double total_time_s, const PowerModel& model, FreqLevel f);

/// Time and energy of a body of work, with dynamic power charged per busy
/// worker-second: serial phases keep one worker busy, parallel phases keep
/// `threads` busy for their inflated (1 / eff) duration.
struct ExecutionCost {
  double time_s = 0.0;
  double energy_j = 0.0;
  double utilization = 0.0;
};
ExecutionCost execution_cost(const WorkUnits& work, const LatencyModel& lat, const PowerModel& pm, FreqLevel f,
                             int threads);

struct WorkSample {
  WorkUnits work;
  int threads = 1;
};

struct Calibration {
  LatencyModel model;
  double median_relative_error = 0.0;
};

/// Least-squares fit of throughput (and of sigma when the samples span more
/// than one thread count) to host timings taken at full frequency. Throws
/// std::invalid_argument for fewer than 2 samples, mismatched spans, or
/// samples that all carry the same work.
Calibration calibrate(std::span<const WorkSample> work_samples, std::span<const double> wall_clock_s,
                      const LatencyModel& base = {});

struct PerfModel {
  PowerModel power;
  LatencyModel latency;
  WorkCosts costs;
};

/// Reads perfmodel.json. Recognized keys: p_static_w, p_dyn_max_w, v_floor,
/// sigma, throughput_units_per_s. Absent keys keep their defaults; unknown
/// keys are rejected (std::invalid_argument).
PerfModel load_perf_model(const std::filesystem::path& path);
PerfModel parse_perf_model(std::string_view json_text);

}  // namespace tsdf

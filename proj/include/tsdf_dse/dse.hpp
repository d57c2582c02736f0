#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tsdf_dse/accuracy.hpp"
#include "tsdf_dse/dataflow.hpp"
#include "tsdf_dse/fusion.hpp"
#include "tsdf_dse/perf_model.hpp"

namespace tsdf {

enum class Algo { Baseline, A };

std::string_view to_string(Algo algo);
Algo parse_algo(std::string_view name);

/// The six sampling rates, highest first.
const std::array<double, 6>& sampling_rates();

struct DesignConfig {
  Algo algo = Algo::Baseline;
  FreqLevel freq = FreqLevel::percent(100);
  SamplingConfig fps{};

  /// "A+E(80)+D(3.75)"; baseline-algorithm designs drop the "A+".
  std::string label() const;

  friend bool operator==(const DesignConfig&, const DesignConfig&) = default;
};

/// Thread counts of the two algorithm variants. The baseline uses every core
/// of the modeled board; A uses the energy sweet spot.
inline constexpr int kBaselineThreads = 8;
inline constexpr int kOptimizedThreads = 4;

FusionConfig fusion_config_for(Algo algo);

/// 72 designs: algo-major (baseline first), then frequency descending, then
/// sampling rate descending.
std::vector<DesignConfig> enumerate_designs();

struct DesignPoint {
  DesignConfig config;
  std::size_t design_index = 0;
  std::uint64_t frames_processed = 0;
  double energy_j = 0.0;   ///< whole sequence
  double latency_s = 0.0;  ///< mean per processed frame
  double fscore = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy_loss = 0.0;
  double energy_reduction = 1.0;
  double latency_reduction = 1.0;
  FusionStats stats;
};

struct Constraints {
  double latency_max_s = std::numeric_limits<double>::infinity();
  double accuracy_loss_max = std::numeric_limits<double>::infinity();
};

struct DseOptions {
  PerfModel perf;
  GridParams grid;
  double tau = kDefaultFScoreTau;
};

/// Fusion outcome of one (fusion config, sampling) pair.
struct RunOutcome {
  FusionConfig fusion;
  SamplingConfig sampling;
  FusionStats stats;
  FScoreReport accuracy;
  PointCloud surface;
};

/// Evaluates designs against one sequence. Fusion results depend only on the
/// algorithm and the sampling rate, so they are cached per pair and reused
/// for every frequency level.
class DesignEvaluator {
 public:
  DesignEvaluator(std::vector<DepthFrame> sequence, PointCloud ground_truth, DseOptions options = {});

  const DseOptions& options() const { return options_; }
  std::size_t sequence_length() const { return sequence_.size(); }

  /// (baseline, E(100), D(30)); evaluated on first use.
  const DesignPoint& baseline();

  DesignPoint evaluate(const DesignConfig& design);
  std::vector<DesignPoint> evaluate_all(std::span<const DesignConfig> designs);

  const RunOutcome& run(const FusionConfig& fusion, const SamplingConfig& sampling);

  /// Point for an arbitrary fusion config (used by the ablation).
  DesignPoint evaluate_custom(const FusionConfig& fusion, FreqLevel freq, const SamplingConfig& sampling);

 private:
  DesignPoint make_point(const RunOutcome& run, FreqLevel freq);
  void fill_relative(DesignPoint& p);

  std::vector<DepthFrame> sequence_;
  PointCloud ground_truth_;
  DseOptions options_;
  std::optional<DesignPoint> baseline_;
  std::map<std::tuple<int, bool, int, int>, RunOutcome> runs_;
};

/// One-shot helper: evaluates the baseline then `design`.
DesignPoint evaluate_design(std::span<const DepthFrame> sequence, const DesignConfig& design, const DseOptions& options,
                            const PointCloud& ground_truth);

struct Objectives {
  double energy;
  double latency;
};

/// Indices (ascending) of points not strictly dominated in (energy, latency).
std::vector<std::size_t> pareto_front_indices(std::span<const Objectives> points);
std::vector<DesignPoint> pareto_front(std::span<const DesignPoint> points);
bool on_front(const DesignPoint& p, std::span<const DesignPoint> front);

/// Minimum-energy feasible point; ties go to lower latency, then lower
/// accuracy loss, then lower design index.
std::optional<DesignPoint> select_optimal(std::span<const DesignPoint> points, const Constraints& c);

struct AblationEntry {
  std::string name;
  DesignPoint point;
};

/// Each algorithmic optimization alone, then all together, at E(100) D(30).
std::vector<AblationEntry> ablate_algorithm(DesignEvaluator& evaluator);

/// Energy reduction split into the A, E(X) and D(X) factors of a design:
/// baseline -> A+E(100)+D(30) -> A+E(X)+D(30) -> A+E(X)+D(Y).
struct EnergyBreakdown {
  double algorithm = 1.0;
  double execution = 1.0;
  double data = 1.0;
  double total = 1.0;
};
EnergyBreakdown energy_breakdown(std::span<const DesignPoint> points, const DesignConfig& design);

}  // namespace tsdf

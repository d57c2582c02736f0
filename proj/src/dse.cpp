#include "tsdf_dse/dse.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

#include "tsdf_dse/use_cases.hpp"

namespace tsdf {

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

bool same_fusion(const FusionConfig& a, const FusionConfig& b) {
  return a.voxel_pruning == b.voxel_pruning && a.op_pruning == b.op_pruning && a.threads == b.threads &&
         a.weight_per_frame == b.weight_per_frame && a.max_weight == b.max_weight;
}

std::size_t index_of(const DesignConfig& d) {
  const auto& freqs = FreqLevel::all();
  const auto& rates = sampling_rates();
  const auto fi = static_cast<std::size_t>(std::find(freqs.begin(), freqs.end(), d.freq) - freqs.begin());
  const auto ri = static_cast<std::size_t>(std::find(rates.begin(), rates.end(), d.fps.target_fps) - rates.begin());
  if (ri == rates.size() || d.fps.source_fps != 30.0) return 0;
  return (d.algo == Algo::A ? 36 : 0) + fi * 6 + ri;
}

}  // namespace

std::string_view to_string(Algo algo) { return algo == Algo::A ? "A" : "baseline"; }

Algo parse_algo(std::string_view name) {
  if (name == "baseline") return Algo::Baseline;
  if (name == "A" || name == "a") return Algo::A;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (baseline, A)");
}

const std::array<double, 6>& sampling_rates() {
  static const std::array<double, 6> rates{30.0, 15.0, 7.5, 3.75, 2.0, 1.0};
  return rates;
}

std::string DesignConfig::label() const {
  std::string s = algo == Algo::A ? "A+" : "";
  s += "E(" + std::to_string(freq.percent()) + ")+D(" + shortest(fps.target_fps) + ")";
  return s;
}

FusionConfig fusion_config_for(Algo algo) {
  FusionConfig c;
  if (algo == Algo::A) {
    c.voxel_pruning = VoxelPruning::On;
    c.op_pruning = true;
    c.threads = kOptimizedThreads;
  } else {
    c.voxel_pruning = VoxelPruning::Off;
    c.op_pruning = false;
    c.threads = kBaselineThreads;
  }
  return c;
}

std::vector<DesignConfig> enumerate_designs() {
  std::vector<DesignConfig> out;
  out.reserve(72);
  for (Algo a : {Algo::Baseline, Algo::A}) {
    for (FreqLevel f : FreqLevel::all()) {
      for (double r : sampling_rates()) out.push_back({a, f, SamplingConfig{r, 30.0}});
    }
  }
  return out;
}

DesignEvaluator::DesignEvaluator(std::vector<DepthFrame> sequence, PointCloud ground_truth, DseOptions options)
    : sequence_(std::move(sequence)), ground_truth_(std::move(ground_truth)), options_(std::move(options)) {
  if (sequence_.empty()) throw std::invalid_argument("DesignEvaluator: empty sequence");
  if (ground_truth_.empty()) throw std::invalid_argument("DesignEvaluator: empty ground truth");
  options_.grid.validate();
  options_.perf.power.validate();
  options_.perf.latency.validate();
  options_.perf.costs.validate();
  for (const auto& f : sequence_) f.validate();
}

const RunOutcome& DesignEvaluator::run(const FusionConfig& fusion, const SamplingConfig& sampling) {
  fusion.validate();
  const auto key = std::tuple{static_cast<int>(fusion.voxel_pruning), fusion.op_pruning, fusion.threads,
                              sampling.stride()};
  if (fusion.weight_per_frame != 1.0 || fusion.max_weight != 255.0) {
    throw std::invalid_argument("DesignEvaluator: only the default fusion weights are supported");
  }
  if (auto it = runs_.find(key); it != runs_.end()) return it->second;

  const auto frames = sample_uniform(sequence_, sampling);
  if (frames.empty()) throw std::invalid_argument("DesignEvaluator: sampling keeps no frame");
  RunOutcome out;
  out.fusion = fusion;
  out.sampling = sampling;
  {
    VoxelGrid grid(options_.grid, fusion.storage_mode());
    out.stats = fuse_sequence(grid, frames, fusion);
    if (grid.observed_voxel_count() > 0) out.surface = extract_surface(grid);
  }
  out.accuracy = fscore(out.surface, ground_truth_, options_.tau);
  return runs_.emplace(key, std::move(out)).first->second;
}

DesignPoint DesignEvaluator::make_point(const RunOutcome& run, FreqLevel freq) {
  const PerfModel& pm = options_.perf;
  const WorkUnits work = work_from_stats(run.stats, run.fusion.storage_mode(), pm.costs);
  const ExecutionCost cost = execution_cost(work, pm.latency, pm.power, freq, run.fusion.threads);

  DesignPoint p;
  p.frames_processed = run.stats.frames;
  p.stats = run.stats;
  double total_time = cost.time_s;
  double total_energy = cost.energy_j;
  if (pm.latency.mode == LatencyMode::Measured) {
    total_time = measured_latency(run.stats.elapsed_s, freq);
    total_energy = power(pm.power, freq, cost.utilization) * total_time;
  }
  p.latency_s = total_time / static_cast<double>(run.stats.frames);
  p.energy_j = total_energy;
  p.fscore = run.accuracy.fscore;
  p.precision = run.accuracy.precision;
  p.recall = run.accuracy.recall;
  return p;
}

void DesignEvaluator::fill_relative(DesignPoint& p) {
  const DesignPoint& b = baseline();
  p.energy_reduction = b.energy_j / p.energy_j;
  p.latency_reduction = b.latency_s / p.latency_s;
  p.accuracy_loss = accuracy_loss(p.fscore, b.fscore);
}

const DesignPoint& DesignEvaluator::baseline() {
  if (!baseline_) {
    const DesignConfig cfg{};
    DesignPoint p = make_point(run(fusion_config_for(cfg.algo), cfg.fps), cfg.freq);
    p.config = cfg;
    p.design_index = 0;
    p.energy_reduction = 1.0;
    p.latency_reduction = 1.0;
    p.accuracy_loss = 0.0;
    baseline_ = p;
  }
  return *baseline_;
}

DesignPoint DesignEvaluator::evaluate(const DesignConfig& design) {
  baseline();
  DesignPoint p = make_point(run(fusion_config_for(design.algo), design.fps), design.freq);
  p.config = design;
  p.design_index = index_of(design);
  fill_relative(p);
  return p;
}

std::vector<DesignPoint> DesignEvaluator::evaluate_all(std::span<const DesignConfig> designs) {
  std::vector<DesignPoint> out;
  out.reserve(designs.size());
  for (const auto& d : designs) out.push_back(evaluate(d));
  return out;
}

DesignPoint DesignEvaluator::evaluate_custom(const FusionConfig& fusion, FreqLevel freq, const SamplingConfig& sampling) {
  baseline();
  DesignPoint p = make_point(run(fusion, sampling), freq);
  p.config = {same_fusion(fusion, fusion_config_for(Algo::A)) ? Algo::A : Algo::Baseline, freq, sampling};
  p.design_index = index_of(p.config);
  fill_relative(p);
  return p;
}

DesignPoint evaluate_design(std::span<const DepthFrame> sequence, const DesignConfig& design, const DseOptions& options,
                            const PointCloud& ground_truth) {
  DesignEvaluator ev({sequence.begin(), sequence.end()}, ground_truth, options);
  return ev.evaluate(design);
}

std::vector<std::size_t> pareto_front_indices(std::span<const Objectives> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].energy != points[b].energy) return points[a].energy < points[b].energy;
    return points[a].latency < points[b].latency;
  });

  std::vector<std::size_t> keep;
  double best = std::numeric_limits<double>::infinity();  // min latency over strictly lower energy
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && points[order[j]].energy == points[order[i]].energy) ++j;
    const double group_min = points[order[i]].latency;
    for (std::size_t k = i; k < j; ++k) {
      const double l = points[order[k]].latency;
      if (l == group_min && l < best) keep.push_back(order[k]);
    }
    best = std::min(best, group_min);
    i = j;
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

std::vector<DesignPoint> pareto_front(std::span<const DesignPoint> points) {
  std::vector<Objectives> obj;
  obj.reserve(points.size());
  for (const auto& p : points) obj.push_back({p.energy_j, p.latency_s});
  std::vector<DesignPoint> out;
  for (auto i : pareto_front_indices(obj)) out.push_back(points[i]);
  return out;
}

bool on_front(const DesignPoint& p, std::span<const DesignPoint> front) {
  return std::any_of(front.begin(), front.end(), [&](const DesignPoint& q) { return q.config == p.config; });
}

std::optional<DesignPoint> select_optimal(std::span<const DesignPoint> points, const Constraints& c) {
  std::optional<std::size_t> best;
  const auto better = [&](std::size_t a, std::size_t b) {
    const auto& p = points[a];
    const auto& q = points[b];
    return std::tuple{p.energy_j, p.latency_s, p.accuracy_loss, p.design_index, a} <
           std::tuple{q.energy_j, q.latency_s, q.accuracy_loss, q.design_index, b};
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.latency_s <= c.latency_max_s) || !(p.accuracy_loss <= c.accuracy_loss_max)) continue;
    if (!best || better(i, *best)) best = i;
  }
  if (!best) return std::nullopt;
  return points[*best];
}

std::vector<AblationEntry> ablate_algorithm(DesignEvaluator& evaluator) {
  const FreqLevel f100 = FreqLevel::percent(100);
  const SamplingConfig d30{};
  const FusionConfig base = fusion_config_for(Algo::Baseline);

  std::vector<AblationEntry> out;
  out.push_back({"baseline", evaluator.baseline()});
  FusionConfig c = base;
  c.voxel_pruning = VoxelPruning::FlashFusion8;
  out.push_back({"voxel_pruning_8corner", evaluator.evaluate_custom(c, f100, d30)});
  c = base;
  c.voxel_pruning = VoxelPruning::On;
  out.push_back({"voxel_pruning", evaluator.evaluate_custom(c, f100, d30)});
  c = base;
  c.op_pruning = true;
  out.push_back({"op_pruning", evaluator.evaluate_custom(c, f100, d30)});
  c = base;
  c.threads = kOptimizedThreads;
  out.push_back({"threads_" + std::to_string(kOptimizedThreads), evaluator.evaluate_custom(c, f100, d30)});
  out.push_back({"all", evaluator.evaluate_custom(fusion_config_for(Algo::A), f100, d30)});
  return out;
}

EnergyBreakdown energy_breakdown(std::span<const DesignPoint> points, const DesignConfig& design) {
  const auto energy_of = [&](const DesignConfig& cfg) {
    for (const auto& p : points) {
      if (p.config == cfg) return p.energy_j;
    }
    throw std::invalid_argument("energy_breakdown: design " + cfg.label() + " not evaluated");
  };
  const double e0 = energy_of(DesignConfig{});
  const double e1 = energy_of({design.algo, FreqLevel::percent(100), SamplingConfig{}});
  const double e2 = energy_of({design.algo, design.freq, SamplingConfig{}});
  const double e3 = energy_of(design);
  return {e0 / e1, e1 / e2, e2 / e3, e0 / e3};
}

const std::vector<UseCasePreset>& use_case_presets() {
  static const std::vector<UseCasePreset> presets{
      {"scan_share", {0.033, 0.0}},
      {"spatial_audio", {std::numeric_limits<double>::infinity(), 0.03}},
      {"intermediate", {0.033, 0.01}},
  };
  return presets;
}

const UseCasePreset& use_case(std::string_view name) {
  for (const auto& p : use_case_presets()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown use case '" + std::string(name) + "' (scan_share, spatial_audio, intermediate)");
}

}  // namespace tsdf

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsdf_dse/dse.hpp"
#include "tsdf_dse/use_cases.hpp"

namespace tsdf {

struct Selection {
  std::string name;
  Constraints constraints;
  std::optional<DesignPoint> choice;
};

inline constexpr const char* kSweepCsvHeader =
    "design_id,algo,freq_pct,fps,frames_processed,energy_j,latency_ms,fscore,accuracy_loss,"
    "energy_reduction,latency_reduction,pareto";

std::string format_fps(double fps);

std::string sweep_csv(std::span<const DesignPoint> points, std::span<const DesignPoint> front);
/// Scatter of latency reduction (x) against energy reduction (y, log scale);
/// one <circle class="design"> per point, radius grows with accuracy loss,
/// front joined by a polyline.
std::string tradeoff_svg(std::span<const DesignPoint> points, std::span<const DesignPoint> front);

std::string design_point_json(const DesignPoint& p, bool pareto);
std::string fusion_stats_json(const FusionStats& stats, const WorkUnits& work);

struct SweepReport {
  std::vector<DesignPoint> points;
  std::vector<DesignPoint> front;
  std::vector<Selection> selections;
  std::vector<AblationEntry> ablation;
  PerfModel perf;
  LatencyMode mode = LatencyMode::Modeled;
};

std::string sweep_json(const SweepReport& report);
/// Reads the "points" array back (pareto flags recomputed by the caller).
std::vector<DesignPoint> parse_sweep_points(std::string_view json_text);

/// Writes sweep.csv, sweep.json and tradeoff.svg into out_dir. Throws IoError
/// when a file cannot be written.
void emit_report(const SweepReport& report, const std::filesystem::path& out_dir);

}  // namespace tsdf

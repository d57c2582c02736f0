#include "tsdf_dse/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tsdf_dse/error.hpp"

namespace tsdf {

using json = nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

// JSON has no infinity; unbounded limits are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json stats_to_json(const FusionStats& s) {
  json counts = json::object();
  for (std::size_t i = 0; i < kVoxelStatusCount; ++i) {
    counts[std::string(to_string(static_cast<VoxelStatus>(i)))] = s.status_counts[i];
  }
  return {{"frames", s.frames},
          {"status_counts", counts},
          {"voxels_classified", s.voxels_classified()},
          {"blocks_visited", s.blocks_visited},
          {"blocks_allocated", s.blocks_allocated},
          {"blocks_pruned_whole", s.blocks_pruned_whole},
          {"voxels_skipped_by_pruning", s.voxels_skipped_by_pruning},
          {"positions_tested", s.positions_tested},
          {"elapsed_s", s.elapsed_s}};
}

FusionStats stats_from_json(const json& j) {
  FusionStats s;
  const auto& counts = j.at("status_counts");
  for (std::size_t i = 0; i < kVoxelStatusCount; ++i) {
    s.status_counts[i] = counts.at(std::string(to_string(static_cast<VoxelStatus>(i)))).get<std::uint64_t>();
  }
  s.frames = j.at("frames").get<std::uint64_t>();
  s.blocks_visited = j.at("blocks_visited").get<std::uint64_t>();
  s.blocks_allocated = j.at("blocks_allocated").get<std::uint64_t>();
  s.blocks_pruned_whole = j.at("blocks_pruned_whole").get<std::uint64_t>();
  s.voxels_skipped_by_pruning = j.at("voxels_skipped_by_pruning").get<std::uint64_t>();
  s.positions_tested = j.at("positions_tested").get<std::uint64_t>();
  s.elapsed_s = j.at("elapsed_s").get<double>();
  return s;
}

json point_to_json(const DesignPoint& p, bool pareto) {
  return {{"design_id", p.config.label()},
          {"design_index", p.design_index},
          {"algo", to_string(p.config.algo)},
          {"freq_pct", p.config.freq.percent()},
          {"fps", p.config.fps.target_fps},
          {"source_fps", p.config.fps.source_fps},
          {"frames_processed", p.frames_processed},
          {"energy_j", p.energy_j},
          {"latency_s", p.latency_s},
          {"latency_ms", p.latency_s * 1e3},
          {"fscore", p.fscore},
          {"precision", p.precision},
          {"recall", p.recall},
          {"accuracy_loss", p.accuracy_loss},
          {"energy_reduction", p.energy_reduction},
          {"latency_reduction", p.latency_reduction},
          {"pareto", pareto},
          {"stats", stats_to_json(p.stats)}};
}

json constraints_to_json(const Constraints& c) {
  return {{"latency_max_s", finite_or_null(c.latency_max_s)},
          {"accuracy_loss_max", finite_or_null(c.accuracy_loss_max)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string format_fps(double fps) { return num(fps); }

std::string sweep_csv(std::span<const DesignPoint> points, std::span<const DesignPoint> front) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& p : points) {
    out += p.config.label() + "," + std::string(to_string(p.config.algo)) + "," +
           std::to_string(p.config.freq.percent()) + "," + format_fps(p.config.fps.target_fps) + "," +
           std::to_string(p.frames_processed) + "," + num(p.energy_j) + "," + num(p.latency_s * 1e3) + "," +
           num(p.fscore) + "," + num(p.accuracy_loss) + "," + num(p.energy_reduction) + "," +
           num(p.latency_reduction) + "," + (on_front(p, front) ? "true" : "false") + "\n";
  }
  return out;
}

std::string tradeoff_svg(std::span<const DesignPoint> points, std::span<const DesignPoint> front) {
  constexpr double W = 720, H = 480, L = 70, R = 20, T = 30, B = 50;
  double xmax = 1.0, ymin = 1.0, ymax = 1.0;
  for (const auto& p : points) {
    xmax = std::max(xmax, p.latency_reduction);
    ymin = std::min(ymin, p.energy_reduction);
    ymax = std::max(ymax, p.energy_reduction);
  }
  xmax *= 1.05;
  const double ly0 = std::log10(ymin) - 0.05;
  const double ly1 = std::log10(ymax) + 0.05;
  const auto sx = [&](double x) { return L + (W - L - R) * x / xmax; };
  const auto sy = [&](double y) { return H - B - (H - T - B) * (std::log10(y) - ly0) / (ly1 - ly0); };
  char buf[256];

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                W, H, W, H);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", L, H - B,
                W - R, H - B);
  s += buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", L, T, L,
                H - B);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\">latency reduction (x)</text>\n",
                (L + W - R) / 2, H - 12);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 %.1f)\">"
                "energy reduction (x, log)</text>\n",
                (T + H - B) / 2, (T + H - B) / 2);
  s += buf;

  std::vector<const DesignPoint*> fp;
  for (const auto& p : front) fp.push_back(&p);
  std::sort(fp.begin(), fp.end(), [](auto* a, auto* b) { return a->latency_reduction < b->latency_reduction; });
  s += "<polyline class=\"front\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < fp.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", sx(fp[i]->latency_reduction), sy(fp[i]->energy_reduction));
    s += buf;
  }
  s += "\"/>\n";

  for (const auto& p : points) {
    const double r = 3.0 + std::min(12.0, 300.0 * std::max(0.0, p.accuracy_loss));
    const bool pf = on_front(p, front);
    std::snprintf(buf, sizeof buf,
                  "<circle class=\"design\" cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"%s\" fill-opacity=\"0.6\">"
                  "<title>",
                  sx(p.latency_reduction), sy(p.energy_reduction), r,
                  pf ? "#c0392b" : (p.config.algo == Algo::A ? "#2471a3" : "#7f8c8d"));
    s += buf;
    s += p.config.label() + "</title></circle>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string design_point_json(const DesignPoint& p, bool pareto) { return point_to_json(p, pareto).dump(2); }

std::string fusion_stats_json(const FusionStats& stats, const WorkUnits& work) {
  json j = stats_to_json(stats);
  j["work_units"] = {{"serial", work.serial}, {"parallel", work.parallel}};
  return j.dump(2);
}

std::string sweep_json(const SweepReport& report) {
  json points = json::array();
  for (const auto& p : report.points) points.push_back(point_to_json(p, on_front(p, report.front)));
  json front = json::array();
  for (const auto& p : report.front) front.push_back(p.config.label());
  json selections = json::array();
  for (const auto& s : report.selections) {
    selections.push_back({{"name", s.name},
                          {"constraints", constraints_to_json(s.constraints)},
                          {"design_id", s.choice ? json(s.choice->config.label()) : json(nullptr)}});
  }
  json ablation = json::array();
  for (const auto& a : report.ablation) {
    ablation.push_back({{"name", a.name},
                        {"energy_j", a.point.energy_j},
                        {"latency_s", a.point.latency_s},
                        {"fscore", a.point.fscore},
                        {"energy_reduction", a.point.energy_reduction},
                        {"latency_reduction", a.point.latency_reduction},
                        {"accuracy_loss", a.point.accuracy_loss},
                        {"voxels_classified", a.point.stats.voxels_classified()}});
  }
  const auto& pm = report.perf;
  const json perf = {{"p_static_w", pm.power.p_static_w},
                     {"p_dyn_max_w", pm.power.p_dyn_max_w},
                     {"v_floor", pm.power.v_floor},
                     {"sigma", pm.latency.sigma},
                     {"throughput_units_per_s", pm.latency.throughput_units_per_s}};
  const json j = {{"mode", to_string(report.mode)}, {"perf_model", perf},     {"points", points},
                  {"front", front},                 {"selections", selections}, {"ablation", ablation}};
  return j.dump(2) + "\n";
}

std::vector<DesignPoint> parse_sweep_points(std::string_view json_text) {
  std::vector<DesignPoint> out;
  try {
    const json j = json::parse(json_text);
    for (const auto& e : j.at("points")) {
      DesignPoint p;
      p.config.algo = parse_algo(e.at("algo").get<std::string>());
      p.config.freq = FreqLevel::percent(e.at("freq_pct").get<int>());
      p.config.fps = SamplingConfig{e.at("fps").get<double>(), e.value("source_fps", 30.0)};
      p.design_index = e.value("design_index", std::size_t{0});
      p.frames_processed = e.at("frames_processed").get<std::uint64_t>();
      p.energy_j = e.at("energy_j").get<double>();
      p.latency_s = e.at("latency_s").get<double>();
      p.fscore = e.at("fscore").get<double>();
      p.precision = e.value("precision", 0.0);
      p.recall = e.value("recall", 0.0);
      p.accuracy_loss = e.at("accuracy_loss").get<double>();
      p.energy_reduction = e.at("energy_reduction").get<double>();
      p.latency_reduction = e.at("latency_reduction").get<double>();
      if (e.contains("stats")) p.stats = stats_from_json(e.at("stats"));
      out.push_back(p);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("sweep json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("sweep json: ") + e.what());
  }
  return out;
}

void emit_report(const SweepReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "sweep.csv", sweep_csv(report.points, report.front));
  write_text(out_dir / "sweep.json", sweep_json(report));
  write_text(out_dir / "tradeoff.svg", tradeoff_svg(report.points, report.front));
}

}  // namespace tsdf

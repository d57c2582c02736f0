#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsdf_dse/accuracy.hpp"
#include "tsdf_dse/dataflow.hpp"
#include "tsdf_dse/dse.hpp"
#include "tsdf_dse/error.hpp"
#include "tsdf_dse/report.hpp"
#include "tsdf_dse/use_cases.hpp"

namespace tsdf::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct GenArgs {
  std::string scene;
  std::string traj = "orbit";
  int frames = 90;
  std::string out;
  std::uint64_t seed = 0;
  double noise = 0.0;
};

struct FuseArgs {
  std::string seq;
  std::string algo = "baseline";
  int freq = 100;
  double fps = 30.0;
  int threads = 0;
  std::string mode = "modeled";
  std::string out;
  std::string gt;
  std::string perfmodel;
  double tau = kDefaultFScoreTau;
};

struct SweepArgs {
  std::string seq;
  std::string gt;
  std::string mode = "modeled";
  std::string out;
  std::string perfmodel;
  double tau = kDefaultFScoreTau;
};

struct SelectArgs {
  std::string sweep;
  std::string usecase;
  double latency_max_ms = std::numeric_limits<double>::infinity();
  double accuracy_loss_max = std::numeric_limits<double>::infinity();
};

struct EvalArgs {
  std::string recon;
  std::string gt;
  double tau = kDefaultFScoreTau;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

PerfModel perf_for(const std::string& perfmodel, const std::string& mode) {
  PerfModel pm = perfmodel.empty() ? PerfModel{} : load_perf_model(perfmodel);
  pm.latency.mode = parse_latency_mode(mode);
  return pm;
}

json metrics_json(const DesignPoint& p) {
  return {{"design_id", p.config.label()},
          {"algo", to_string(p.config.algo)},
          {"freq_pct", p.config.freq.percent()},
          {"fps", p.config.fps.target_fps},
          {"energy_j", p.energy_j},
          {"latency_ms", p.latency_s * 1e3},
          {"fscore", p.fscore},
          {"accuracy_loss", p.accuracy_loss},
          {"energy_reduction", p.energy_reduction},
          {"latency_reduction", p.latency_reduction}};
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const SceneSpec scene = a.scene.empty() ? SceneSpec::default_room() : load_scene(a.scene);
  if (a.frames < 1) throw std::invalid_argument("--frames must be >= 1");
  const Trajectory traj = Trajectory::for_room(scene.room, parse_trajectory_kind(a.traj), a.frames);
  SyntheticOptions opt;
  opt.seed = a.seed;
  opt.noise_sigma = a.noise;
  const SyntheticSequence seq = generate_synthetic(scene, traj, Intrinsics{}, opt);
  write_sequence(a.out, seq.frames);
  write_xyz(fs::path(a.out) / "gt.xyz", seq.ground_truth);
  out << json{{"out", a.out}, {"frames", seq.frames.size()}, {"gt_points", seq.ground_truth.size()}}.dump() << "\n";
  return kExitOk;
}

int cmd_fuse(const FuseArgs& a, std::ostream& out) {
  DseOptions opt;
  opt.perf = perf_for(a.perfmodel, a.mode);
  opt.tau = a.tau;
  const DesignConfig design{parse_algo(a.algo), FreqLevel::percent(a.freq), SamplingConfig{a.fps, 30.0}};
  FusionConfig fusion = fusion_config_for(design.algo);
  if (a.threads != 0) fusion.threads = a.threads;
  fusion.validate();
  design.fps.stride();

  auto frames = load_sequence(a.seq);
  const fs::path gt_path = a.gt.empty() ? fs::path(a.seq) / "gt.xyz" : fs::path(a.gt);
  PointCloud gt = read_xyz(gt_path);
  if (gt.empty()) throw FormatError(gt_path.string() + ": ground truth is empty");

  DesignEvaluator ev(std::move(frames), std::move(gt), opt);
  DesignPoint p = ev.evaluate_custom(fusion, design.freq, design.fps);
  p.config.algo = design.algo;
  const RunOutcome& run = ev.run(fusion, design.fps);

  make_dir(a.out);
  write_xyz(fs::path(a.out) / "surface.xyz", run.surface);
  write_text(fs::path(a.out) / "stats.json",
             fusion_stats_json(run.stats, work_from_stats(run.stats, fusion.storage_mode(), opt.perf.costs)) + "\n");
  write_text(fs::path(a.out) / "design.json", design_point_json(p, false) + "\n");
  json summary = metrics_json(p);
  summary["threads"] = fusion.threads;
  summary["mode"] = a.mode;
  summary["surface_points"] = run.surface.size();
  out << summary.dump() << "\n";
  return kExitOk;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  DseOptions opt;
  opt.perf = perf_for(a.perfmodel, a.mode);
  opt.tau = a.tau;
  auto frames = load_sequence(a.seq);
  PointCloud gt = read_xyz(a.gt);
  if (gt.empty()) throw FormatError(a.gt + ": ground truth is empty");

  DesignEvaluator ev(std::move(frames), std::move(gt), opt);
  const auto designs = enumerate_designs();
  SweepReport report;
  report.perf = opt.perf;
  report.mode = opt.perf.latency.mode;
  report.points = ev.evaluate_all(designs);
  report.front = pareto_front(report.points);
  for (const auto& uc : use_case_presets()) {
    report.selections.push_back({uc.name, uc.constraints, select_optimal(report.points, uc.constraints)});
  }
  report.ablation = ablate_algorithm(ev);
  emit_report(report, a.out);

  json sel = json::object();
  for (const auto& s : report.selections) sel[s.name] = s.choice ? json(s.choice->config.label()) : json(nullptr);
  json front = json::array();
  for (const auto& p : report.front) front.push_back(p.config.label());
  out << json{{"out", a.out}, {"designs", report.points.size()}, {"front", front}, {"selections", sel}}.dump() << "\n";
  return kExitOk;
}

int cmd_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  Constraints c;
  std::string name = "custom";
  if (!a.usecase.empty()) {
    const auto& uc = use_case(a.usecase);
    c = uc.constraints;
    name = uc.name;
  }
  if (std::isfinite(a.latency_max_ms)) c.latency_max_s = a.latency_max_ms / 1e3;
  if (std::isfinite(a.accuracy_loss_max)) c.accuracy_loss_max = a.accuracy_loss_max;
  if (c.latency_max_s < 0.0 || c.accuracy_loss_max < 0.0) throw std::invalid_argument("constraints must be >= 0");

  const auto points = parse_sweep_points(read_text(a.sweep));
  const auto choice = select_optimal(points, c);
  if (!choice) {
    err << "no design satisfies the constraints\n";
    out << json{{"usecase", name}, {"selected", nullptr}}.dump() << "\n";
    return kExitInfeasible;
  }
  json j = metrics_json(*choice);
  j["usecase"] = name;
  out << j.dump() << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const PointCloud recon = read_xyz(a.recon);
  const PointCloud gt = read_xyz(a.gt);
  if (gt.empty()) throw std::invalid_argument(a.gt + ": ground truth is empty");
  const FScoreReport r = fscore(recon, gt, a.tau);
  out << json{{"precision", r.precision}, {"recall", r.recall}, {"fscore", r.fscore}, {"tau", r.tau}}.dump() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TSDF fusion and design-space exploration", "tsdf-dse"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic depth sequence with ground truth");
  g->add_option("--scene", gen.scene, "Scene JSON (default: built-in room)");
  g->add_option("--traj", gen.traj, "orbit | lawnmower | static")->capture_default_str();
  g->add_option("--frames", gen.frames, "Frame count")->capture_default_str();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Noise seed")->capture_default_str();
  g->add_option("--noise", gen.noise, "Gaussian depth noise sigma (m)")->capture_default_str();

  FuseArgs fuse;
  auto* f = app.add_subcommand("fuse", "Fuse a sequence under one design");
  f->add_option("--seq", fuse.seq, "Sequence directory")->required();
  f->add_option("--algo", fuse.algo, "baseline | A")->capture_default_str();
  f->add_option("--freq", fuse.freq, "Frequency percent (50-100, step 10)")->capture_default_str();
  f->add_option("--fps", fuse.fps, "Sampling rate")->capture_default_str();
  f->add_option("--threads", fuse.threads, "Worker threads (default: per algorithm)");
  f->add_option("--mode", fuse.mode, "modeled | measured")->capture_default_str();
  f->add_option("--out", fuse.out, "Output directory")->required();
  f->add_option("--gt", fuse.gt, "Ground-truth XYZ (default: <seq>/gt.xyz)");
  f->add_option("--perfmodel", fuse.perfmodel, "perfmodel.json");
  f->add_option("--tau", fuse.tau, "F-score distance threshold (m)")->capture_default_str();

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Evaluate all 72 designs");
  s->add_option("--seq", sweep.seq, "Sequence directory")->required();
  s->add_option("--gt", sweep.gt, "Ground-truth XYZ")->required();
  s->add_option("--mode", sweep.mode, "modeled | measured")->capture_default_str();
  s->add_option("--out", sweep.out, "Output directory")->required();
  s->add_option("--perfmodel", sweep.perfmodel, "perfmodel.json");
  s->add_option("--tau", sweep.tau, "F-score distance threshold (m)")->capture_default_str();

  SelectArgs sel;
  auto* c = app.add_subcommand("select", "Pick the minimum-energy design under constraints");
  c->add_option("--sweep", sel.sweep, "sweep.json")->required();
  auto* uc = c->add_option("--usecase", sel.usecase, "scan_share | spatial_audio | intermediate");
  c->add_option("--latency-max", sel.latency_max_ms, "Per-frame latency limit (ms)")->excludes(uc);
  c->add_option("--accuracy-loss-max", sel.accuracy_loss_max, "F-score loss limit")->excludes(uc);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "F-score of a reconstruction against ground truth");
  e->add_option("--recon", ev.recon, "Reconstructed XYZ")->required();
  e->add_option("--gt", ev.gt, "Ground-truth XYZ")->required();
  e->add_option("--tau", ev.tau, "Distance threshold (m)")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (f->parsed()) return cmd_fuse(fuse, out);
    if (s->parsed()) return cmd_sweep(sweep, out);
    if (c->parsed()) return cmd_select(sel, out, err);
    if (e->parsed()) return cmd_eval(ev, out);
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const FormatError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tsdf::cli

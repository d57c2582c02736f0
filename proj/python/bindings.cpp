#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tsdf_dse/accuracy.hpp"
#include "tsdf_dse/dataflow.hpp"
#include "tsdf_dse/dse.hpp"
#include "tsdf_dse/error.hpp"
#include "tsdf_dse/fusion.hpp"
#include "tsdf_dse/perf_model.hpp"
#include "tsdf_dse/use_cases.hpp"

namespace py = pybind11;
using namespace tsdf;

namespace {

py::array_t<double> cloud_to_array(const PointCloud& cloud) {
  py::array_t<double> out({static_cast<py::ssize_t>(cloud.size()), py::ssize_t{3}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int k = 0; k < 3; ++k) m(static_cast<py::ssize_t>(i), k) = cloud.points[i][k];
  }
  return out;
}

PointCloud array_to_cloud(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw std::invalid_argument("expected an (N, 3) array");
  PointCloud c;
  auto r = a.unchecked<2>();
  c.points.reserve(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) c.points.emplace_back(r(i, 0), r(i, 1), r(i, 2));
  return c;
}

py::dict stats_dict(const FusionStats& s) {
  py::dict counts;
  for (std::size_t i = 0; i < kVoxelStatusCount; ++i) {
    counts[py::str(std::string(to_string(static_cast<VoxelStatus>(i))))] = s.status_counts[i];
  }
  py::dict d;
  d["status_counts"] = counts;
  d["frames"] = s.frames;
  d["voxels_classified"] = s.voxels_classified();
  d["blocks_visited"] = s.blocks_visited;
  d["blocks_allocated"] = s.blocks_allocated;
  d["blocks_pruned_whole"] = s.blocks_pruned_whole;
  d["voxels_skipped_by_pruning"] = s.voxels_skipped_by_pruning;
  d["positions_tested"] = s.positions_tested;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "TSDF fusion and design-space exploration";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<Intrinsics>(m, "Intrinsics")
      .def(py::init<>())
      .def_readwrite("fx", &Intrinsics::fx)
      .def_readwrite("fy", &Intrinsics::fy)
      .def_readwrite("cx", &Intrinsics::cx)
      .def_readwrite("cy", &Intrinsics::cy)
      .def_readwrite("width", &Intrinsics::width)
      .def_readwrite("height", &Intrinsics::height)
      .def_readwrite("depth_scale", &Intrinsics::depth_scale)
      .def("validate", &Intrinsics::validate);

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init([](const Mat4& mat) { return Pose::from_matrix(mat); }), py::arg("matrix"))
      .def_static("look_at", &Pose::look_at, py::arg("eye"), py::arg("target"), py::arg("up"))
      .def_static("translation_only", &Pose::translation_only)
      .def_property_readonly("rotation", &Pose::rotation)
      .def_property_readonly("translation", &Pose::translation)
      .def("matrix", &Pose::matrix)
      .def("inverse", &Pose::inverse);

  py::class_<DepthFrame>(m, "DepthFrame")
      .def(py::init<>())
      .def_readwrite("index", &DepthFrame::index)
      .def_readwrite("intrinsics", &DepthFrame::intr)
      .def_readwrite("pose", &DepthFrame::pose)
      .def_property(
          "depth",
          [](const DepthFrame& f) {
            py::array_t<std::uint16_t> a({f.intr.height, f.intr.width});
            std::copy(f.depth.begin(), f.depth.end(), a.mutable_data());
            return a;
          },
          [](DepthFrame& f, const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& a) {
            if (a.ndim() != 2) throw std::invalid_argument("depth must be a 2-d array");
            f.depth.assign(a.data(), a.data() + a.size());
          })
      .def("valid_count", &DepthFrame::valid_count)
      .def("validate", &DepthFrame::validate);

  py::enum_<StorageMode>(m, "StorageMode").value("Classic", StorageMode::Classic).value("RunningSum", StorageMode::RunningSum);
  py::enum_<VoxelPruning>(m, "VoxelPruning")
      .value("Off", VoxelPruning::Off)
      .value("On", VoxelPruning::On)
      .value("FlashFusion8", VoxelPruning::FlashFusion8);

  py::class_<GridParams>(m, "GridParams")
      .def(py::init<>())
      .def_readwrite("voxel_size", &GridParams::voxel_size)
      .def_readwrite("trunc", &GridParams::trunc)
      .def_readwrite("block_dim", &GridParams::block_dim);

  py::class_<VoxelGrid>(m, "VoxelGrid")
      .def(py::init<GridParams, StorageMode>(), py::arg("params") = GridParams{}, py::arg("mode") = StorageMode::Classic)
      .def_property_readonly("block_count", &VoxelGrid::block_count)
      .def("observed_voxel_count", &VoxelGrid::observed_voxel_count)
      .def("snapshot", [](const VoxelGrid& g) {
        const auto bytes = snapshot_bytes(g);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      });

  py::class_<FusionConfig>(m, "FusionConfig")
      .def(py::init<>())
      .def_readwrite("voxel_pruning", &FusionConfig::voxel_pruning)
      .def_readwrite("op_pruning", &FusionConfig::op_pruning)
      .def_readwrite("threads", &FusionConfig::threads)
      .def_readwrite("weight_per_frame", &FusionConfig::weight_per_frame)
      .def_readwrite("max_weight", &FusionConfig::max_weight)
      .def_property_readonly("storage_mode", &FusionConfig::storage_mode);

  py::class_<FusionStats>(m, "FusionStats")
      .def_property_readonly("voxels_classified", &FusionStats::voxels_classified)
      .def_readonly("frames", &FusionStats::frames)
      .def("as_dict", &stats_dict);

  m.def("tsdf_update",
        [](double t, double w_prev, double w, double d, double max_w) {
          const auto u = tsdf_update(t, w_prev, w, d, max_w);
          return py::make_tuple(u.tsdf, u.weight);
        },
        py::arg("tsdf_prev"), py::arg("weight_prev"), py::arg("w"), py::arg("d"), py::arg("max_weight") = 255.0);
  m.def("fuse_frame", &fuse_frame, py::arg("grid"), py::arg("frame"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("fuse_sequence",
        [](VoxelGrid& g, const std::vector<DepthFrame>& frames, const FusionConfig& c) {
          return fuse_sequence(g, frames, c);
        },
        py::arg("grid"), py::arg("frames"), py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("extract_surface", [](const VoxelGrid& g) { return cloud_to_array(extract_surface(g)); });

  py::class_<FScoreReport>(m, "FScoreReport")
      .def_readonly("precision", &FScoreReport::precision)
      .def_readonly("recall", &FScoreReport::recall)
      .def_readonly("fscore", &FScoreReport::fscore)
      .def_readonly("tau", &FScoreReport::tau);
  m.def("fscore",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& recon,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& gt,
           double tau) { return fscore(array_to_cloud(recon), array_to_cloud(gt), tau); },
        py::arg("recon"), py::arg("gt"), py::arg("tau") = kDefaultFScoreTau);

  py::class_<SceneSpec>(m, "SceneSpec")
      .def_static("default_room", &SceneSpec::default_room)
      .def_static("from_json", &parse_scene)
      .def_static("load", &load_scene);

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init<>())
      .def_static("for_room",
                  [](const SceneSpec& s, const std::string& kind, int frames) {
                    return Trajectory::for_room(s.room, parse_trajectory_kind(kind), frames);
                  },
                  py::arg("scene"), py::arg("kind") = "orbit", py::arg("frames") = 90)
      .def_readwrite("frame_count", &Trajectory::frame_count)
      .def_readwrite("frame_rate", &Trajectory::frame_rate)
      .def_readwrite("radius", &Trajectory::radius)
      .def_readwrite("speed", &Trajectory::speed)
      .def("poses", &Trajectory::poses);

  m.def("generate_synthetic",
        [](const SceneSpec& scene, const Trajectory& traj, const Intrinsics& intr, std::uint64_t seed, double noise,
           double gt_spacing) {
          SyntheticSequence seq;
          {
            py::gil_scoped_release release;
            seq = generate_synthetic(scene, traj, intr, {seed, noise, gt_spacing});
          }
          return py::make_tuple(seq.frames, cloud_to_array(seq.ground_truth));
        },
        py::arg("scene"), py::arg("trajectory"), py::arg("intrinsics") = Intrinsics{}, py::arg("seed") = 0,
        py::arg("noise") = 0.0, py::arg("gt_spacing") = 0.005);

  py::class_<SamplingConfig>(m, "SamplingConfig")
      .def(py::init([](double target, double source) { return SamplingConfig{target, source}; }),
           py::arg("target_fps") = 30.0, py::arg("source_fps") = 30.0)
      .def_readwrite("target_fps", &SamplingConfig::target_fps)
      .def_readwrite("source_fps", &SamplingConfig::source_fps)
      .def("stride", &SamplingConfig::stride);
  m.def("sample_uniform", [](const std::vector<DepthFrame>& s, const SamplingConfig& c) { return sample_uniform(s, c); });
  m.def("redundancy", &redundancy, py::arg("current"), py::arg("last_fused"),
        py::arg("tol") = kDefaultRedundancyTolerance);
  m.def("load_sequence", &load_sequence);
  m.def("write_sequence",
        [](const std::filesystem::path& dir, const std::vector<DepthFrame>& frames) { write_sequence(dir, frames); });

  py::class_<PerfModel>(m, "PerfModel")
      .def(py::init<>())
      .def_static("load", &load_perf_model)
      .def_property(
          "throughput", [](const PerfModel& p) { return p.latency.throughput_units_per_s; },
          [](PerfModel& p, double v) { p.latency.throughput_units_per_s = v; })
      .def_property(
          "p_static_w", [](const PerfModel& p) { return p.power.p_static_w; },
          [](PerfModel& p, double v) { p.power.p_static_w = v; });
  m.def("power", [](const PerfModel& pm, int pct, double util) { return power(pm.power, FreqLevel::percent(pct), util); },
        py::arg("model"), py::arg("freq_pct"), py::arg("utilization") = 1.0);
  m.def("latency_frame",
        [](const PerfModel& pm, double serial, double parallel, int pct, int threads) {
          return latency_frame({serial, parallel}, pm.latency, FreqLevel::percent(pct), threads);
        },
        py::arg("model"), py::arg("serial"), py::arg("parallel"), py::arg("freq_pct"), py::arg("threads"));

  py::enum_<Algo>(m, "Algo").value("Baseline", Algo::Baseline).value("A", Algo::A);

  py::class_<DesignConfig>(m, "DesignConfig")
      .def(py::init([](Algo a, int pct, double fps) { return DesignConfig{a, FreqLevel::percent(pct), {fps, 30.0}}; }),
           py::arg("algo") = Algo::Baseline, py::arg("freq_pct") = 100, py::arg("fps") = 30.0)
      .def_readwrite("algo", &DesignConfig::algo)
      .def_property_readonly("freq_pct", [](const DesignConfig& d) { return d.freq.percent(); })
      .def_property_readonly("fps", [](const DesignConfig& d) { return d.fps.target_fps; })
      .def("label", &DesignConfig::label)
      .def("__repr__", &DesignConfig::label);
  m.def("enumerate_designs", &enumerate_designs);

  py::class_<DesignPoint>(m, "DesignPoint")
      .def(py::init<>())
      .def_readwrite("config", &DesignPoint::config)
      .def_readwrite("design_index", &DesignPoint::design_index)
      .def_readwrite("frames_processed", &DesignPoint::frames_processed)
      .def_readwrite("energy_j", &DesignPoint::energy_j)
      .def_readwrite("latency_s", &DesignPoint::latency_s)
      .def_readwrite("fscore", &DesignPoint::fscore)
      .def_readwrite("accuracy_loss", &DesignPoint::accuracy_loss)
      .def_readwrite("energy_reduction", &DesignPoint::energy_reduction)
      .def_readwrite("latency_reduction", &DesignPoint::latency_reduction)
      .def_property_readonly("stats", [](const DesignPoint& p) { return stats_dict(p.stats); });

  py::class_<Constraints>(m, "Constraints")
      .def(py::init([](double lat, double loss) { return Constraints{lat, loss}; }),
           py::arg("latency_max_s") = std::numeric_limits<double>::infinity(),
           py::arg("accuracy_loss_max") = std::numeric_limits<double>::infinity())
      .def_readwrite("latency_max_s", &Constraints::latency_max_s)
      .def_readwrite("accuracy_loss_max", &Constraints::accuracy_loss_max);
  m.def("use_case", [](const std::string& name) { return use_case(name).constraints; });

  py::class_<DesignEvaluator>(m, "DesignEvaluator")
      .def(py::init([](std::vector<DepthFrame> frames, const py::array_t<double, py::array::c_style | py::array::forcecast>& gt,
                       const PerfModel& perf, double tau) {
             DseOptions opt;
             opt.perf = perf;
             opt.tau = tau;
             return DesignEvaluator(std::move(frames), array_to_cloud(gt), opt);
           }),
           py::arg("frames"), py::arg("gt"), py::arg("perf") = PerfModel{}, py::arg("tau") = kDefaultFScoreTau)
      .def("baseline", &DesignEvaluator::baseline, py::return_value_policy::copy)
      .def("evaluate", &DesignEvaluator::evaluate, py::call_guard<py::gil_scoped_release>())
      .def("evaluate_all",
           [](DesignEvaluator& ev, const std::vector<DesignConfig>& designs) { return ev.evaluate_all(designs); },
           py::call_guard<py::gil_scoped_release>());

  m.def("pareto_front_indices", [](const std::vector<std::pair<double, double>>& pts) {
    std::vector<Objectives> obj;
    obj.reserve(pts.size());
    for (const auto& [e, l] : pts) obj.push_back({e, l});
    return pareto_front_indices(obj);
  });
  m.def("select_optimal", [](const std::vector<DesignPoint>& pts, const Constraints& c) { return select_optimal(pts, c); });
}

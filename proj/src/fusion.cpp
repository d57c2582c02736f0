#include "tsdf_dse/fusion.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "camera_view.hpp"

namespace tsdf {

using detail::CameraView;

void FusionConfig::validate() const {
  if (threads < 1) throw std::invalid_argument("fusion: threads must be >= 1");
  if (!(weight_per_frame > 0.0)) throw std::invalid_argument("fusion: weight_per_frame must be positive");
  if (!(max_weight >= weight_per_frame)) throw std::invalid_argument("fusion: max_weight below weight_per_frame");
}

std::string_view to_string(VoxelStatus status) {
  switch (status) {
    case VoxelStatus::Fused: return "fused";
    case VoxelStatus::BehindCameraPlane: return "behind_camera_plane";
    case VoxelStatus::OutOfTruncBand: return "out_of_trunc_band";
    case VoxelStatus::OutOfImageScope: return "out_of_image_scope";
    case VoxelStatus::InvalidDepth: return "invalid_depth";
  }
  return "unknown";
}

std::uint64_t FusionStats::voxels_classified() const {
  std::uint64_t n = 0;
  for (auto c : status_counts) n += c;
  return n;
}

FusionStats& FusionStats::operator+=(const FusionStats& rhs) {
  for (std::size_t i = 0; i < kVoxelStatusCount; ++i) status_counts[i] += rhs.status_counts[i];
  frames += rhs.frames;
  blocks_visited += rhs.blocks_visited;
  blocks_allocated += rhs.blocks_allocated;
  blocks_pruned_whole += rhs.blocks_pruned_whole;
  voxels_skipped_by_pruning += rhs.voxels_skipped_by_pruning;
  positions_tested += rhs.positions_tested;
  elapsed_s += rhs.elapsed_s;
  return *this;
}

TsdfUpdate tsdf_update(double tsdf_prev, double weight_prev, double w, double d, double max_weight) {
  const double total = weight_prev + w;
  return {(weight_prev * tsdf_prev + w * d) / total, std::min(total, max_weight)};
}

Classification classify_voxel(const Vec3& p_world, const DepthFrame& frame, const GridParams& params) {
  return CameraView(frame, params).classify(p_world);
}

bool EligibilityMask::contains(LocalIndex idx, int block_dim) const {
  const int half = block_dim / 2;
  const int bit = (idx.x >= half ? 1 : 0) | (idx.y >= half ? 2 : 0) | (idx.z >= half ? 4 : 0);
  return (octants >> bit) & 1u;
}

std::uint64_t EligibilityMask::voxel_count(int block_dim) const {
  const auto half = static_cast<std::uint64_t>(block_dim / 2);
  return static_cast<std::uint64_t>(std::popcount(octants)) * half * half * half;
}

namespace {

// Corner k of a block sits at offset (k & 1, k >> 1 & 1, k >> 2 & 1) * dim
// and borders octant k.
Vec3 block_corner(BlockCoord b, int k, const GridParams& gp) {
  const long dim = gp.block_dim;
  return {static_cast<double>(b.x * dim + ((k & 1) ? dim : 0)) * gp.voxel_size,
          static_cast<double>(b.y * dim + ((k & 2) ? dim : 0)) * gp.voxel_size,
          static_cast<double>(b.z * dim + ((k & 4) ? dim : 0)) * gp.voxel_size};
}

Vec3 block_center(BlockCoord b, const GridParams& gp) {
  const long dim = gp.block_dim;
  const long half = dim / 2;
  return {static_cast<double>(b.x * dim + half) * gp.voxel_size, static_cast<double>(b.y * dim + half) * gp.voxel_size,
          static_cast<double>(b.z * dim + half) * gp.voxel_size};
}

EligibilityMask nine_point_mask(BlockCoord b, const CameraView& view, const GridParams& gp, std::uint64_t& tested) {
  ++tested;
  if (view.in_band(block_center(b, gp))) return EligibilityMask::full();
  EligibilityMask m;
  for (int k = 0; k < 8; ++k) {
    ++tested;
    if (view.in_band(block_corner(b, k, gp))) m.octants |= static_cast<std::uint8_t>(1u << k);
  }
  return m;
}

EligibilityMask eight_corner_mask(BlockCoord b, const CameraView& view, const GridParams& gp, std::uint64_t& tested) {
  for (int k = 0; k < 8; ++k) {
    ++tested;
    if (view.in_band(block_corner(b, k, gp))) return EligibilityMask::full();
  }
  return EligibilityMask::none();
}

void fuse_block(VolumeBlock& block, const CameraView& view, const GridParams& gp, const FusionConfig& cfg,
                FusionStats& st) {
  const int dim = gp.block_dim;
  const auto total = static_cast<std::uint64_t>(dim) * dim * dim;
  ++st.blocks_visited;

  EligibilityMask mask = EligibilityMask::full();
  if (cfg.voxel_pruning == VoxelPruning::On) {
    mask = nine_point_mask(block.coord(), view, gp, st.positions_tested);
  } else if (cfg.voxel_pruning == VoxelPruning::FlashFusion8) {
    mask = eight_corner_mask(block.coord(), view, gp, st.positions_tested);
  }
  if (mask.is_empty()) {
    ++st.blocks_pruned_whole;
    st.voxels_skipped_by_pruning += total;
    return;
  }
  st.voxels_skipped_by_pruning += total - mask.voxel_count(dim);

  const BlockCoord b = block.coord();
  const long bx = static_cast<long>(b.x) * dim;
  const long by = static_cast<long>(b.y) * dim;
  const long bz = static_cast<long>(b.z) * dim;
  auto values = block.values();
  auto weights = block.weights();
  const double w = cfg.weight_per_frame;
  const bool running = block.mode() == StorageMode::RunningSum;
  std::array<std::uint64_t, kVoxelStatusCount> counts{};

  for (int z = 0; z < dim; ++z) {
    for (int y = 0; y < dim; ++y) {
      for (int x = 0; x < dim; ++x) {
        if (!mask.is_full() && !mask.contains({x, y, z}, dim)) continue;
        const Classification c = view.classify(lattice_voxel_center(bx + x, by + y, bz + z, gp.voxel_size));
        ++counts[static_cast<std::size_t>(c.status)];
        if (c.status != VoxelStatus::Fused) continue;

        const auto i = static_cast<std::size_t>(x + dim * (y + dim * z));
        if (running) {
          values[i] = static_cast<float>(static_cast<double>(values[i]) + w * c.sdf);
          weights[i] = static_cast<float>(static_cast<double>(weights[i]) + w);
        } else {
          const TsdfUpdate u = tsdf_update(values[i], weights[i], w, c.sdf, cfg.max_weight);
          values[i] = static_cast<float>(u.tsdf);
          weights[i] = static_cast<float>(u.weight);
        }
      }
    }
  }
  for (std::size_t k = 0; k < kVoxelStatusCount; ++k) st.status_counts[k] += counts[k];
}

}  // namespace

EligibilityMask prune_mask(BlockCoord block, const DepthFrame& frame, const GridParams& params,
                           std::uint64_t* positions_tested) {
  std::uint64_t tested = 0;
  const auto m = nine_point_mask(block, CameraView(frame, params), params, tested);
  if (positions_tested != nullptr) *positions_tested += tested;
  return m;
}

EligibilityMask prune_mask_ff8(BlockCoord block, const DepthFrame& frame, const GridParams& params,
                               std::uint64_t* positions_tested) {
  std::uint64_t tested = 0;
  const auto m = eight_corner_mask(block, CameraView(frame, params), params, tested);
  if (positions_tested != nullptr) *positions_tested += tested;
  return m;
}

FusionStats fuse_frame(VoxelGrid& grid, const DepthFrame& frame, const FusionConfig& config) {
  config.validate();
  if (grid.mode() != config.storage_mode()) {
    throw std::invalid_argument("fuse_frame: grid storage mode does not match the op_pruning setting");
  }
  const auto start = std::chrono::steady_clock::now();

  const GridParams& gp = grid.params();
  const VisibleSet visible = visible_blocks(grid, frame);
  std::vector<VolumeBlock*> blocks;
  blocks.reserve(visible.blocks.size());
  for (const auto& c : visible.blocks) blocks.push_back(grid.find(c));

  const CameraView view(frame, gp);
  const auto n = static_cast<std::size_t>(config.threads);
  std::vector<FusionStats> per_worker(n);
  auto worker = [&](std::size_t w) {
    for (std::size_t i = w; i < blocks.size(); i += n) fuse_block(*blocks[i], view, gp, config, per_worker[w]);
  };
  if (n == 1 || blocks.size() <= 1) {
    for (std::size_t w = 0; w < n; ++w) worker(w);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n - 1);
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker, w);
    worker(0);
  }

  FusionStats stats;
  for (const auto& s : per_worker) stats += s;
  stats.frames = 1;
  stats.blocks_allocated = visible.newly_allocated;
  stats.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

FusionStats fuse_sequence(VoxelGrid& grid, std::span<const DepthFrame> frames, const FusionConfig& config) {
  FusionStats total;
  for (const auto& f : frames) total += fuse_frame(grid, f, config);
  return total;
}

}  // namespace tsdf

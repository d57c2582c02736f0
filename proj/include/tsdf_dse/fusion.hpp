#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tsdf_dse/depth_frame.hpp"
#include "tsdf_dse/voxel_grid.hpp"

namespace tsdf {

enum class VoxelPruning : std::uint8_t {
  Off,
  On,            ///< 9 critical positions, octant sub-volumes
  FlashFusion8,  ///< 8-corner all-or-nothing check
};

struct FusionConfig {
  VoxelPruning voxel_pruning = VoxelPruning::Off;
  bool op_pruning = false;
  int threads = 4;
  double weight_per_frame = 1.0;
  double max_weight = 255.0;

  void validate() const;
  StorageMode storage_mode() const { return op_pruning ? StorageMode::RunningSum : StorageMode::Classic; }
};

enum class VoxelStatus : std::uint8_t {
  Fused = 0,
  BehindCameraPlane,
  OutOfTruncBand,
  OutOfImageScope,
  InvalidDepth,
};
inline constexpr std::size_t kVoxelStatusCount = 5;

std::string_view to_string(VoxelStatus status);

struct FusionStats {
  std::array<std::uint64_t, kVoxelStatusCount> status_counts{};
  std::uint64_t frames = 0;
  std::uint64_t blocks_visited = 0;
  std::uint64_t blocks_allocated = 0;
  std::uint64_t blocks_pruned_whole = 0;
  std::uint64_t voxels_skipped_by_pruning = 0;
  std::uint64_t positions_tested = 0;
  double elapsed_s = 0.0;

  std::uint64_t count(VoxelStatus s) const { return status_counts[static_cast<std::size_t>(s)]; }
  std::uint64_t voxels_classified() const;

  FusionStats& operator+=(const FusionStats& rhs);
};

struct TsdfUpdate {
  double tsdf;
  double weight;
};

/// One weighted-average step:
///   T = (W_prev * T_prev + w * d) / (W_prev + w),  W = min(W_prev + w, max_weight)
TsdfUpdate tsdf_update(double tsdf_prev, double weight_prev, double w, double d, double max_weight = 255.0);

struct Classification {
  VoxelStatus status;
  double sdf;  ///< normalized by trunc, only meaningful when Fused
};

/// Eligibility checks, in order: camera plane, image scope, depth validity,
/// truncation band.
Classification classify_voxel(const Vec3& p_world, const DepthFrame& frame, const GridParams& params);

/// Union of octant sub-volumes (block_dim/2 per edge) of a block. Bit
/// (ox | oy << 1 | oz << 2) marks octant (ox, oy, oz).
struct EligibilityMask {
  std::uint8_t octants = 0;

  static EligibilityMask full() { return {0xFF}; }
  static EligibilityMask none() { return {0}; }

  bool is_full() const { return octants == 0xFF; }
  bool is_empty() const { return octants == 0; }
  bool contains(LocalIndex idx, int block_dim) const;
  std::uint64_t voxel_count(int block_dim) const;

  friend bool operator==(EligibilityMask, EligibilityMask) = default;
};

/// 9-position pruning: center in band -> whole block; otherwise each corner
/// in band enables its octant.
EligibilityMask prune_mask(BlockCoord block, const DepthFrame& frame, const GridParams& params,
                           std::uint64_t* positions_tested = nullptr);

/// 8-corner pruning: any corner in band -> whole block, else nothing.
EligibilityMask prune_mask_ff8(BlockCoord block, const DepthFrame& frame, const GridParams& params,
                               std::uint64_t* positions_tested = nullptr);

struct VisibleSet {
  std::vector<BlockCoord> blocks;  ///< sorted, unique
  std::uint64_t newly_allocated = 0;
};

/// Existing blocks whose camera-space AABB meets the view frustum clipped to
/// [d_min - trunc, d_max + trunc].
std::vector<BlockCoord> frustum_blocks(const VoxelGrid& grid, const DepthFrame& frame);

/// Blocks that can hold a voxel inside the truncation band of some valid
/// pixel. Pixels are grouped in block_dim/2 tiles; each tile contributes the
/// blocks meeting the frustum pieces spanned by its pixels' band intervals.
std::vector<BlockCoord> surface_blocks(const GridParams& params, const DepthFrame& frame);

/// surface_blocks are allocated; the union with frustum_blocks is returned.
VisibleSet visible_blocks(VoxelGrid& grid, const DepthFrame& frame);

/// Throws std::invalid_argument when the grid storage mode does not match
/// config.op_pruning.
FusionStats fuse_frame(VoxelGrid& grid, const DepthFrame& frame, const FusionConfig& config);

FusionStats fuse_sequence(VoxelGrid& grid, std::span<const DepthFrame> frames, const FusionConfig& config);

}  // namespace tsdf

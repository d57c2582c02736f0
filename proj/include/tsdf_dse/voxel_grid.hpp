#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tsdf_dse/geometry.hpp"

namespace tsdf {

struct GridParams {
  double voxel_size = 0.01;  ///< meters
  double trunc = 0.10;       ///< truncation band half-width, meters
  int block_dim = 16;        ///< voxels per block edge, 8 or 16

  void validate() const;
  double block_size() const { return voxel_size * block_dim; }
  int voxels_per_block() const { return block_dim * block_dim * block_dim; }

  friend bool operator==(const GridParams&, const GridParams&) = default;
};

/// How a block stores the TSDF numerator.
///   Classic:    value = T (running weighted average), weight = W
///   RunningSum: value = sum(w_i * d_i),               weight = sum(w_i)
enum class StorageMode : std::uint8_t { Classic = 0, RunningSum = 1 };

struct BlockCoord {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const BlockCoord&, const BlockCoord&) = default;
};

struct BlockCoordHash {
  std::size_t operator()(const BlockCoord& c) const noexcept {
    // Teschner et al. spatial hash primes.
    const auto h = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) * 73856093u) ^
                   (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.y)) * 19349669u) ^
                   (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.z)) * 83492791u);
    return static_cast<std::size_t>(h);
  }
};

struct LocalIndex {
  int x = 0;
  int y = 0;
  int z = 0;
};

/// Tsdf value held by never-observed classic voxels.
inline constexpr float kUninitializedTsdf = 1.0f;

/// A dense block_dim^3 cube of voxels, x-fastest:
/// flat = x + dim * (y + dim * z).
class VolumeBlock {
 public:
  VolumeBlock(BlockCoord coord, int block_dim, StorageMode mode);

  BlockCoord coord() const { return coord_; }
  int dim() const { return dim_; }
  StorageMode mode() const { return mode_; }
  std::size_t size() const { return weights_.size(); }

  int flat_index(LocalIndex idx) const { return idx.x + dim_ * (idx.y + dim_ * idx.z); }
  /// Throws std::out_of_range when a component is outside [0, dim).
  int checked_flat_index(LocalIndex idx) const;

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }
  std::span<float> weights() { return weights_; }
  std::span<const float> weights() const { return weights_; }

  /// Final TSDF of a voxel; nullopt when the voxel was never observed.
  std::optional<double> finalize_tsdf(LocalIndex idx) const;
  std::optional<double> finalize_tsdf(int flat) const;

 private:
  BlockCoord coord_;
  int dim_;
  StorageMode mode_;
  std::vector<float> values_;
  std::vector<float> weights_;
};

class VoxelGrid {
 public:
  VoxelGrid(GridParams params, StorageMode mode);

  const GridParams& params() const { return params_; }
  StorageMode mode() const { return mode_; }
  std::size_t block_count() const { return blocks_.size(); }

  /// Existing block, or a fresh zero-weight one. `created` reports which.
  VolumeBlock& get_or_allocate(BlockCoord coord, bool* created = nullptr);
  VolumeBlock* find(BlockCoord coord);
  const VolumeBlock* find(BlockCoord coord) const;

  /// Coordinates in lexicographic (x, y, z) order.
  std::vector<BlockCoord> sorted_coords() const;

  template <typename Fn>
  void for_each_block(Fn&& fn) const {
    for (const auto& [coord, block] : blocks_) fn(block);
  }

  /// Number of voxels with weight > 0.
  std::size_t observed_voxel_count() const;

 private:
  GridParams params_;
  StorageMode mode_;
  std::unordered_map<BlockCoord, VolumeBlock, BlockCoordHash> blocks_;
};

/// floor(p / block_size) componentwise.
BlockCoord block_coord_of(const Vec3& p_world, const GridParams& params);

/// Center of a voxel in world meters. Throws std::out_of_range for a bad
/// local index.
Vec3 voxel_center(BlockCoord block, LocalIndex local, const GridParams& params);

/// Center of the voxel with global lattice index (block * dim + local).
inline Vec3 lattice_voxel_center(long gx, long gy, long gz, double voxel_size) {
  return {(static_cast<double>(gx) + 0.5) * voxel_size, (static_cast<double>(gy) + 0.5) * voxel_size,
          (static_cast<double>(gz) + 0.5) * voxel_size};
}

// Grid snapshot (little-endian):
//   char[4]  magic "VXG1"
//   f64      voxel_size
//   f64      trunc
//   u32      block_dim
//   u32      storage mode (0 classic, 1 running sum)
//   u64      block count
//   per block, in lexicographic coord order:
//     i32 x, i32 y, i32 z
//     f32[dim^3] values
//     f32[dim^3] weights
void write_snapshot(const VoxelGrid& grid, std::ostream& out);
std::vector<std::uint8_t> snapshot_bytes(const VoxelGrid& grid);
VoxelGrid read_snapshot(std::istream& in);

}  // namespace tsdf

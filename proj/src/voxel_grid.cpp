#include "tsdf_dse/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <stdexcept>

#include "byte_io.hpp"

namespace tsdf {

void GridParams::validate() const {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("grid: voxel_size must be positive");
  if (!(trunc >= voxel_size)) throw std::invalid_argument("grid: trunc must be at least voxel_size");
  if (block_dim != 8 && block_dim != 16) throw std::invalid_argument("grid: block_dim must be 8 or 16");
}

VolumeBlock::VolumeBlock(BlockCoord coord, int block_dim, StorageMode mode)
    : coord_(coord), dim_(block_dim), mode_(mode) {
  const auto n = static_cast<std::size_t>(block_dim) * block_dim * block_dim;
  values_.assign(n, mode == StorageMode::Classic ? kUninitializedTsdf : 0.0f);
  weights_.assign(n, 0.0f);
}

int VolumeBlock::checked_flat_index(LocalIndex idx) const {
  if (idx.x < 0 || idx.x >= dim_ || idx.y < 0 || idx.y >= dim_ || idx.z < 0 || idx.z >= dim_) {
    throw std::out_of_range("local voxel index outside the block");
  }
  return flat_index(idx);
}

std::optional<double> VolumeBlock::finalize_tsdf(LocalIndex idx) const {
  return finalize_tsdf(checked_flat_index(idx));
}

std::optional<double> VolumeBlock::finalize_tsdf(int flat) const {
  const auto i = static_cast<std::size_t>(flat);
  const double w = weights_[i];
  if (w <= 0.0) return std::nullopt;
  if (mode_ == StorageMode::Classic) return static_cast<double>(values_[i]);
  return static_cast<double>(values_[i]) / w;
}

VoxelGrid::VoxelGrid(GridParams params, StorageMode mode) : params_(params), mode_(mode) { params_.validate(); }

VolumeBlock& VoxelGrid::get_or_allocate(BlockCoord coord, bool* created) {
  auto [it, inserted] = blocks_.try_emplace(coord, coord, params_.block_dim, mode_);
  if (created != nullptr) *created = inserted;
  return it->second;
}

VolumeBlock* VoxelGrid::find(BlockCoord coord) {
  auto it = blocks_.find(coord);
  return it == blocks_.end() ? nullptr : &it->second;
}

const VolumeBlock* VoxelGrid::find(BlockCoord coord) const {
  auto it = blocks_.find(coord);
  return it == blocks_.end() ? nullptr : &it->second;
}

std::vector<BlockCoord> VoxelGrid::sorted_coords() const {
  std::vector<BlockCoord> out;
  out.reserve(blocks_.size());
  for (const auto& [coord, block] : blocks_) out.push_back(coord);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t VoxelGrid::observed_voxel_count() const {
  std::size_t n = 0;
  for (const auto& [coord, block] : blocks_) {
    const auto w = block.weights();
    n += static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](float x) { return x > 0.0f; }));
  }
  return n;
}

BlockCoord block_coord_of(const Vec3& p_world, const GridParams& params) {
  const double bs = params.block_size();
  return {static_cast<int>(std::floor(p_world.x() / bs)), static_cast<int>(std::floor(p_world.y() / bs)),
          static_cast<int>(std::floor(p_world.z() / bs))};
}

Vec3 voxel_center(BlockCoord block, LocalIndex local, const GridParams& params) {
  const int dim = params.block_dim;
  if (local.x < 0 || local.x >= dim || local.y < 0 || local.y >= dim || local.z < 0 || local.z >= dim) {
    throw std::out_of_range("voxel_center: local index outside the block");
  }
  return lattice_voxel_center(static_cast<long>(block.x) * dim + local.x, static_cast<long>(block.y) * dim + local.y,
                              static_cast<long>(block.z) * dim + local.z, params.voxel_size);
}

// ---------------------------------------------------------------------------
// Snapshot

namespace {
constexpr char kSnapshotMagic[4] = {'V', 'X', 'G', '1'};
}

std::vector<std::uint8_t> snapshot_bytes(const VoxelGrid& grid) {
  detail::ByteWriter w;
  const auto& p = grid.params();
  w.bytes(kSnapshotMagic, 4);
  w.f64(p.voxel_size);
  w.f64(p.trunc);
  w.u32(static_cast<std::uint32_t>(p.block_dim));
  w.u32(static_cast<std::uint32_t>(grid.mode()));
  const auto coords = grid.sorted_coords();
  w.u64(coords.size());
  for (const auto& c : coords) {
    const VolumeBlock& b = *grid.find(c);
    w.i32(c.x);
    w.i32(c.y);
    w.i32(c.z);
    for (float v : b.values()) w.f32(v);
    for (float v : b.weights()) w.f32(v);
  }
  return std::move(w.buffer());
}

void write_snapshot(const VoxelGrid& grid, std::ostream& out) {
  const auto bytes = snapshot_bytes(grid);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

VoxelGrid read_snapshot(std::istream& in) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::ByteReader r(bytes, "grid snapshot");
  char magic[4];
  r.bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kSnapshotMagic)) throw FormatError("grid snapshot: bad magic");
  GridParams params;
  params.voxel_size = r.f64();
  params.trunc = r.f64();
  params.block_dim = static_cast<int>(r.u32());
  const auto mode_raw = r.u32();
  if (mode_raw > 1) throw FormatError("grid snapshot: unknown storage mode");
  VoxelGrid grid(params, static_cast<StorageMode>(mode_raw));
  const auto count = r.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    BlockCoord c;
    c.x = r.i32();
    c.y = r.i32();
    c.z = r.i32();
    VolumeBlock& b = grid.get_or_allocate(c);
    for (float& v : b.values()) v = r.f32();
    for (float& v : b.weights()) v = r.f32();
  }
  if (r.remaining() != 0) throw FormatError("grid snapshot: trailing bytes");
  return grid;
}

}  // namespace tsdf

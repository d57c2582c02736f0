#include "tsdf_dse/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace tsdf {

namespace {


// Voxel at global lattice index (gx, gy, gz), resolving across block borders.
std::optional<double> observed_value(const VoxelGrid& grid, long gx, long gy, long gz) {
  const long dim = grid.params().block_dim;
  const auto fdiv = [dim](long g) { return g >= 0 ? g / dim : -((-g + dim - 1) / dim); };
  const BlockCoord b{static_cast<std::int32_t>(fdiv(gx)), static_cast<std::int32_t>(fdiv(gy)),
                     static_cast<std::int32_t>(fdiv(gz))};
  const VolumeBlock* block = grid.find(b);
  if (block == nullptr) return std::nullopt;
  const int lx = static_cast<int>(gx - b.x * dim);
  const int ly = static_cast<int>(gy - b.y * dim);
  const int lz = static_cast<int>(gz - b.z * dim);
  return block->finalize_tsdf(block->flat_index({lx, ly, lz}));
}

std::vector<Vec3> dedup_sorted(const std::vector<Vec3>& pts, double radius) {
  struct Cell {
    std::int64_t x, y, z;
    bool operator==(const Cell&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const Cell& c) const noexcept {
      return static_cast<std::size_t>((static_cast<std::uint64_t>(c.x) * 73856093u) ^
                                      (static_cast<std::uint64_t>(c.y) * 19349669u) ^
                                      (static_cast<std::uint64_t>(c.z) * 83492791u));
    }
  };
  const double cell = radius * (1.0 + 1e-6);
  const double r2 = radius * radius;
  const auto key = [cell](const Vec3& p) {
    return Cell{static_cast<std::int64_t>(std::floor(p.x() / cell)), static_cast<std::int64_t>(std::floor(p.y() / cell)),
                static_cast<std::int64_t>(std::floor(p.z() / cell))};
  };
  std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> grid;
  std::vector<Vec3> kept;
  for (const auto& p : pts) {
    const Cell k = key(p);
    bool near = false;
    for (std::int64_t dz = -1; dz <= 1 && !near; ++dz) {
      for (std::int64_t dy = -1; dy <= 1 && !near; ++dy) {
        for (std::int64_t dx = -1; dx <= 1 && !near; ++dx) {
          const auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == grid.end()) continue;
          for (auto idx : it->second) {
            if ((kept[idx] - p).squaredNorm() <= r2) {
              near = true;
              break;
            }
          }
        }
      }
    }
    if (near) continue;
    grid[k].push_back(static_cast<std::uint32_t>(kept.size()));
    kept.push_back(p);
  }
  return kept;
}

}  // namespace

PointCloud extract_surface(const VoxelGrid& grid) {
  if (grid.observed_voxel_count() == 0) throw std::invalid_argument("extract_surface: no voxel has been observed");
  const GridParams& gp = grid.params();
  const int dim = gp.block_dim;
  const double vs = gp.voxel_size;
  std::vector<Vec3> pts;

  for (const auto& coord : grid.sorted_coords()) {
    const VolumeBlock& block = *grid.find(coord);
    for (int z = 0; z < dim; ++z) {
      for (int y = 0; y < dim; ++y) {
        for (int x = 0; x < dim; ++x) {
          const auto t1 = block.finalize_tsdf(block.flat_index({x, y, z}));
          if (!t1) continue;
          const long gx = static_cast<long>(coord.x) * dim + x;
          const long gy = static_cast<long>(coord.y) * dim + y;
          const long gz = static_cast<long>(coord.z) * dim + z;
          const Vec3 p1 = lattice_voxel_center(gx, gy, gz, vs);
          const long step[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
          for (const auto& s : step) {
            const long nx = gx + s[0], ny = gy + s[1], nz = gz + s[2];
            std::optional<double> t2;
            const int lx = x + static_cast<int>(s[0]), ly = y + static_cast<int>(s[1]), lz = z + static_cast<int>(s[2]);
            if (lx < dim && ly < dim && lz < dim) {
              t2 = block.finalize_tsdf(block.flat_index({lx, ly, lz}));
            } else {
              t2 = observed_value(grid, nx, ny, nz);
            }
            if (!t2) continue;
            const double a = *t1;
            const double b = *t2;
            if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
              const Vec3 p2 = lattice_voxel_center(nx, ny, nz, vs);
              pts.push_back(p1 + (a / (a - b)) * (p2 - p1));
            } else if (a == 0.0 && b != 0.0) {
              pts.push_back(p1);
            } else if (b == 0.0 && a != 0.0) {
              pts.push_back(lattice_voxel_center(nx, ny, nz, vs));
            }
          }
        }
      }
    }
  }

  std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  });
  return PointCloud{dedup_sorted(pts, vs / 4.0)};
}

std::size_t PointIndex::KeyHash::operator()(const Key& k) const noexcept {
  return static_cast<std::size_t>((static_cast<std::uint64_t>(k.x) * 73856093u) ^
                                  (static_cast<std::uint64_t>(k.y) * 19349669u) ^
                                  (static_cast<std::uint64_t>(k.z) * 83492791u));
}

PointIndex::Key PointIndex::key_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_)), static_cast<std::int64_t>(std::floor(p.y() / cell_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

PointIndex::PointIndex(const PointCloud& cloud, double tau)
    : cloud_(&cloud), tau_(tau), tau_sq_(tau * tau), cell_(tau * (1.0 + 1e-6)) {
  if (!(tau > 0.0)) throw std::invalid_argument("PointIndex: tau must be positive");
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    cells_[key_of(cloud.points[i])].push_back(static_cast<std::uint32_t>(i));
  }
}

bool PointIndex::any_within(const Vec3& p) const {
  const Key k = key_of(p);
  for (std::int64_t dz = -1; dz <= 1; ++dz) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const auto it = cells_.find({k.x + dx, k.y + dy, k.z + dz});
        if (it == cells_.end()) continue;
        for (auto idx : it->second) {
          const Vec3& q = cloud_->points[idx];
          const double ex = q.x() - p.x();
          const double ey = q.y() - p.y();
          const double ez = q.z() - p.z();
          if (ex * ex + ey * ey + ez * ez <= tau_sq_) return true;
        }
      }
    }
  }
  return false;
}

FScoreReport fscore(const PointCloud& recon, const PointCloud& gt, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("fscore: tau must be positive");
  if (gt.empty()) throw std::invalid_argument("fscore: ground truth is empty");
  FScoreReport r;
  r.tau = tau;
  if (recon.empty()) return r;

  const PointIndex gt_index(gt, tau);
  std::size_t hits = 0;
  for (const auto& p : recon.points) hits += gt_index.any_within(p) ? 1 : 0;
  r.precision = static_cast<double>(hits) / static_cast<double>(recon.size());

  const PointIndex recon_index(recon, tau);
  hits = 0;
  for (const auto& p : gt.points) hits += recon_index.any_within(p) ? 1 : 0;
  r.recall = static_cast<double>(hits) / static_cast<double>(gt.size());

  const double s = r.precision + r.recall;
  r.fscore = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

double accuracy_loss(double design_fscore, double baseline_fscore) { return baseline_fscore - design_fscore; }

}  // namespace tsdf

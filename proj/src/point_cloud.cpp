#include "tsdf_dse/point_cloud.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "tsdf_dse/error.hpp"

namespace tsdf {

void write_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  char line[128];
  for (const auto& p : cloud.points) {
    const int n = std::snprintf(line, sizeof line, "%.6f %.6f %.6f\n", p.x(), p.y(), p.z());
    out.write(line, n);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

PointCloud read_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    double x = 0, y = 0, z = 0;
    if (!(ss >> x >> y >> z)) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected three numbers");
    }
    cloud.points.emplace_back(x, y, z);
  }
  return cloud;
}

}  // namespace tsdf

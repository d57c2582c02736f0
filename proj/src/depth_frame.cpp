#include "tsdf_dse/depth_frame.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tsdf {

std::size_t DepthFrame::valid_count() const {
  return static_cast<std::size_t>(std::count_if(depth.begin(), depth.end(), [](std::uint16_t d) { return d != 0; }));
}

void DepthFrame::validate() const {
  intr.validate();
  const auto expected = static_cast<std::size_t>(intr.width) * static_cast<std::size_t>(intr.height);
  if (depth.size() != expected) {
    throw std::invalid_argument("frame " + std::to_string(index) + ": depth has " + std::to_string(depth.size()) +
                                " samples, expected " + std::to_string(expected));
  }
}

}  // namespace tsdf

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsdf_dse/dse.hpp"

namespace tsdf {

struct UseCasePreset {
  std::string name;
  Constraints constraints;
};

/// scan_share (33 ms, 0), spatial_audio (unbounded, 0.03), intermediate (33 ms, 0.01).
const std::vector<UseCasePreset>& use_case_presets();
/// Throws std::invalid_argument for an unknown name.
const UseCasePreset& use_case(std::string_view name);

}  // namespace tsdf

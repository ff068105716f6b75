// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "procscene/geom.hpp"

namespace procscene {

/// Parallel arrays of positions, colors and (optionally) heights above floor.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Rgb> colors;
  std::optional<std::vector<double>> heights;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_heights() const { return heights.has_value(); }

  void reserve(std::size_t n) {
    positions.reserve(n);
    colors.reserve(n);
  }

  /// Copies point `i` of `src` (all parallel features) to the back.
  void push_from(const PointCloud& src, std::size_t i) {
    positions.push_back(src.positions[i]);
    colors.push_back(src.colors[i]);
    if (src.heights) {
      if (!heights) heights.emplace();
      heights->push_back((*src.heights)[i]);
    }
  }

  /// Throws Error(kInvariant) if the parallel arrays disagree in length or a
  /// value is non-finite / out of range.
  void validate() const;
};

}  // namespace procscene

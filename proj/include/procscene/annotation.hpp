// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "procscene/geom.hpp"
#include "procscene/procgen.hpp"

namespace procscene {

/// Ground-truth (or pseudo) box as stored in a scene annotation file.
struct ObjectAnnotation {
  int instance_id = 0;
  std::string category;
  Box3 box;
  bool swapped = false;
  bool pseudo = false;
  friend bool operator==(const ObjectAnnotation&, const ObjectAnnotation&) = default;
};

struct SceneAnnotation {
  std::string scene_id;
  std::uint64_t seed = 0;
  RoomSpec room;
  std::vector<ObjectAnnotation> objects;
  bool emptied = false;  // set by category filtering when nothing remains
};

SceneAnnotation annotate(const SceneLayout& scene);

}  // namespace procscene

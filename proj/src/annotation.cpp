// SPDX-License-Identifier: Apache-2.0
#include "procscene/annotation.hpp"

namespace procscene {

SceneAnnotation annotate(const SceneLayout& scene) {
  SceneAnnotation ann;
  ann.scene_id = scene.scene_id;
  ann.seed = scene.seed;
  ann.room = scene.room;
  ann.objects.reserve(scene.objects.size());
  for (const auto& o : scene.objects) {
    ann.objects.push_back({o.instance_id, o.category, o.box, false, false});
  }
  return ann;
}

}  // namespace procscene

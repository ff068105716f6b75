// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "procscene/geom.hpp"
#include "procscene/rng.hpp"

namespace procscene {

enum class PlacementClass { kFloor, kWallMounted, kSurface };

/// Composite-of-boxes templates standing in for a real asset bank.
enum class AssetTemplate {
  kChair,
  kTable,
  kDesk,
  kBed,
  kSofa,
  kBookshelf,
  kCabinet,
  kNightstand,
  kWallCabinet,
  kWallShelf,
  kLamp,
  kBox,
};

const char* to_string(PlacementClass placement);
const char* to_string(AssetTemplate asset);
PlacementClass placement_from_string(const std::string& name);
AssetTemplate asset_from_string(const std::string& name);

/// Known asset styles. Each style has its own palette and part layout.
inline constexpr const char* kStyleAlpha = "alpha";
inline constexpr const char* kStyleBeta = "beta";

struct CategorySpec {
  std::string name;
  PlacementClass placement = PlacementClass::kFloor;
  AssetTemplate asset = AssetTemplate::kBox;
  Vec3 size_min{0.5, 0.5, 0.5};  // (length, width, height), m
  Vec3 size_max{0.5, 0.5, 0.5};
  double wall_align_prob = 0.0;
  int count_min = 0;
  int count_max = 0;
  std::string style = kStyleAlpha;
  bool supports_surface = false;  // may carry surface-class objects

  void validate() const;
};

/// Single-room layout: rectilinear CCW footprint, walls outside it.
struct RoomSpec {
  std::vector<Vec2> footprint;
  double wall_height = 2.8;
  double wall_thickness = 0.1;

  double area() const { return polygon_area(footprint); }
};

struct PlacedObject {
  std::string category;
  Box3 box;
  TriMesh mesh;  // world coordinates
  int instance_id = 0;
  PlacementClass placement = PlacementClass::kFloor;
  int support_id = -1;  // instance id of the supporting object (surface class)
};

struct SceneLayout {
  std::string scene_id;
  std::uint64_t seed = 0;
  RoomSpec room;
  std::vector<PlacedObject> objects;
  TriMesh structure_mesh;

  /// Structure plus every object mesh, in that order.
  TriMesh combined_mesh() const;
};

struct IntRange {
  int min = 0;
  int max = 0;
};

struct GenConfig {
  std::string name = "procroom";
  std::vector<CategorySpec> categories;
  double room_area_min = 20.0;
  double room_area_max = 45.0;
  double aspect_min = 1.0;
  double aspect_max = 1.6;
  double l_shape_prob = 0.3;
  double wall_height_min = 2.6;
  double wall_height_max = 3.0;
  double wall_thickness = 0.1;
  // Per-stage totals; per-category draws are clamped to these.
  IntRange large_object_count{0, 64};
  IntRange wall_object_count{0, 16};
  IntRange surface_object_count{0, 32};
  double wall_mount_min = 1.0;  // bottom height of wall-mounted items, m
  double wall_mount_max = 1.5;
  double placement_clearance = 0.05;
  int max_placement_attempts = 100;
  double train_fraction = 0.8;

  void validate() const;
  const CategorySpec* find(const std::string& name) const;
  std::vector<std::string> category_names() const;
};

/// Built-in 12-category furniture configuration.
GenConfig default_gen_config();

/// Rectangle (probability 1 - l_shape_prob) or L-shape with area in the
/// configured range.
RoomSpec generate_floorplan(const GenConfig& cfg, Rng& rng);

/// Floor slab plus an inner and outer face per footprint edge.
TriMesh build_structure(const RoomSpec& room);

/// Ear-clipping triangulation of a simple CCW polygon.
std::vector<std::array<std::uint32_t, 3>> triangulate_polygon(
    std::span<const Vec2> poly);

/// Builds a composite-box mesh whose AABB is exactly [-dims/2, dims/2].
/// Throws Error(kInvalidArgument) on an unknown style or non-positive dims.
TriMesh synth_asset(const CategorySpec& category, const Vec3& dims,
                    const std::string& style, Rng& rng);

/// True when the footprint of `box` lies inside the room polygon.
bool footprint_inside_room(const Box3& box, const RoomSpec& room);

std::vector<PlacedObject> place_large_objects(const RoomSpec& room,
                                              const GenConfig& cfg, Rng& rng);

std::vector<PlacedObject> place_wall_objects(
    const RoomSpec& room, const std::vector<PlacedObject>& placed,
    const GenConfig& cfg, Rng& rng);

std::vector<PlacedObject> place_surface_objects(
    const std::vector<PlacedObject>& placed, const GenConfig& cfg, Rng& rng);

SceneLayout generate_scene(std::uint64_t seed, const GenConfig& cfg);

struct DatasetManifest {
  std::string name;
  std::string root;
  std::vector<std::string> train_ids;
  std::vector<std::string> eval_ids;
  std::vector<std::string> categories;
  std::string config_hash;
  std::uint64_t seed = 0;

  std::vector<std::string> all_ids() const;
};

struct GeneratedDataset {
  DatasetManifest manifest;
  std::vector<SceneLayout> scenes;  // indexed like the scene ids
};

std::string scene_id_for(std::size_t index);
std::uint64_t scene_seed_for(std::uint64_t dataset_seed, std::size_t index);

/// Deterministic in (n_scenes, cfg, seed) regardless of `threads`.
GeneratedDataset generate_dataset(std::size_t n_scenes, const GenConfig& cfg,
                                  std::uint64_t seed, unsigned threads = 1);

/// Shuffled split of `ids` into (train, eval) at `train_fraction`.
void split_ids(const std::vector<std::string>& ids, double train_fraction,
               std::uint64_t seed, std::vector<std::string>& train,
               std::vector<std::string>& eval);

/// Checks every SceneLayout invariant; returns an empty string when all hold,
/// otherwise a description of the first violation.
std::string check_scene_invariants(const SceneLayout& scene, double tol = 1e-4);

}  // namespace procscene

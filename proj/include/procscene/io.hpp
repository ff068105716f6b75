// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "procscene/adapt.hpp"
#include "procscene/annotation.hpp"
#include "procscene/eval.hpp"
#include "procscene/instance_swap.hpp"
#include "procscene/naive_detector.hpp"
#include "procscene/point_cloud.hpp"
#include "procscene/procgen.hpp"
#include "procscene/vss.hpp"

namespace procscene::io {

namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

// --- whole-file helpers ------------------------------------------------------
std::string read_text(const fs::path& path);
std::vector<std::uint8_t> read_bytes(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes);

// --- generation config -------------------------------------------------------
std::string gen_config_to_json(const GenConfig& cfg);
GenConfig gen_config_from_json(const std::string& text);
GenConfig load_gen_config(const fs::path& path);
/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const GenConfig& cfg);

// --- scene annotations -------------------------------------------------------
std::string annotation_to_json(const SceneAnnotation& scene);
SceneAnnotation annotation_from_json(const std::string& text);
void write_scene_annotation(const fs::path& path, const SceneAnnotation& scene);
SceneAnnotation read_scene_annotation(const fs::path& path);

// --- manifest ----------------------------------------------------------------
std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);

// --- point clouds ------------------------------------------------------------
/// "IPC1", u32 count, u8 flags (bit0: heights), then per point f32 x y z r g b
/// [height]; little-endian.
std::vector<std::uint8_t> encode_pointcloud(const PointCloud& cloud);
PointCloud decode_pointcloud(const std::vector<std::uint8_t>& bytes);
void write_pointcloud(const fs::path& path, const PointCloud& cloud);
PointCloud read_pointcloud(const fs::path& path);
/// ASCII PLY with x y z, uchar colors and an optional height property.
std::string pointcloud_to_ply(const PointCloud& cloud);

// --- meshes ------------------------------------------------------------------
/// Named mesh groups; one `o` block each, vertex colors as `v x y z r g b`.
using MeshGroups = std::vector<std::pair<std::string, TriMesh>>;
std::string meshes_to_obj(const MeshGroups& groups);
MeshGroups meshes_from_obj(const std::string& text);
/// Structure as group "structure", objects as "object_<id>_<category>".
MeshGroups scene_mesh_groups(const SceneLayout& scene);
void export_scene_mesh(const fs::path& path, const SceneLayout& scene);

// --- predictions -------------------------------------------------------------
using PredictionSet = std::map<std::string, std::vector<Proposal>>;
/// Features are written only when `with_features` is set.
std::string predictions_to_json(const PredictionSet& preds,
                                const std::string& dataset,
                                bool with_features);
PredictionSet predictions_from_json(const std::string& text,
                                    std::string* dataset = nullptr);

// --- models and caches -------------------------------------------------------
std::string model_to_json(const NaiveModel& model);
NaiveModel model_from_json(const std::string& text);

/// u32 feature_dim, u32 count, then per record f64[feature_dim], u32 name
/// length, name bytes; little-endian.
std::vector<std::uint8_t> encode_feature_cache(const FeatureCache& cache);
FeatureCache decode_feature_cache(const std::vector<std::uint8_t>& bytes);

// --- config fragments --------------------------------------------------------
EvalConfig eval_config_from_json(const std::string& text);
AdaptConfig adapt_config_from_json(const std::string& text);
VssConfig vss_config_from_json(const std::string& text);

// --- instance library --------------------------------------------------------
/// Directory with catalog.json ({"entries":[{name, category, file, dims}]})
/// and one OBJ per entry.
void write_library(const fs::path& dir, const InstanceLibrary& lib);
InstanceLibrary read_library(const fs::path& dir);

/// Category list from a JSON array, {"categories": [...]}, or one name per line.
std::vector<std::string> parse_category_list(const std::string& text);

}  // namespace procscene::io

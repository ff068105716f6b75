// SPDX-License-Identifier: Apache-2.0
#pragma once

// Directory-level operations behind the command-line tool. A dataset
// directory holds manifest.json, config.json, annotations/<id>.json,
// meshes/<id>.obj and, once sampled, clouds/<id>.ipc.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "procscene/adapt.hpp"
#include "procscene/eval.hpp"
#include "procscene/io.hpp"
#include "procscene/naive_detector.hpp"
#include "procscene/procgen.hpp"
#include "procscene/vss.hpp"

namespace procscene::pipeline {

namespace fs = std::filesystem;

// Seed streams for derive_seed(base, stream, scene_index).
inline constexpr std::uint64_t kStreamCloud = 3;
inline constexpr std::uint64_t kStreamVss = 4;
inline constexpr std::uint64_t kStreamSwap = 5;
inline constexpr std::uint64_t kStreamFewShot = 6;

struct Dataset {
  fs::path dir;
  DatasetManifest manifest;

  static Dataset open(const fs::path& dir);
  fs::path annotation_path(const std::string& id) const;
  fs::path mesh_path(const std::string& id) const;
  fs::path cloud_path(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;  // position in all_ids()
  /// "train", "eval" or "all".
  std::vector<std::string> split(const std::string& name) const;
  std::vector<SceneAnnotation> annotations(const std::vector<std::string>& ids) const;
  SceneLayout layout(const std::string& id) const;
};

void generate(const GenConfig& cfg, std::size_t scenes, std::uint64_t seed,
              const fs::path& out, unsigned threads);

void make_library(const GenConfig& cfg, const std::string& style,
                  std::size_t per_category, std::uint64_t seed,
                  const fs::path& out);

/// Copies manifest, config and annotations verbatim and writes swapped meshes
/// plus swap_report.json.
void swap_dataset(const fs::path& in, const fs::path& library, double tolerance,
                  std::uint64_t seed, const fs::path& out, unsigned threads);

struct CloudOptions {
  std::size_t points = 40000;
  double density = 500.0;
  std::uint64_t seed = 0;
  bool vss = false;
  VssConfig vss_cfg;
  fs::path out;      // empty: write into <in>/clouds
  bool ply = false;  // also write clouds/<id>.ply
};
void pointcloud(const fs::path& in, const CloudOptions& opts, unsigned threads);

/// "json" or "table".
std::string stats(const fs::path& in, const std::string& format);

NaiveModel fit(const fs::path& in, const NaiveModel& base = {});

/// Naive detection followed by post-processing, per scene.
io::PredictionSet detect(const Dataset& ds, const std::vector<std::string>& ids,
                         const NaiveModel& model, const EvalConfig& eval_cfg,
                         unsigned threads);

struct EvalOutcome {
  EvalReport report;
  std::vector<std::string> scene_ids;
};
/// Scores predictions on a ground-truth split. Predictions for scenes outside
/// the split are ignored; scenes without predictions count as empty.
EvalOutcome evaluate(const io::PredictionSet& preds, const Dataset& gt,
                     const std::string& split,
                     const std::vector<std::string>& categories,
                     const EvalConfig& cfg);
std::string format_report(const EvalReport& report, const std::string& format);

std::vector<std::string> fewshot(const fs::path& in, std::size_t k,
                                 std::uint64_t seed);

/// Post-processed proposals of `ids` become cache records.
FeatureCache build_cache(const Dataset& ds, const std::vector<std::string>& ids,
                         const NaiveModel& model, const EvalConfig& eval_cfg,
                         unsigned threads);

/// Writes a dataset directory whose annotations hold pseudo labels. The
/// clouds come from the dataset recorded in the predictions file.
void pseudolabel(const fs::path& predictions, const FeatureCache* cache,
                 const EvalConfig& eval_cfg, const AdaptConfig& adapt_cfg,
                 const fs::path& out, unsigned threads);

enum class Method { kSourceOnly, kSizePrior, kFewShot, kVss, kMeanTeacher, kReliableVoting };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct Recipe {
  fs::path source;
  fs::path target;
  std::vector<std::string> categories;  // empty: intersection of both sets
  EvalConfig eval;
  AdaptConfig adapt;
  NaiveModel detector;  // thresholds; mean sizes are fitted
  Method method = Method::kSourceOnly;
  std::uint64_t seed = 0;
  int rounds = 3;  // teacher/student rounds for the adaptive methods
};
/// Relative dataset paths resolve against the recipe's directory.
Recipe load_recipe(const fs::path& path);

struct BenchmarkResult {
  EvalReport report;
  NaiveModel model;
};
BenchmarkResult benchmark(const Recipe& recipe, unsigned threads);

}  // namespace procscene::pipeline

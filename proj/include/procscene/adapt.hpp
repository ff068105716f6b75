// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "procscene/annotation.hpp"
#include "procscene/eval.hpp"
#include "procscene/point_cloud.hpp"

namespace procscene {

struct Proposal {
  Detection detection;
  std::vector<double> feature;
};

/// Source-domain proposal features with their predicted categories.
/// Immutable once built; safe to share across threads.
struct FeatureCache {
  std::size_t feature_dim = 0;
  std::vector<std::vector<double>> features;
  std::vector<std::string> categories;

  std::size_t size() const { return features.size(); }
  bool empty() const { return features.empty(); }
  /// Throws Error(kInvalidArgument) on a dimension mismatch or non-finite value.
  void add(std::vector<double> feature, std::string category);
};

using ParamVector = std::vector<double>;
using SizePriors = std::map<std::string, Vec3>;

struct AdaptConfig {
  double ema_alpha = 0.99;
  std::size_t top_k = 5;
  double agreement = 0.6;
  double confidence = 0.9;
  std::size_t few_shot_k = 10;

  void validate() const;
};

/// Per-category arithmetic mean of box sizes.
SizePriors compute_mean_sizes(const std::vector<SceneAnnotation>& scenes);

/// Replaces each detection's size with its category prior; detections of
/// categories without a prior pass through unchanged.
std::vector<Detection> apply_size_prior(std::span<const Detection> dets,
                                        const SizePriors& priors);

/// k ids drawn uniformly without replacement, in draw order.
/// Throws Error(kInvalidArgument) when k exceeds the split size.
std::vector<std::string> select_few_shot(const std::vector<std::string>& split,
                                         std::size_t k, std::uint64_t seed);

/// alpha * teacher + (1 - alpha) * student, elementwise.
ParamVector ema_update(const ParamVector& teacher, const ParamVector& student,
                       double alpha);

/// Flattens priors in category order into a parameter vector and back.
ParamVector priors_to_params(const SizePriors& priors);
SizePriors params_to_priors(const ParamVector& params, const SizePriors& layout);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Indices of the k cache entries most similar to `feature` (cosine), ties by
/// cache index ascending. k is capped at the cache size.
std::vector<std::size_t> top_k_similar(std::span<const double> feature,
                                       const FeatureCache& cache,
                                       std::size_t k);

struct VoteResult {
  bool accepted = false;
  double agreement = 0.0;
  std::vector<std::size_t> neighbors;
  std::string diagnostic;  // set when the vote could not be evaluated
};

VoteResult reliable_vote(const Proposal& proposal, const FeatureCache& cache,
                         std::size_t k, double theta);

/// Post-processing, confidence filter, then (when `cache` is non-null)
/// reliable voting. Survivors are returned as pseudo annotations.
std::vector<ObjectAnnotation> pseudo_label_scene(
    std::span<const Proposal> proposals, const PointCloud& cloud,
    const FeatureCache* cache, const EvalConfig& eval_cfg,
    const AdaptConfig& adapt_cfg);

}  // namespace procscene

// SPDX-License-Identifier: Apache-2.0
#include "procscene/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "procscene/error.hpp"
#include "procscene/rng.hpp"

namespace procscene {

void FeatureCache::add(std::vector<double> feature, std::string category) {
  if (features.empty() && feature_dim == 0) feature_dim = feature.size();
  if (feature.size() != feature_dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature length " + std::to_string(feature.size()) +
                    " does not match cache dimension " +
                    std::to_string(feature_dim));
  }
  for (double v : feature) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite feature value");
    }
  }
  features.push_back(std::move(feature));
  categories.push_back(std::move(category));
}

void AdaptConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  check(ema_alpha >= 0.0 && ema_alpha <= 1.0, "ema_alpha must lie in [0,1]");
  check(top_k >= 1, "top_k must be >= 1");
  check(agreement >= 0.0 && agreement <= 1.0, "agreement must lie in [0,1]");
  check(confidence >= 0.0 && confidence <= 1.0, "confidence must lie in [0,1]");
}

SizePriors compute_mean_sizes(const std::vector<SceneAnnotation>& scenes) {
  std::map<std::string, Vec3> sums;
  std::map<std::string, std::size_t> counts;
  for (const auto& s : scenes) {
    for (const auto& o : s.objects) {
      sums[o.category] = sums[o.category] + o.box.size;
      ++counts[o.category];
    }
  }
  SizePriors priors;
  for (const auto& [cat, sum] : sums) {
    priors[cat] = sum * (1.0 / static_cast<double>(counts[cat]));
  }
  return priors;
}

std::vector<Detection> apply_size_prior(std::span<const Detection> dets,
                                        const SizePriors& priors) {
  std::vector<Detection> out(dets.begin(), dets.end());
  for (Detection& d : out) {
    auto it = priors.find(d.category);
    if (it != priors.end()) d.box.size = it->second;
  }
  return out;
}

std::vector<std::string> select_few_shot(const std::vector<std::string>& split,
                                         std::size_t k, std::uint64_t seed) {
  if (k > split.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "few-shot k=" + std::to_string(k) + " exceeds split size " +
                    std::to_string(split.size()));
  }
  std::vector<std::string> pool = split;
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
  }
  pool.resize(k);
  return pool;
}

ParamVector ema_update(const ParamVector& teacher, const ParamVector& student,
                       double alpha) {
  if (teacher.size() != student.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ema_update length mismatch: teacher " +
                    std::to_string(teacher.size()) + " vs student " +
                    std::to_string(student.size()));
  }
  ParamVector out(teacher.size());
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    out[i] = teacher[i] + (1.0 - alpha) * (student[i] - teacher[i]);
  }
  return out;
}

ParamVector priors_to_params(const SizePriors& priors) {
  ParamVector p;
  p.reserve(priors.size() * 3);
  for (const auto& [cat, size] : priors) {
    p.push_back(size.x);
    p.push_back(size.y);
    p.push_back(size.z);
  }
  return p;
}

SizePriors params_to_priors(const ParamVector& params, const SizePriors& layout) {
  if (params.size() != layout.size() * 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "parameter vector does not match the prior layout");
  }
  SizePriors out;
  std::size_t i = 0;
  for (const auto& [cat, unused] : layout) {
    out[cat] = {params[i], params[i + 1], params[i + 2]};
    i += 3;
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

std::vector<std::size_t> top_k_similar(std::span<const double> feature,
                                       const FeatureCache& cache,
                                       std::size_t k) {
  const std::size_t n = cache.size();
  k = std::min(k, n);
  std::vector<double> sim(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Zero-norm cache entries rank below every real cosine.
    const auto& f = cache.features[i];
    const bool zero = std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; });
    sim[i] = zero ? -2.0 : cosine_similarity(feature, f);
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), [&](std::size_t a, std::size_t b) {
                      if (sim[a] != sim[b]) return sim[a] > sim[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

VoteResult reliable_vote(const Proposal& proposal, const FeatureCache& cache,
                         std::size_t k, double theta) {
  VoteResult result;
  if (cache.empty()) {
    result.diagnostic = "feature cache is empty";
    return result;
  }
  if (k == 0) {
    result.diagnostic = "top-K must be at least 1";
    return result;
  }
  if (proposal.feature.size() != cache.feature_dim) {
    result.diagnostic = "feature dimension mismatch";
    return result;
  }
  const bool zero = std::all_of(proposal.feature.begin(), proposal.feature.end(),
                                [](double v) { return v == 0.0; });
  if (zero) {
    result.diagnostic = "zero-norm proposal feature";
    return result;
  }
  result.neighbors = top_k_similar(proposal.feature, cache, k);
  std::size_t agree = 0;
  for (std::size_t i : result.neighbors) {
    if (cache.categories[i] == proposal.detection.category) ++agree;
  }
  result.agreement =
      static_cast<double>(agree) / static_cast<double>(result.neighbors.size());
  result.accepted = result.agreement >= theta;
  return result;
}

std::vector<ObjectAnnotation> pseudo_label_scene(
    std::span<const Proposal> proposals, const PointCloud& cloud,
    const FeatureCache* cache, const EvalConfig& eval_cfg,
    const AdaptConfig& adapt_cfg) {
  std::vector<Detection> dets;
  dets.reserve(proposals.size());
  for (const auto& p : proposals) dets.push_back(p.detection);
  std::vector<std::size_t> kept = postprocess_indices(dets, cloud.positions, eval_cfg);
  std::erase_if(kept, [&](std::size_t i) {
    return dets[i].score < adapt_cfg.confidence;
  });
  if (cache != nullptr) {
    std::erase_if(kept, [&](std::size_t i) {
      return !reliable_vote(proposals[i], *cache, adapt_cfg.top_k,
                            adapt_cfg.agreement)
                  .accepted;
    });
  }
  std::vector<ObjectAnnotation> out;
  out.reserve(kept.size());
  int next_id = 0;
  for (std::size_t i : kept) {
    out.push_back({next_id++, dets[i].category, dets[i].box, false, true});
  }
  return out;
}

}  // namespace procscene

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "procscene/adapt.hpp"
#include "procscene/error.hpp"
#include "procscene/procgen.hpp"

using namespace procscene;

namespace {

SceneAnnotation with_sizes(const std::vector<std::pair<std::string, Vec3>>& objs) {
  SceneAnnotation s;
  int id = 0;
  for (const auto& [cat, size] : objs) s.objects.push_back({id++, cat, {{0, 0, 0}, size, 0.0}});
  return s;
}

FeatureCache random_cache(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  FeatureCache c;
  c.feature_dim = dim;
  std::uniform_int_distribution<int> q(-2, 2);
  std::uniform_int_distribution<int> cat(0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> f(dim);
    // Small integer grid so duplicate and tied similarities occur.
    for (auto& v : f) v = q(rng);
    c.add(std::move(f), "c" + std::to_string(cat(rng)));
  }
  return c;
}

Proposal proposal(std::vector<double> f, std::string cat, double score = 0.95) {
  Proposal p;
  p.detection = {{{0, 0, 0.5}, {1, 1, 1}, 0.0}, std::move(cat), score};
  p.feature = std::move(f);
  return p;
}

}  // namespace

TEST_CASE("mean sizes") {
  const auto one = compute_mean_sizes({with_sizes({{"chair", {0.5, 0.6, 0.9}}})});
  CHECK(one.at("chair") == Vec3{0.5, 0.6, 0.9});
  const auto two = compute_mean_sizes(
      {with_sizes({{"bed", {1, 1, 1}}}), with_sizes({{"bed", {3, 1, 1}}})});
  CHECK(two.at("bed") == Vec3{2, 1, 1});

  const GenConfig cfg = default_gen_config();
  std::vector<SceneAnnotation> scenes;
  for (std::uint64_t s = 0; s < 20; ++s) scenes.push_back(annotate(generate_scene(s, cfg)));
  const auto priors = compute_mean_sizes(scenes);
  for (const auto& [cat, mean] : priors) {
    double sx = 0, sy = 0, sz = 0;
    int n = 0;
    for (const auto& sc : scenes)
      for (const auto& o : sc.objects)
        if (o.category == cat) {
          sx += o.box.size.x;
          sy += o.box.size.y;
          sz += o.box.size.z;
          ++n;
        }
    CHECK(mean.x == doctest::Approx(sx / n).epsilon(1e-12));
    CHECK(mean.y == doctest::Approx(sy / n).epsilon(1e-12));
    CHECK(mean.z == doctest::Approx(sz / n).epsilon(1e-12));
  }
}

TEST_CASE("size prior") {
  std::vector<Detection> dets{{{{1, 2, 0.4}, {0.4, 0.4, 0.8}, 0.3}, "chair", 0.7},
                              {{{3, 1, 0.5}, {1.2, 0.6, 0.7}, -1.0}, "table", 0.4},
                              {{{0, 0, 0.5}, {2, 1, 1}, 0.0}, "sofa", 0.2}};
  SizePriors priors{{"chair", {0.5, 0.5, 0.9}}, {"table", {1.2, 0.6, 0.7}}};
  const auto out = apply_size_prior(dets, priors);
  REQUIRE(out.size() == dets.size());
  CHECK(out[0].box.size == Vec3{0.5, 0.5, 0.9});
  CHECK(out[1] == dets[1]);  // prior equals the current size
  CHECK(out[2] == dets[2]);  // no prior
  for (std::size_t i = 0; i < dets.size(); ++i) {
    CHECK(out[i].box.center == dets[i].box.center);
    CHECK(out[i].box.heading == dets[i].box.heading);
    CHECK(out[i].score == dets[i].score);
    CHECK(out[i].category == dets[i].category);
  }
}

TEST_CASE("few-shot selection") {
  std::vector<std::string> split;
  for (int i = 0; i < 50; ++i) split.push_back("scene_" + std::to_string(i));
  const auto ten = select_few_shot(split, 10, 4);
  CHECK(ten.size() == 10);
  CHECK(std::set<std::string>(ten.begin(), ten.end()).size() == 10);
  CHECK(select_few_shot(split, 10, 4) == ten);
  CHECK(select_few_shot(split, 10, 5) != ten);
  auto whole = select_few_shot(split, 50, 1);
  std::sort(whole.begin(), whole.end());
  auto sorted = split;
  std::sort(sorted.begin(), sorted.end());
  CHECK(whole == sorted);
  CHECK_THROWS_AS(select_few_shot(split, 51, 1), Error);

  // Each id is drawn with probability k/n.
  std::vector<int> hits(50, 0);
  for (std::uint64_t s = 0; s < 2000; ++s)
    for (const auto& id : select_few_shot(split, 10, s)) ++hits[std::stoul(id.substr(6))];
  for (int h : hits) CHECK(std::abs(h - 400) < 80);
}

TEST_CASE("EMA") {
  CHECK(ema_update({0.0}, {1.0}, 0.99)[0] == doctest::Approx(0.01));
  CHECK(ema_update({0.3, 7.0}, {1.0, -2.0}, 1.0) == ParamVector{0.3, 7.0});
  CHECK(ema_update({0.3, 7.0}, {0.3, 7.0}, 0.42) == ParamVector{0.3, 7.0});
  CHECK_THROWS_AS(ema_update({1.0}, {1.0, 2.0}, 0.5), Error);

  for (double alpha : {0.0, 0.5, 0.9, 0.99, 0.999}) {
    ParamVector t{0.0, 2.0, -3.5};
    const ParamVector s{1.0, -1.0, 0.25};
    for (int n = 1; n <= 1000; ++n) {
      t = ema_update(t, s, alpha);
      const double an = std::pow(alpha, n);
      CHECK(std::abs(std::abs(t[0] - s[0]) - an * 1.0) < 1e-12);
      CHECK(std::abs(std::abs(t[1] - s[1]) - an * 3.0) < 1e-12);
      CHECK(std::abs(std::abs(t[2] - s[2]) - an * 3.75) < 1e-12);
    }
  }

  SizePriors layout{{"a", {1, 2, 3}}, {"b", {4, 5, 6}}};
  CHECK(priors_to_params(layout) == ParamVector{1, 2, 3, 4, 5, 6});
  CHECK(params_to_priors(priors_to_params(layout), layout) == layout);
  CHECK_THROWS_AS(params_to_priors({1, 2}, layout), Error);
}

TEST_CASE("reliable vote fixtures") {
  FeatureCache cache;
  cache.feature_dim = 2;
  cache.add({1, 0}, "chair");
  cache.add({1, 0.1}, "chair");
  cache.add({1, 0.2}, "chair");
  cache.add({1, 0.3}, "table");
  cache.add({1, 0.4}, "table");
  cache.add({-1, 0}, "table");
  CHECK_THROWS_AS(cache.add({1, 2, 3}, "x"), Error);
  CHECK_THROWS_AS(cache.add({1, NAN}, "x"), Error);

  const auto three_of_five = reliable_vote(proposal({1, 0}, "chair"), cache, 5, 0.6);
  CHECK(three_of_five.neighbors == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(three_of_five.agreement == doctest::Approx(0.6));
  CHECK(three_of_five.accepted);
  CHECK_FALSE(reliable_vote(proposal({1, 0}, "chair"), cache, 5, 0.61).accepted);
  CHECK(reliable_vote(proposal({1, 0}, "chair"), cache, 3, 1.0).accepted);
  CHECK_FALSE(reliable_vote(proposal({1, 0}, "sofa"), cache, 5, 0.01).accepted);
  // K larger than the cache is capped.
  CHECK(reliable_vote(proposal({1, 0}, "chair"), cache, 100, 0.5).neighbors.size() == 6);

  const auto zero = reliable_vote(proposal({0, 0}, "chair"), cache, 5, 0.6);
  CHECK_FALSE(zero.accepted);
  CHECK_FALSE(zero.diagnostic.empty());
  CHECK_FALSE(reliable_vote(proposal({1, 0}, "chair"), FeatureCache{}, 5, 0.6).diagnostic.empty());
}

TEST_CASE("top-K equals the exhaustive ranking") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t dim = 1 + trial % 6;
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 40);
    const FeatureCache cache = random_cache(rng, n, dim);
    std::vector<double> f(dim);
    std::uniform_int_distribution<int> q(-2, 2);
    do {
      for (auto& v : f) v = q(rng);
    } while (std::all_of(f.begin(), f.end(), [](double v) { return v == 0; }));
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, n + 3}) {
      CHECK(top_k_similar(f, cache, k) == oracle::exhaustive_top_k(f, cache, k));
    }
    // Acceptance is monotone in theta.
    const Proposal p = proposal(f, "c1");
    bool accepted_above = false;
    for (double theta = 1.0; theta >= -1e-9; theta -= 0.05) {
      const bool acc = reliable_vote(p, cache, 5, theta).accepted;
      if (accepted_above) CHECK(acc);
      accepted_above = accepted_above || acc;
    }
  }
}

TEST_CASE("pseudo-labels") {
  PointCloud cloud;
  for (int i = 0; i < 30; ++i) {
    cloud.positions.push_back({0.02 * i - 0.3, 0, 0.5});
    cloud.colors.push_back({0, 0, 0});
  }
  EvalConfig ecfg;
  AdaptConfig acfg;
  CHECK(pseudo_label_scene({}, cloud, nullptr, ecfg, acfg).empty());

  std::vector<Proposal> props{proposal({1, 0}, "chair", 0.95), proposal({1, 0}, "chair", 0.97),
                              proposal({1, 0.4}, "table", 0.92), proposal({1, 0}, "chair", 0.5)};
  props[2].detection.box.center.x = 5;  // no points: dropped by post-processing
  const auto confident = pseudo_label_scene(props, cloud, nullptr, ecfg, acfg);
  // NMS keeps only the 0.97 chair among the three coincident boxes.
  REQUIRE(confident.size() == 1);
  CHECK(confident[0].pseudo);
  CHECK(confident[0].box == props[1].detection.box);

  AdaptConfig strict = acfg;
  strict.confidence = 1.0;
  CHECK(pseudo_label_scene(props, cloud, nullptr, ecfg, strict).empty());

  FeatureCache cache;
  cache.feature_dim = 2;
  for (int i = 0; i < 5; ++i) cache.add({1, 0.01 * i}, "table");
  CHECK(pseudo_label_scene(props, cloud, &cache, ecfg, acfg).empty());
  FeatureCache agree;
  agree.feature_dim = 2;
  for (int i = 0; i < 5; ++i) agree.add({1, 0.01 * i}, "chair");
  CHECK(pseudo_label_scene(props, cloud, &agree, ecfg, acfg).size() == 1);

  AdaptConfig bad;
  bad.ema_alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = AdaptConfig{};
  bad.top_k = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

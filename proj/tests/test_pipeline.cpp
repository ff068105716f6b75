#include <doctest.h>

#include <filesystem>
#include <optional>

#include "procscene/annotation.hpp"
#include "procscene/error.hpp"
#include "procscene/io.hpp"
#include "procscene/pipeline.hpp"

using namespace procscene;
namespace fs = std::filesystem;
namespace pp = procscene::pipeline;

namespace {

// One small dataset with clouds, shared by the cases below.
const fs::path& fixture() {
  static const fs::path dir = [] {
    const fs::path root = fs::temp_directory_path() / "procscene_test_pipeline";
    fs::remove_all(root);
    pp::generate(default_gen_config(), 12, 21, root / "a", 2);
    pp::CloudOptions opts;
    opts.points = 12000;
    opts.seed = 21;
    pp::pointcloud(root / "a", opts, 2);
    return root;
  }();
  return dir;
}

std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("dataset directory") {
  const pp::Dataset ds = pp::Dataset::open(fixture() / "a");
  CHECK(ds.manifest.root == ".");
  CHECK(ds.manifest.train_ids.size() + ds.manifest.eval_ids.size() == 12);
  CHECK(ds.split("all").size() == 12);
  CHECK(ds.split("train") == ds.manifest.train_ids);
  CHECK(code_of([&] { ds.split("test"); }) == ErrorCode::kInvalidArgument);
  for (const auto& id : ds.split("all")) {
    CHECK(fs::exists(ds.cloud_path(id)));
    const SceneAnnotation ann = io::read_scene_annotation(ds.annotation_path(id));
    const SceneLayout layout = ds.layout(id);
    CHECK(annotate(layout).objects == ann.objects);
  }
  CHECK(code_of([&] { pp::Dataset::open(fixture() / "missing"); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { ds.index_of("scene_nope"); }).has_value());
}

TEST_CASE("evaluate scores only the requested split") {
  const pp::Dataset ds = pp::Dataset::open(fixture() / "a");
  io::PredictionSet perfect;
  for (const auto& id : ds.split("all")) {
    for (const auto& o : io::read_scene_annotation(ds.annotation_path(id)).objects) {
      Proposal p;
      p.detection = {o.box, o.category, 1.0};
      perfect[id].push_back(p);
    }
  }
  CHECK(pp::evaluate(perfect, ds, "eval", {}, EvalConfig{}).report.map == doctest::Approx(1.0));
  // Scenes without predictions count as empty.
  io::PredictionSet partial = perfect;
  partial.erase(ds.manifest.eval_ids.front());
  CHECK(pp::evaluate(partial, ds, "eval", {}, EvalConfig{}).report.map < 1.0);
  // Predictions outside the split are ignored.
  io::PredictionSet noisy = perfect;
  for (const auto& id : ds.manifest.train_ids) noisy[id].clear();
  CHECK(pp::evaluate(noisy, ds, "eval", {}, EvalConfig{}).report.map == doctest::Approx(1.0));
  const auto only = pp::evaluate(perfect, ds, "eval", {"chair", "unicorn"}, EvalConfig{});
  CHECK(only.report.absent == std::vector<std::string>{"unicorn"});
  const std::string table = pp::format_report(only.report, "table");
  CHECK(table.find("mAP") != std::string::npos);
}

TEST_CASE("benchmark methods") {
  const fs::path root = fixture();
  pp::Recipe r;
  r.source = root / "a";
  r.target = root / "a";
  r.seed = 4;
  r.adapt.few_shot_k = 3;
  std::map<pp::Method, double> maps;
  for (pp::Method m : {pp::Method::kSourceOnly, pp::Method::kSizePrior, pp::Method::kFewShot,
                       pp::Method::kVss, pp::Method::kMeanTeacher, pp::Method::kReliableVoting}) {
    r.method = m;
    const auto res = pp::benchmark(r, 2);
    CHECK(res.report.map >= 0.0);
    CHECK(res.report.map <= 1.0);
    CHECK(pp::method_from_string(pp::to_string(m)) == m);
    maps[m] = res.report.map;
    // Thread count never changes the outcome.
    CHECK(pp::benchmark(r, 1).report.map == res.report.map);
  }
  CHECK(maps[pp::Method::kVss] == maps[pp::Method::kSourceOnly]);
  CHECK(code_of([] { pp::method_from_string("magic"); }) == ErrorCode::kInvalidArgument);

  r.method = pp::Method::kSourceOnly;
  r.categories = {"chair", "not_shared"};
  CHECK(code_of([&] { pp::benchmark(r, 1); }) == ErrorCode::kInvariant);
  r.categories = {"chair"};
  const auto chairs = pp::benchmark(r, 1);
  CHECK(chairs.report.categories.size() + chairs.report.absent.size() == 1);
  CHECK(chairs.model.mean_sizes.size() == 1);
}

TEST_CASE("recipe files") {
  const fs::path root = fixture();
  io::write_text(root / "recipe.json",
                 R"({"source": "a", "target": "a", "method": "few_shot", "seed": 9,
                     "adapt": {"few_shot_k": 2}, "eval": {"iou_threshold": 0.5},
                     "detector": {"cluster_radius": 0.2}, "categories": ["bed", "chair"]})");
  const pp::Recipe r = pp::load_recipe(root / "recipe.json");
  CHECK(r.source == root / "a");
  CHECK(r.method == pp::Method::kFewShot);
  CHECK(r.adapt.few_shot_k == 2);
  CHECK(r.eval.iou_threshold == 0.5);
  CHECK(r.detector.cluster_radius == 0.2);
  CHECK(r.categories == std::vector<std::string>{"bed", "chair"});
  io::write_text(root / "bad.json", R"({"target": "a"})");
  CHECK(code_of([&] { pp::load_recipe(root / "bad.json"); }) == ErrorCode::kFormat);
  io::write_text(root / "bad.json", R"({"source": "a", "target": "a", "rounds": 0})");
  CHECK(code_of([&] { pp::load_recipe(root / "bad.json"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("cache, pseudo labels and few-shot ids") {
  const fs::path root = fixture();
  const pp::Dataset ds = pp::Dataset::open(root / "a");
  const NaiveModel model = pp::fit(root / "a");
  const FeatureCache cache = pp::build_cache(ds, ds.manifest.train_ids, model, EvalConfig{}, 2);
  CHECK(cache.feature_dim == 8);
  CHECK_FALSE(cache.empty());
  CHECK(io::decode_feature_cache(io::encode_feature_cache(cache)).features == cache.features);

  const auto preds = pp::detect(ds, ds.manifest.train_ids, model, EvalConfig{}, 2);
  io::write_text(root / "preds.json", io::predictions_to_json(preds, "a", true));
  AdaptConfig loose;
  loose.confidence = 0.2;
  pp::pseudolabel(root / "preds.json", &cache, EvalConfig{}, loose, root / "pseudo", 2);
  const pp::Dataset pseudo = pp::Dataset::open(root / "pseudo");
  CHECK(pseudo.manifest.name == ds.manifest.name + "_pseudo");
  CHECK(pseudo.manifest.train_ids.size() == ds.manifest.train_ids.size());
  CHECK(pseudo.manifest.eval_ids.empty());
  std::size_t labels = 0;
  for (const auto& id : pseudo.manifest.train_ids) {
    CHECK(fs::exists(pseudo.cloud_path(id)));
    for (const auto& o : io::read_scene_annotation(pseudo.annotation_path(id)).objects) {
      CHECK(o.pseudo);
      ++labels;
    }
  }
  std::size_t proposals = 0;
  for (const auto& [id, props] : preds) proposals += props.size();
  CHECK(labels <= proposals);

  const auto shots = pp::fewshot(root / "a", 3, 5);
  CHECK(shots == pp::fewshot(root / "a", 3, 5));
  CHECK(shots.size() == 3);
  CHECK(code_of([&] { pp::fewshot(root / "a", 500, 5); }) == ErrorCode::kInvalidArgument);
}

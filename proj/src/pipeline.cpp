// SPDX-License-Identifier: Apache-2.0
#include "procscene/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "procscene/error.hpp"
#include "procscene/instance_swap.hpp"
#include "procscene/parallel.hpp"
#include "procscene/rng.hpp"
#include "procscene/sampling.hpp"

namespace procscene::pipeline {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kManifest = "manifest.json";
constexpr const char* kConfig = "config.json";

std::string object_group_name(int instance_id, const std::string& category) {
  return "object_" + std::to_string(instance_id) + "_" + category;
}

// Clears the generated subdirectories of a previous run so stale scenes do
// not survive into the new dataset.
void reset_dataset_dir(const fs::path& out) {
  fs::create_directories(out);
  for (const char* sub : {"annotations", "meshes", "clouds"}) {
    fs::remove_all(out / sub);
  }
  fs::create_directories(out / "annotations");
  fs::create_directories(out / "meshes");
}

void copy_file_verbatim(const fs::path& from, const fs::path& to) {
  io::write_bytes(to, io::read_bytes(from));
}

void require_dir(const fs::path& dir, const char* what) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kNotFound, std::string(what) + " '" + dir.string() + "' does not exist");
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::string> intersect(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<SceneDetections> to_scene_detections(const io::PredictionSet& preds,
                                                 const std::vector<std::string>& ids,
                                                 const std::set<std::string>& keep) {
  std::vector<SceneDetections> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    SceneDetections sd{id, {}};
    if (auto it = preds.find(id); it != preds.end()) {
      for (const auto& p : it->second) {
        if (keep.count(p.detection.category)) sd.detections.push_back(p.detection);
      }
    }
    out.push_back(std::move(sd));
  }
  return out;
}

}  // namespace

// --- Dataset -----------------------------------------------------------------

Dataset Dataset::open(const fs::path& dir) {
  require_dir(dir, "dataset directory");
  if (!fs::exists(dir / kManifest)) {
    throw Error(ErrorCode::kNotFound, "no manifest.json in '" + dir.string() + "'");
  }
  Dataset ds;
  ds.dir = dir;
  ds.manifest = io::manifest_from_json(io::read_text(dir / kManifest));
  for (const auto& id : ds.manifest.all_ids()) {
    if (!fs::exists(ds.annotation_path(id))) {
      throw Error(ErrorCode::kNotFound, "manifest scene '" + id + "' has no annotation file");
    }
  }
  return ds;
}

fs::path Dataset::annotation_path(const std::string& id) const {
  return dir / "annotations" / (id + ".json");
}
fs::path Dataset::mesh_path(const std::string& id) const {
  return dir / "meshes" / (id + ".obj");
}
fs::path Dataset::cloud_path(const std::string& id) const {
  return dir / "clouds" / (id + ".ipc");
}

std::size_t Dataset::index_of(const std::string& id) const {
  const auto ids = manifest.all_ids();
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) {
    throw Error(ErrorCode::kNotFound, "scene '" + id + "' is not in the manifest");
  }
  return static_cast<std::size_t>(it - ids.begin());
}

std::vector<std::string> Dataset::split(const std::string& name) const {
  if (name == "train") return manifest.train_ids;
  if (name == "eval") return manifest.eval_ids;
  if (name == "all") return manifest.all_ids();
  throw Error(ErrorCode::kInvalidArgument, "unknown split '" + name + "' (train|eval|all)");
}

std::vector<SceneAnnotation> Dataset::annotations(const std::vector<std::string>& ids) const {
  std::vector<SceneAnnotation> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(io::read_scene_annotation(annotation_path(id)));
  return out;
}

SceneLayout Dataset::layout(const std::string& id) const {
  const SceneAnnotation ann = io::read_scene_annotation(annotation_path(id));
  const fs::path mesh_file = mesh_path(id);
  if (!fs::exists(mesh_file)) {
    throw Error(ErrorCode::kNotFound, "scene '" + id + "' has no mesh file");
  }
  std::map<std::string, TriMesh> groups;
  for (auto& [name, mesh] : io::meshes_from_obj(io::read_text(mesh_file))) {
    groups[name] = std::move(mesh);
  }
  SceneLayout layout;
  layout.scene_id = ann.scene_id;
  layout.seed = ann.seed;
  layout.room = ann.room;
  if (auto it = groups.find("structure"); it != groups.end()) {
    layout.structure_mesh = it->second;
  }
  for (const auto& o : ann.objects) {
    const auto it = groups.find(object_group_name(o.instance_id, o.category));
    if (it == groups.end()) {
      throw Error(ErrorCode::kFormat, "scene '" + id + "' mesh lacks object " +
                                          std::to_string(o.instance_id));
    }
    PlacedObject p;
    p.category = o.category;
    p.box = o.box;
    p.mesh = it->second;
    p.instance_id = o.instance_id;
    layout.objects.push_back(std::move(p));
  }
  return layout;
}

// --- generation and swapping -------------------------------------------------

void generate(const GenConfig& cfg, std::size_t scenes, std::uint64_t seed,
              const fs::path& out, unsigned threads) {
  cfg.validate();
  if (scenes == 0) throw Error(ErrorCode::kInvalidArgument, "scene count must be positive");
  GeneratedDataset data = generate_dataset(scenes, cfg, seed, threads);
  data.manifest.config_hash = io::config_hash(cfg);
  reset_dataset_dir(out);
  io::write_text(out / kConfig, io::gen_config_to_json(cfg));
  parallel_for(data.scenes.size(), threads, [&](std::size_t i) {
    const SceneLayout& scene = data.scenes[i];
    io::write_scene_annotation(out / "annotations" / (scene.scene_id + ".json"), annotate(scene));
    io::export_scene_mesh(out / "meshes" / (scene.scene_id + ".obj"), scene);
  });
  // Written last: a manifest marks a complete dataset.
  io::write_text(out / kManifest, io::manifest_to_json(data.manifest));
}

void make_library(const GenConfig& cfg, const std::string& style,
                  std::size_t per_category, std::uint64_t seed, const fs::path& out) {
  cfg.validate();
  if (per_category == 0) {
    throw Error(ErrorCode::kInvalidArgument, "per-category count must be positive");
  }
  io::write_library(out, build_procedural_library(cfg, style, per_category, seed));
}

void swap_dataset(const fs::path& in, const fs::path& library, double tolerance,
                  std::uint64_t seed, const fs::path& out, unsigned threads) {
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  const Dataset ds = Dataset::open(in);
  require_dir(library, "library directory");
  const InstanceLibrary lib = io::read_library(library);
  if (fs::exists(out) && fs::equivalent(in, out)) {
    throw Error(ErrorCode::kInvalidArgument, "swap output must differ from its input");
  }
  SwapConfig cfg;
  cfg.size_tolerance = tolerance;

  const auto ids = ds.manifest.all_ids();
  reset_dataset_dir(out);
  copy_file_verbatim(in / kConfig, out / kConfig);
  std::vector<SwapResult> results(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, kStreamSwap, i));
    SwapResult r = swap_scene(ds.layout(ids[i]), lib, cfg, rng);
    copy_file_verbatim(ds.annotation_path(ids[i]), out / "annotations" / (ids[i] + ".json"));
    io::export_scene_mesh(out / "meshes" / (ids[i] + ".obj"), r.scene);
    r.scene = SceneLayout{};  // only the id lists are kept
    results[i] = std::move(r);
  });

  json report;
  report["schema_version"] = io::kSchemaVersion;
  report["tolerance"] = tolerance;
  report["seed"] = seed;
  std::size_t swapped = 0, kept = 0;
  json scenes = json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    scenes[ids[i]] = {{"swapped", results[i].swapped_ids}, {"kept", results[i].kept_ids}};
    swapped += results[i].swapped_ids.size();
    kept += results[i].kept_ids.size();
  }
  report["swapped_total"] = swapped;
  report["kept_total"] = kept;
  report["scenes"] = std::move(scenes);
  io::write_text(out / "swap_report.json", report.dump(2) + "\n");
  copy_file_verbatim(in / kManifest, out / kManifest);
}

// --- point clouds --------------------------------------------------------------

void pointcloud(const fs::path& in, const CloudOptions& opts, unsigned threads) {
  const Dataset ds = Dataset::open(in);
  if (opts.points == 0) throw Error(ErrorCode::kInvalidArgument, "--points must be positive");
  if (!(opts.density > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--density must be positive");
  if (opts.vss) opts.vss_cfg.validate();

  fs::path target = in;
  if (!opts.out.empty() && !(fs::exists(opts.out) && fs::equivalent(in, opts.out))) {
    target = opts.out;
    reset_dataset_dir(target);
    copy_file_verbatim(in / kConfig, target / kConfig);
  }
  fs::remove_all(target / "clouds");
  fs::create_directories(target / "clouds");

  const auto ids = ds.manifest.all_ids();
  SamplerConfig scfg;
  scfg.points_per_scene = opts.points;
  scfg.points_per_m2 = opts.density;
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const std::string& id = ids[i];
    const SceneLayout layout = ds.layout(id);
    Rng rng(derive_seed(opts.seed, kStreamCloud, i));
    PointCloud cloud = sample_scene_cloud(layout.combined_mesh(), scfg, rng);
    if (opts.vss) {
      Rng vrng(derive_seed(opts.seed, kStreamVss, i));
      cloud = vss_augment(cloud, layout.room, opts.vss_cfg, vrng);
    }
    if (!cloud.empty()) cloud = compute_height(std::move(cloud));
    io::write_pointcloud(target / "clouds" / (id + ".ipc"), cloud);
    if (opts.ply) io::write_text(target / "clouds" / (id + ".ply"), io::pointcloud_to_ply(cloud));
    if (target != in) {
      copy_file_verbatim(ds.annotation_path(id), target / "annotations" / (id + ".json"));
      copy_file_verbatim(ds.mesh_path(id), target / "meshes" / (id + ".obj"));
    }
  });
  if (target != in) copy_file_verbatim(in / kManifest, target / kManifest);
}

// --- statistics --------------------------------------------------------------

std::string stats(const fs::path& in, const std::string& format) {
  const Dataset ds = Dataset::open(in);
  const DatasetStats st = dataset_stats(ds.annotations(ds.manifest.all_ids()));
  if (format == "json") {
    json j;
    j["scene_count"] = st.scene_count;
    j["total_boxes"] = st.total_boxes;
    j["mean_boxes_per_scene"] = st.mean_boxes_per_scene;
    j["emptied_scenes"] = st.emptied_scenes;
    json cats = json::object();
    for (const auto& [cat, n] : st.instance_histogram) {
      const Vec3& s = st.mean_sizes.at(cat);
      cats[cat] = {{"count", n}, {"mean_size", json::array({s.x, s.y, s.z})}};
    }
    j["categories"] = std::move(cats);
    return j.dump(2) + "\n";
  }
  if (format != "table") {
    throw Error(ErrorCode::kInvalidArgument, "unknown format '" + format + "' (json|table)");
  }
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "scenes %zu  boxes %zu  boxes/scene %.2f\n",
                st.scene_count, st.total_boxes, st.mean_boxes_per_scene);
  out += line;
  std::snprintf(line, sizeof line, "%-16s %8s %8s %8s %8s\n", "category", "count", "l", "w", "h");
  out += line;
  for (const auto& [cat, n] : st.instance_histogram) {
    const Vec3& s = st.mean_sizes.at(cat);
    std::snprintf(line, sizeof line, "%-16s %8zu %8.3f %8.3f %8.3f\n", cat.c_str(), n, s.x, s.y, s.z);
    out += line;
  }
  return out;
}

// --- detection and evaluation --------------------------------------------------

NaiveModel fit(const fs::path& in, const NaiveModel& base) {
  const Dataset ds = Dataset::open(in);
  return fit_naive(ds.annotations(ds.manifest.train_ids), base);
}

io::PredictionSet detect(const Dataset& ds, const std::vector<std::string>& ids,
                         const NaiveModel& model, const EvalConfig& eval_cfg,
                         unsigned threads) {
  model.validate();
  eval_cfg.validate();
  std::vector<std::vector<Proposal>> per_scene(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const fs::path cloud_file = ds.cloud_path(ids[i]);
    if (!fs::exists(cloud_file)) {
      throw Error(ErrorCode::kNotFound,
                  "scene '" + ids[i] + "' has no point cloud (run pointcloud first)");
    }
    const PointCloud cloud = io::read_pointcloud(cloud_file);
    const SceneAnnotation ann = io::read_scene_annotation(ds.annotation_path(ids[i]));
    const std::vector<Proposal> raw = procscene::detect(cloud, model, ann.room.footprint);
    std::vector<Detection> dets;
    dets.reserve(raw.size());
    for (const auto& p : raw) dets.push_back(p.detection);
    for (std::size_t k : postprocess_indices(dets, cloud.positions, eval_cfg)) {
      per_scene[i].push_back(raw[k]);
    }
  });
  io::PredictionSet out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = std::move(per_scene[i]);
  return out;
}

EvalOutcome evaluate(const io::PredictionSet& preds, const Dataset& gt,
                     const std::string& split, const std::vector<std::string>& categories,
                     const EvalConfig& cfg) {
  cfg.validate();
  EvalOutcome outcome;
  outcome.scene_ids = gt.split(split);
  const std::vector<std::string> cats =
      categories.empty() ? gt.manifest.categories : categories;
  const std::set<std::string> keep(cats.begin(), cats.end());
  const auto gts = filter_categories(gt.annotations(outcome.scene_ids), cats);
  const auto dets = to_scene_detections(preds, outcome.scene_ids, keep);
  outcome.report = map_at(dets, gts, cfg, cats);
  return outcome;
}

std::string format_report(const EvalReport& report, const std::string& format) {
  if (format == "json") {
    json j;
    json cats = json::array();
    for (const auto& c : report.categories) {
      cats.push_back({{"category", c.category},
                      {"ap", c.ap},
                      {"n_gt", c.n_gt},
                      {"tp", c.tp},
                      {"fp", c.fp},
                      {"missed", c.missed},
                      {"precision", c.precision},
                      {"recall", c.recall}});
    }
    j["categories"] = std::move(cats);
    j["absent"] = report.absent;
    j["map"] = report.map;
    return j.dump(2) + "\n";
  }
  if (format != "table") {
    throw Error(ErrorCode::kInvalidArgument, "unknown format '" + format + "' (json|table)");
  }
  // AP per category as percentages, then the mean.
  std::string header, values;
  char cell[64];
  for (const auto& c : report.categories) {
    const int width = std::max<int>(8, static_cast<int>(c.category.size()) + 1);
    std::snprintf(cell, sizeof cell, "%*s", width, c.category.c_str());
    header += cell;
    std::snprintf(cell, sizeof cell, "%*.2f", width, 100.0 * c.ap);
    values += cell;
  }
  std::snprintf(cell, sizeof cell, "%8s", "mAP");
  header += cell;
  values += fmt("%8.2f", 100.0 * report.map);
  std::string out = header + "\n" + values + "\n";
  if (!report.absent.empty()) {
    out += "absent:";
    for (const auto& a : report.absent) out += " " + a;
    out += "\n";
  }
  return out;
}

std::vector<std::string> fewshot(const fs::path& in, std::size_t k, std::uint64_t seed) {
  const Dataset ds = Dataset::open(in);
  return select_few_shot(ds.manifest.train_ids, k, seed);
}

FeatureCache build_cache(const Dataset& ds, const std::vector<std::string>& ids,
                         const NaiveModel& model, const EvalConfig& eval_cfg,
                         unsigned threads) {
  const io::PredictionSet preds = detect(ds, ids, model, eval_cfg, threads);
  FeatureCache cache;
  for (const auto& id : ids) {
    for (const auto& p : preds.at(id)) {
      if (cache.empty() && cache.feature_dim == 0) cache.feature_dim = p.feature.size();
      cache.add(p.feature, p.detection.category);
    }
  }
  return cache;
}

void pseudolabel(const fs::path& predictions, const FeatureCache* cache,
                 const EvalConfig& eval_cfg, const AdaptConfig& adapt_cfg,
                 const fs::path& out, unsigned threads) {
  eval_cfg.validate();
  adapt_cfg.validate();
  std::string dataset_ref;
  const io::PredictionSet preds =
      io::predictions_from_json(io::read_text(predictions), &dataset_ref);
  if (dataset_ref.empty()) {
    throw Error(ErrorCode::kFormat, "predictions file does not name its dataset");
  }
  fs::path dataset_dir = dataset_ref;
  if (dataset_dir.is_relative()) dataset_dir = predictions.parent_path() / dataset_dir;
  const Dataset ds = Dataset::open(dataset_dir);

  std::vector<std::string> ids;
  for (const auto& [id, props] : preds) {
    ds.index_of(id);
    ids.push_back(id);
  }
  reset_dataset_dir(out);
  fs::create_directories(out / "clouds");
  copy_file_verbatim(ds.dir / kConfig, out / kConfig);
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const std::string& id = ids[i];
    const PointCloud cloud = io::read_pointcloud(ds.cloud_path(id));
    SceneAnnotation ann = io::read_scene_annotation(ds.annotation_path(id));
    ann.objects = pseudo_label_scene(preds.at(id), cloud, cache, eval_cfg, adapt_cfg);
    io::write_scene_annotation(out / "annotations" / (id + ".json"), ann);
    copy_file_verbatim(ds.mesh_path(id), out / "meshes" / (id + ".obj"));
    copy_file_verbatim(ds.cloud_path(id), out / "clouds" / (id + ".ipc"));
  });
  // Only the labeled scenes form the pseudo dataset; they all act as training data.
  DatasetManifest m = ds.manifest;
  m.name += "_pseudo";
  m.train_ids = ids;
  m.eval_ids.clear();
  io::write_text(out / kManifest, io::manifest_to_json(m));
}

// --- benchmark ---------------------------------------------------------------

std::string to_string(Method m) {
  switch (m) {
    case Method::kSourceOnly: return "source_only";
    case Method::kSizePrior: return "size_prior";
    case Method::kFewShot: return "few_shot";
    case Method::kVss: return "vss";
    case Method::kMeanTeacher: return "mean_teacher";
    case Method::kReliableVoting: return "reliable_voting";
  }
  return "source_only";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::kSourceOnly, Method::kSizePrior, Method::kFewShot, Method::kVss,
                   Method::kMeanTeacher, Method::kReliableVoting}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown adaptation method '" + s + "'");
}

Recipe load_recipe(const fs::path& path) {
  const json j = [&] {
    try {
      return json::parse(io::read_text(path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormat, std::string("malformed recipe: ") + e.what());
    }
  }();
  try {
    Recipe r;
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
      fs::path q = p;
      return q.is_relative() ? base / q : q;
    };
    r.source = resolve(j.at("source").get<std::string>());
    r.target = resolve(j.at("target").get<std::string>());
    if (j.contains("categories")) {
      const json& c = j.at("categories");
      r.categories = c.is_string()
                         ? io::parse_category_list(io::read_text(resolve(c.get<std::string>())))
                         : c.get<std::vector<std::string>>();
    }
    if (j.contains("eval")) r.eval = io::eval_config_from_json(j.at("eval").dump());
    if (j.contains("adapt")) r.adapt = io::adapt_config_from_json(j.at("adapt").dump());
    if (j.contains("detector")) {
      const json& d = j.at("detector");
      r.detector.cluster_radius = d.value("cluster_radius", r.detector.cluster_radius);
      r.detector.min_cluster_points = d.value("min_cluster_points", r.detector.min_cluster_points);
      r.detector.floor_height = d.value("floor_height", r.detector.floor_height);
      r.detector.wall_margin = d.value("wall_margin", r.detector.wall_margin);
    }
    r.method = method_from_string(j.value("method", std::string("source_only")));
    r.seed = j.value("seed", std::uint64_t{0});
    r.rounds = j.value("rounds", r.rounds);
    if (r.rounds < 1) throw Error(ErrorCode::kInvalidArgument, "recipe rounds must be >= 1");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed recipe: ") + e.what());
  }
}

namespace {

// Student priors from pseudo labels; categories the student never saw keep
// the teacher's values so the parameter layouts line up.
SizePriors student_priors(const std::vector<SceneAnnotation>& pseudo, const SizePriors& teacher) {
  SizePriors student = compute_mean_sizes(pseudo);
  SizePriors out = teacher;
  for (auto& [cat, size] : out) {
    if (auto it = student.find(cat); it != student.end()) size = it->second;
  }
  return out;
}

}  // namespace

BenchmarkResult benchmark(const Recipe& recipe, unsigned threads) {
  recipe.eval.validate();
  recipe.adapt.validate();
  const Dataset source = Dataset::open(recipe.source);
  const Dataset target = Dataset::open(recipe.target);

  const auto shared = intersect(source.manifest.categories, target.manifest.categories);
  std::vector<std::string> cats = recipe.categories;
  if (cats.empty()) {
    cats = shared;
  } else {
    for (const auto& c : cats) {
      if (!std::binary_search(shared.begin(), shared.end(), c)) {
        throw Error(ErrorCode::kInvariant,
                    "recipe category '" + c + "' is not shared by source and target");
      }
    }
  }

  const auto source_train = filter_categories(source.annotations(source.manifest.train_ids), cats);
  NaiveModel model = fit_naive(source_train, recipe.detector);
  SizePriors target_prior;

  switch (recipe.method) {
    case Method::kSourceOnly:
    case Method::kVss:
      break;
    case Method::kSizePrior:
      target_prior = compute_mean_sizes(
          filter_categories(target.annotations(target.manifest.train_ids), cats));
      break;
    case Method::kFewShot: {
      const auto shots = select_few_shot(target.manifest.train_ids, recipe.adapt.few_shot_k,
                                         derive_seed(recipe.seed, kStreamFewShot, 0));
      const SizePriors few = compute_mean_sizes(filter_categories(target.annotations(shots), cats));
      for (auto& [cat, size] : model.mean_sizes) {
        if (auto it = few.find(cat); it != few.end()) size = it->second;
      }
      break;
    }
    case Method::kMeanTeacher:
    case Method::kReliableVoting: {
      FeatureCache cache;
      if (recipe.method == Method::kReliableVoting) {
        cache = build_cache(source, source.manifest.train_ids, model, recipe.eval, threads);
      }
      const auto& ids = target.manifest.train_ids;
      ParamVector teacher = priors_to_params(model.mean_sizes);
      for (int round = 0; round < recipe.rounds; ++round) {
        const io::PredictionSet preds = detect(target, ids, model, recipe.eval, threads);
        std::vector<SceneAnnotation> pseudo(ids.size());
        parallel_for(ids.size(), threads, [&](std::size_t i) {
          const PointCloud cloud = io::read_pointcloud(target.cloud_path(ids[i]));
          pseudo[i].scene_id = ids[i];
          pseudo[i].objects = pseudo_label_scene(
              preds.at(ids[i]), cloud,
              recipe.method == Method::kReliableVoting ? &cache : nullptr, recipe.eval,
              recipe.adapt);
        });
        const ParamVector student = priors_to_params(student_priors(pseudo, model.mean_sizes));
        teacher = ema_update(teacher, student, recipe.adapt.ema_alpha);
        model.mean_sizes = params_to_priors(teacher, model.mean_sizes);
      }
      break;
    }
  }

  const auto eval_ids = target.manifest.eval_ids;
  io::PredictionSet preds = detect(target, eval_ids, model, recipe.eval, threads);
  if (recipe.method == Method::kSizePrior) {
    for (auto& [id, props] : preds) {
      std::vector<Detection> dets;
      for (const auto& p : props) dets.push_back(p.detection);
      dets = apply_size_prior(dets, target_prior);
      for (std::size_t k = 0; k < dets.size(); ++k) props[k].detection = dets[k];
    }
  }
  const std::set<std::string> keep(cats.begin(), cats.end());
  const auto gts = filter_categories(target.annotations(eval_ids), cats);
  BenchmarkResult result;
  result.report = map_at(to_scene_detections(preds, eval_ids, keep), gts, recipe.eval, cats);
  result.model = std::move(model);
  return result;
}

}  // namespace procscene::pipeline

// SPDX-License-Identifier: Apache-2.0
#include "procscene/procscene.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "procscene/annotation.hpp"
#include "procscene/error.hpp"
#include "procscene/geom.hpp"
#include "procscene/io.hpp"
#include "procscene/pipeline.hpp"
#include "procscene/rng.hpp"
#include "procscene/sampling.hpp"

struct ps_config {
  procscene::GenConfig cfg;
};
struct ps_scene {
  procscene::SceneLayout layout;
};
struct ps_cloud {
  procscene::PointCloud cloud;
};

namespace {

namespace pp = procscene::pipeline;
namespace pio = procscene::io;

thread_local std::string g_last_error;

ps_status fail(ps_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
ps_status guard(Fn&& fn) {
  try {
    fn();
    return PS_OK;
  } catch (const procscene::Error& e) {
    return fail(static_cast<ps_status>(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PS_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw procscene::Error(procscene::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

procscene::Box3 to_box(const ps_box3& b) {
  return {{b.center[0], b.center[1], b.center[2]}, {b.size[0], b.size[1], b.size[2]}, b.heading};
}

procscene::GenConfig config_or_default(const char* path) {
  return path ? pio::load_gen_config(path) : procscene::default_gen_config();
}

std::string opt(const char* s, const char* fallback) { return s ? s : fallback; }

}  // namespace

extern "C" {

const char* ps_last_error(void) { return g_last_error.c_str(); }

const char* ps_status_name(ps_status status) {
  switch (status) {
    case PS_OK: return "ok";
    case PS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PS_ERR_DEGENERATE: return "degenerate input";
    case PS_ERR_IO: return "i/o error";
    case PS_ERR_FORMAT: return "malformed file";
    case PS_ERR_INVARIANT: return "invariant violation";
    case PS_ERR_NOT_FOUND: return "not found";
    case PS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ps_version(void) { return "0.1.0"; }

void ps_string_free(char* s) { std::free(s); }

ps_status ps_iou3d(const ps_box3* a, const ps_box3* b, double* out) {
  return guard([&] {
    require(a && b && out, "null argument");
    *out = procscene::iou3d(to_box(*a), to_box(*b));
  });
}

// --- config ----------------------------------------------------------------

ps_status ps_config_default(ps_config** out) {
  return guard([&] {
    require(out, "null argument");
    *out = new ps_config{procscene::default_gen_config()};
  });
}

ps_status ps_config_load(const char* path, ps_config** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new ps_config{pio::load_gen_config(path)};
  });
}

ps_status ps_config_to_json(const ps_config* cfg, char** out) {
  return guard([&] {
    require(cfg && out, "null argument");
    *out = dup_string(pio::gen_config_to_json(cfg->cfg));
  });
}

void ps_config_free(ps_config* cfg) { delete cfg; }

// --- scenes ----------------------------------------------------------------

ps_status ps_scene_generate(const ps_config* cfg, uint64_t seed, ps_scene** out) {
  return guard([&] {
    require(cfg && out, "null argument");
    cfg->cfg.validate();
    *out = new ps_scene{procscene::generate_scene(seed, cfg->cfg)};
  });
}

size_t ps_scene_object_count(const ps_scene* scene) {
  return scene ? scene->layout.objects.size() : 0;
}

ps_status ps_scene_object_box(const ps_scene* scene, size_t index, ps_box3* out) {
  return guard([&] {
    require(scene && out, "null argument");
    require(index < scene->layout.objects.size(), "object index out of range");
    const procscene::Box3& b = scene->layout.objects[index].box;
    *out = ps_box3{{b.center.x, b.center.y, b.center.z}, {b.size.x, b.size.y, b.size.z}, b.heading};
  });
}

ps_status ps_scene_object_category(const ps_scene* scene, size_t index, const char** out) {
  return guard([&] {
    require(scene && out, "null argument");
    require(index < scene->layout.objects.size(), "object index out of range");
    *out = scene->layout.objects[index].category.c_str();
  });
}

ps_status ps_scene_annotation_json(const ps_scene* scene, char** out) {
  return guard([&] {
    require(scene && out, "null argument");
    *out = dup_string(pio::annotation_to_json(procscene::annotate(scene->layout)));
  });
}

void ps_scene_free(ps_scene* scene) { delete scene; }

// --- clouds ------------------------------------------------------------------

ps_status ps_scene_sample_cloud(const ps_scene* scene, size_t points, double density,
                                uint64_t seed, ps_cloud** out) {
  return guard([&] {
    require(scene && out, "null argument");
    require(points > 0 && density > 0.0, "points and density must be positive");
    procscene::SamplerConfig scfg;
    scfg.points_per_scene = points;
    scfg.points_per_m2 = density;
    procscene::Rng rng(seed);
    auto cloud = procscene::sample_scene_cloud(scene->layout.combined_mesh(), scfg, rng);
    *out = new ps_cloud{procscene::compute_height(std::move(cloud))};
  });
}

ps_status ps_cloud_read(const char* path, ps_cloud** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new ps_cloud{pio::read_pointcloud(path)};
  });
}

ps_status ps_cloud_write(const ps_cloud* cloud, const char* path) {
  return guard([&] {
    require(cloud && path, "null argument");
    pio::write_pointcloud(path, cloud->cloud);
  });
}

size_t ps_cloud_size(const ps_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

ps_status ps_cloud_positions(const ps_cloud* cloud, double* xyz) {
  return guard([&] {
    require(cloud && (xyz || cloud->cloud.empty()), "null argument");
    for (std::size_t i = 0; i < cloud->cloud.size(); ++i) {
      const procscene::Vec3& p = cloud->cloud.positions[i];
      xyz[3 * i] = p.x;
      xyz[3 * i + 1] = p.y;
      xyz[3 * i + 2] = p.z;
    }
  });
}

void ps_cloud_free(ps_cloud* cloud) { delete cloud; }

// --- pipelines ---------------------------------------------------------------

void ps_generate_options_init(ps_generate_options* o) {
  if (o) *o = ps_generate_options{nullptr, 0, 0, nullptr, 0};
}

ps_status ps_generate(const ps_generate_options* o) {
  return guard([&] {
    require(o && o->out_dir, "generate needs an output directory");
    pp::generate(config_or_default(o->config_path), o->scenes, o->seed, o->out_dir, o->threads);
  });
}

void ps_library_options_init(ps_library_options* o) {
  if (o) *o = ps_library_options{nullptr, procscene::kStyleAlpha, 64, 0, nullptr};
}

ps_status ps_make_library(const ps_library_options* o) {
  return guard([&] {
    require(o && o->out_dir && o->style, "make-library needs a style and an output directory");
    pp::make_library(config_or_default(o->config_path), o->style, o->per_category, o->seed,
                     o->out_dir);
  });
}

void ps_swap_options_init(ps_swap_options* o) {
  if (o) *o = ps_swap_options{nullptr, nullptr, 0.3, 0, nullptr, 0};
}

ps_status ps_swap(const ps_swap_options* o) {
  return guard([&] {
    require(o && o->in_dir && o->library_dir && o->out_dir, "swap needs in, library and out");
    pp::swap_dataset(o->in_dir, o->library_dir, o->tolerance, o->seed, o->out_dir, o->threads);
  });
}

void ps_pointcloud_options_init(ps_pointcloud_options* o) {
  if (!o) return;
  const procscene::VssConfig v;
  *o = ps_pointcloud_options{nullptr, 40000, 500.0, 0, 0, v.n_cameras, v.noise_sigma,
                             nullptr, 0, 0};
}

ps_status ps_pointcloud(const ps_pointcloud_options* o) {
  return guard([&] {
    require(o && o->in_dir, "pointcloud needs an input directory");
    pp::CloudOptions c;
    c.points = o->points;
    c.density = o->density;
    c.seed = o->seed;
    c.vss = o->vss != 0;
    c.vss_cfg.n_cameras = o->cameras;
    c.vss_cfg.noise_sigma = o->sigma;
    if (o->out_dir) c.out = o->out_dir;
    c.ply = o->ply != 0;
    pp::pointcloud(o->in_dir, c, o->threads);
  });
}

ps_status ps_stats(const char* in_dir, const char* format, char** out) {
  return guard([&] {
    require(in_dir && out, "null argument");
    *out = dup_string(pp::stats(in_dir, opt(format, "table")));
  });
}

ps_status ps_fit(const char* in_dir, const char* out_path) {
  return guard([&] {
    require(in_dir && out_path, "fit needs in and out");
    pio::write_text(out_path, pio::model_to_json(pp::fit(in_dir)));
  });
}

void ps_detect_options_init(ps_detect_options* o) {
  if (o) *o = ps_detect_options{nullptr, nullptr, nullptr, "eval", nullptr, 0};
}

ps_status ps_detect(const ps_detect_options* o) {
  return guard([&] {
    require(o && o->in_dir && o->model_path && o->out_path, "detect needs in, model and out");
    const pp::Dataset ds = pp::Dataset::open(o->in_dir);
    const auto model = pio::model_from_json(pio::read_text(o->model_path));
    procscene::EvalConfig ecfg;
    if (o->eval_config_path) ecfg = pio::eval_config_from_json(pio::read_text(o->eval_config_path));
    const auto preds = pp::detect(ds, ds.split(opt(o->split, "eval")), model, ecfg, o->threads);
    // The dataset is recorded relative to the predictions file when possible.
    const std::filesystem::path out = o->out_path;
    const auto base = std::filesystem::absolute(out).parent_path();
    const auto rel = std::filesystem::relative(std::filesystem::absolute(o->in_dir), base);
    const std::string ref = rel.empty() ? std::filesystem::absolute(o->in_dir).string()
                                        : rel.generic_string();
    pio::write_text(out, pio::predictions_to_json(preds, ref, true));
  });
}

void ps_eval_options_init(ps_eval_options* o) {
  if (o) *o = ps_eval_options{nullptr, nullptr, 0.25, nullptr, "eval", "table", nullptr};
}

ps_status ps_eval(const ps_eval_options* o, char** report) {
  return guard([&] {
    require(o && o->pred_path && o->gt_dir && report, "eval needs pred and gt");
    const auto preds = pio::predictions_from_json(pio::read_text(o->pred_path));
    const pp::Dataset gt = pp::Dataset::open(o->gt_dir);
    std::vector<std::string> cats;
    if (o->categories_path) {
      cats = pio::parse_category_list(pio::read_text(o->categories_path));
      require(!cats.empty(), "category file lists no categories");
    }
    procscene::EvalConfig cfg;
    cfg.iou_threshold = o->iou;
    const auto outcome = pp::evaluate(preds, gt, opt(o->split, "eval"), cats, cfg);
    if (o->out_path) pio::write_text(o->out_path, pp::format_report(outcome.report, "json"));
    *report = dup_string(pp::format_report(outcome.report, opt(o->format, "table")));
  });
}

ps_status ps_fewshot(const char* in_dir, size_t k, uint64_t seed, char** out) {
  return guard([&] {
    require(in_dir && out, "null argument");
    std::string text;
    for (const auto& id : pp::fewshot(in_dir, k, seed)) text += id + "\n";
    *out = dup_string(text);
  });
}

void ps_cache_options_init(ps_cache_options* o) {
  if (o) *o = ps_cache_options{nullptr, nullptr, nullptr, "train", 0};
}

ps_status ps_cache(const ps_cache_options* o) {
  return guard([&] {
    require(o && o->in_dir && o->model_path && o->out_path, "cache needs in, model and out");
    const pp::Dataset ds = pp::Dataset::open(o->in_dir);
    const auto model = pio::model_from_json(pio::read_text(o->model_path));
    const auto cache = pp::build_cache(ds, ds.split(opt(o->split, "train")), model,
                                       procscene::EvalConfig{}, o->threads);
    pio::write_bytes(o->out_path, pio::encode_feature_cache(cache));
  });
}

void ps_pseudolabel_options_init(ps_pseudolabel_options* o) {
  if (!o) return;
  const procscene::AdaptConfig a;
  *o = ps_pseudolabel_options{nullptr, nullptr, a.top_k, a.agreement, a.confidence, nullptr, 0};
}

ps_status ps_pseudolabel(const ps_pseudolabel_options* o) {
  return guard([&] {
    require(o && o->pred_path && o->out_dir, "pseudolabel needs pred and out");
    procscene::AdaptConfig a;
    a.top_k = o->top_k;
    a.agreement = o->agreement;
    a.confidence = o->confidence;
    procscene::FeatureCache cache;
    if (o->cache_path) cache = pio::decode_feature_cache(pio::read_bytes(o->cache_path));
    pp::pseudolabel(o->pred_path, o->cache_path ? &cache : nullptr, procscene::EvalConfig{}, a,
                    o->out_dir, o->threads);
  });
}

ps_status ps_benchmark(const char* recipe_path, const char* format, unsigned threads,
                       char** report) {
  return guard([&] {
    require(recipe_path && report, "null argument");
    const auto recipe = pp::load_recipe(recipe_path);
    const auto result = pp::benchmark(recipe, threads);
    *report = dup_string(pp::format_report(result.report, opt(format, "table")));
  });
}

}  // extern "C"

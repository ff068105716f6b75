// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library only through procscene.h.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "procscene/procscene.h"

namespace {

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

int report(ps_status status, const char* command) {
  if (status == PS_OK) return 0;
  std::fprintf(stderr, "procscene %s: %s: %s\n", command, ps_status_name(status),
               one_line(ps_last_error()).c_str());
  return status == PS_ERR_INTERNAL ? 70 : 1;
}

int print_owned(ps_status status, char* text, const char* command) {
  if (status != PS_OK) return report(status, command);
  std::fputs(text, stdout);
  ps_string_free(text);
  return 0;
}

const char* c_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural indoor scene datasets and detection benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.set_version_flag("--version", ps_version());

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a dataset of procedural scenes");
  std::string gen_config, gen_out;
  std::size_t gen_scenes = 0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--config", gen_config, "Generation config JSON")->check(CLI::ExistingFile);
  gen->add_option("--scenes", gen_scenes, "Scene count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Dataset seed")->required();
  gen->add_option("--out", gen_out, "Output dataset directory")->required();

  // make-library
  auto* lib = app.add_subcommand("make-library", "Build a procedural instance library");
  std::string lib_config, lib_style = "beta", lib_out;
  std::size_t lib_per = 64;
  std::uint64_t lib_seed = 0;
  lib->add_option("--config", lib_config, "Generation config JSON")->check(CLI::ExistingFile);
  lib->add_option("--style", lib_style, "Asset style")
      ->check(CLI::IsMember({"alpha", "beta"}))
      ->capture_default_str();
  lib->add_option("--per-category", lib_per, "Assets per category")->capture_default_str();
  lib->add_option("--seed", lib_seed, "Library seed")->required();
  lib->add_option("--out", lib_out, "Output library directory")->required();

  // swap
  auto* sw = app.add_subcommand("swap", "Replace object meshes with library instances");
  ps_swap_options swap_opts;
  ps_swap_options_init(&swap_opts);
  std::string sw_in, sw_lib, sw_out;
  sw->add_option("--in", sw_in, "Input dataset")->required();
  sw->add_option("--library", sw_lib, "Instance library directory")->required();
  sw->add_option("--tolerance", swap_opts.tolerance, "Per-axis size tolerance")
      ->capture_default_str();
  sw->add_option("--seed", swap_opts.seed, "Swap seed")->required();
  sw->add_option("--out", sw_out, "Output dataset directory")->required();

  // pointcloud
  auto* pc = app.add_subcommand("pointcloud", "Sample point clouds for every scene");
  ps_pointcloud_options pc_opts;
  ps_pointcloud_options_init(&pc_opts);
  std::string pc_in, pc_out;
  bool pc_vss = false, pc_ply = false;
  pc->add_option("--in", pc_in, "Dataset directory")->required();
  pc->add_option("--points", pc_opts.points, "Points per scene")->capture_default_str();
  pc->add_option("--density", pc_opts.density, "Raw samples per square metre")
      ->capture_default_str();
  pc->add_option("--seed", pc_opts.seed, "Sampling seed")->required();
  pc->add_flag("--vss", pc_vss, "Apply occlusion and jitter");
  pc->add_option("--cameras", pc_opts.cameras, "Virtual cameras for --vss")->capture_default_str();
  pc->add_option("--sigma", pc_opts.sigma, "Jitter sigma for --vss, m")->capture_default_str();
  pc->add_option("--out", pc_out, "Write a copy of the dataset with clouds here");
  pc->add_flag("--ply", pc_ply, "Also write PLY files");

  // stats
  auto* st = app.add_subcommand("stats", "Dataset statistics");
  std::string st_in, st_format = "table";
  st->add_option("--in", st_in, "Dataset directory")->required();
  st->add_option("--format", st_format, "Output format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  // detect
  auto* det = app.add_subcommand("detect", "Run the naive detector");
  ps_detect_options det_opts;
  ps_detect_options_init(&det_opts);
  std::string det_in, det_model, det_out, det_split = "eval", det_eval;
  det->add_option("--in", det_in, "Dataset directory")->required();
  det->add_option("--model", det_model, "Model JSON")->required();
  det->add_option("--out", det_out, "Predictions JSON")->required();
  det->add_option("--split", det_split, "Scenes to process")
      ->check(CLI::IsMember({"train", "eval", "all"}))
      ->capture_default_str();
  det->add_option("--eval-config", det_eval, "Post-processing thresholds JSON");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the naive detector on the training split");
  std::string fit_in, fit_out;
  fit->add_option("--in", fit_in, "Dataset directory")->required();
  fit->add_option("--out", fit_out, "Model JSON")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  ps_eval_options ev_opts;
  ps_eval_options_init(&ev_opts);
  std::string ev_pred, ev_gt, ev_cats, ev_split = "eval", ev_format = "table", ev_out;
  ev->add_option("--pred", ev_pred, "Predictions JSON")->required();
  ev->add_option("--gt", ev_gt, "Ground-truth dataset")->required();
  ev->add_option("--iou", ev_opts.iou, "IoU match threshold")->capture_default_str();
  ev->add_option("--categories", ev_cats, "Category list file");
  ev->add_option("--split", ev_split, "Ground-truth split")
      ->check(CLI::IsMember({"train", "eval", "all"}))
      ->capture_default_str();
  ev->add_option("--format", ev_format, "Output format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  ev->add_option("--out", ev_out, "Also write the JSON report here");

  // fewshot
  auto* fs = app.add_subcommand("fewshot", "Pick labeled target scenes");
  std::string fs_in, fs_out;
  std::size_t fs_k = 10;
  std::uint64_t fs_seed = 0;
  fs->add_option("--in", fs_in, "Dataset directory")->required();
  fs->add_option("--k", fs_k, "Scenes to pick")->required()->check(CLI::PositiveNumber);
  fs->add_option("--seed", fs_seed, "Selection seed")->required();
  fs->add_option("--out", fs_out, "Write the ids here instead of stdout");

  // cache
  auto* ca = app.add_subcommand("cache", "Build a source feature cache");
  ps_cache_options ca_opts;
  ps_cache_options_init(&ca_opts);
  std::string ca_in, ca_model, ca_out, ca_split = "train";
  ca->add_option("--in", ca_in, "Source dataset directory")->required();
  ca->add_option("--model", ca_model, "Model JSON")->required();
  ca->add_option("--out", ca_out, "Cache file")->required();
  ca->add_option("--split", ca_split, "Scenes to process")
      ->check(CLI::IsMember({"train", "eval", "all"}))
      ->capture_default_str();

  // pseudolabel
  auto* pl = app.add_subcommand("pseudolabel", "Turn predictions into pseudo labels");
  ps_pseudolabel_options pl_opts;
  ps_pseudolabel_options_init(&pl_opts);
  std::string pl_pred, pl_cache, pl_out;
  pl->add_option("--pred", pl_pred, "Predictions JSON with features")->required();
  pl->add_option("--cache", pl_cache, "Feature cache (omit to skip voting)");
  pl->add_option("--topk", pl_opts.top_k, "Neighbours per vote")->capture_default_str();
  pl->add_option("--agree", pl_opts.agreement, "Agreement threshold")->capture_default_str();
  pl->add_option("--conf", pl_opts.confidence, "Confidence threshold")->capture_default_str();
  pl->add_option("--out", pl_out, "Output dataset directory")->required();

  // benchmark
  auto* bm = app.add_subcommand("benchmark", "Fit, adapt and evaluate from a recipe");
  std::string bm_recipe, bm_format = "table";
  bm->add_option("--recipe", bm_recipe, "Recipe JSON")->required();
  bm->add_option("--format", bm_format, "Output format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "procscene: usage: %s\n", one_line(e.what()).c_str());
    return 2;
  }

  if (gen->parsed()) {
    ps_generate_options o;
    ps_generate_options_init(&o);
    o.config_path = c_or_null(gen_config);
    o.scenes = gen_scenes;
    o.seed = gen_seed;
    o.out_dir = gen_out.c_str();
    o.threads = threads;
    return report(ps_generate(&o), "generate");
  }
  if (lib->parsed()) {
    ps_library_options o;
    ps_library_options_init(&o);
    o.config_path = c_or_null(lib_config);
    o.style = lib_style.c_str();
    o.per_category = lib_per;
    o.seed = lib_seed;
    o.out_dir = lib_out.c_str();
    return report(ps_make_library(&o), "make-library");
  }
  if (sw->parsed()) {
    swap_opts.in_dir = sw_in.c_str();
    swap_opts.library_dir = sw_lib.c_str();
    swap_opts.out_dir = sw_out.c_str();
    swap_opts.threads = threads;
    return report(ps_swap(&swap_opts), "swap");
  }
  if (pc->parsed()) {
    pc_opts.in_dir = pc_in.c_str();
    pc_opts.vss = pc_vss ? 1 : 0;
    pc_opts.ply = pc_ply ? 1 : 0;
    pc_opts.out_dir = c_or_null(pc_out);
    pc_opts.threads = threads;
    return report(ps_pointcloud(&pc_opts), "pointcloud");
  }
  if (st->parsed()) {
    char* text = nullptr;
    const ps_status status = ps_stats(st_in.c_str(), st_format.c_str(), &text);
    return print_owned(status, text, "stats");
  }
  if (det->parsed()) {
    det_opts.in_dir = det_in.c_str();
    det_opts.model_path = det_model.c_str();
    det_opts.out_path = det_out.c_str();
    det_opts.split = det_split.c_str();
    det_opts.eval_config_path = c_or_null(det_eval);
    det_opts.threads = threads;
    return report(ps_detect(&det_opts), "detect");
  }
  if (fit->parsed()) {
    return report(ps_fit(fit_in.c_str(), fit_out.c_str()), "fit");
  }
  if (ev->parsed()) {
    ev_opts.pred_path = ev_pred.c_str();
    ev_opts.gt_dir = ev_gt.c_str();
    ev_opts.categories_path = c_or_null(ev_cats);
    ev_opts.split = ev_split.c_str();
    ev_opts.format = ev_format.c_str();
    ev_opts.out_path = c_or_null(ev_out);
    char* text = nullptr;
    const ps_status status = ps_eval(&ev_opts, &text);
    return print_owned(status, text, "eval");
  }
  if (fs->parsed()) {
    char* text = nullptr;
    const ps_status status = ps_fewshot(fs_in.c_str(), fs_k, fs_seed, &text);
    if (status != PS_OK || fs_out.empty()) return print_owned(status, text, "fewshot");
    std::FILE* f = std::fopen(fs_out.c_str(), "wb");
    if (!f) {
      ps_string_free(text);
      std::fprintf(stderr, "procscene fewshot: i/o error: cannot write '%s'\n", fs_out.c_str());
      return 1;
    }
    std::fputs(text, f);
    std::fclose(f);
    ps_string_free(text);
    return 0;
  }
  if (ca->parsed()) {
    ca_opts.in_dir = ca_in.c_str();
    ca_opts.model_path = ca_model.c_str();
    ca_opts.out_path = ca_out.c_str();
    ca_opts.split = ca_split.c_str();
    ca_opts.threads = threads;
    return report(ps_cache(&ca_opts), "cache");
  }
  if (pl->parsed()) {
    pl_opts.pred_path = pl_pred.c_str();
    pl_opts.cache_path = c_or_null(pl_cache);
    pl_opts.out_dir = pl_out.c_str();
    pl_opts.threads = threads;
    return report(ps_pseudolabel(&pl_opts), "pseudolabel");
  }
  if (bm->parsed()) {
    char* text = nullptr;
    const ps_status status = ps_benchmark(bm_recipe.c_str(), bm_format.c_str(), threads, &text);
    return print_owned(status, text, "benchmark");
  }
  return 2;
}

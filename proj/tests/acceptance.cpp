// Acceptance gate: one PASS/FAIL line per criterion.
// usage: acceptance <path-to-procscene-cli> <scratch-dir>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "procscene/adapt.hpp"
#include "procscene/annotation.hpp"
#include "procscene/eval.hpp"
#include "procscene/instance_swap.hpp"
#include "procscene/io.hpp"
#include "procscene/pipeline.hpp"
#include "procscene/sampling.hpp"
#include "procscene/vss.hpp"
#include "scene_oracle.hpp"

using namespace procscene;
namespace fs = std::filesystem;
namespace pp = procscene::pipeline;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... A>
std::string fmt(const char* f, A... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Box3 random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-0.6, 0.6), s(0.2, 1.5), h(-4.0, 4.0);
  return {{c(rng), c(rng), c(rng) * 0.5}, {s(rng), s(rng), s(rng)}, h(rng)};
}

// ---------------------------------------------------------------------------

Outcome iou_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t overlapping = 0;
  for (int i = 0; i < 1000; ++i) {
    const Box3 a = random_box(rng);
    const Box3 b = random_box(rng);
    const double exact = iou3d(a, b);
    worst = std::max(worst, std::abs(exact - oracle::monte_carlo_iou(a, b, rng)));
    overlapping += exact > 0.0;
  }
  const double t = seconds_since(t0);
  return {worst <= 0.01 && t < 30.0 && overlapping > 500,
          fmt("max |iou3d - MC| = %.4f over 1000 pairs (%zu overlapping), %.1f s", worst,
              overlapping, t)};
}

Outcome nms_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  std::size_t mismatches = 0, with_ties = 0;
  for (int set = 0; set < 1000; ++set) {
    const int n = std::uniform_int_distribution<int>(1, 50)(rng);
    std::vector<Detection> dets;
    std::set<double> scores;
    bool tie = false;
    for (int i = 0; i < n; ++i) {
      Detection d;
      d.box = random_box(rng);
      d.box.center.x *= 3;
      d.box.center.y *= 3;
      // Coarse scores on half the sets force ties.
      const double u = std::uniform_real_distribution<double>(0, 1)(rng);
      d.score = set % 2 ? std::round(u * 5) / 5 : u;
      d.category = std::uniform_int_distribution<int>(0, 1)(rng) ? "a" : "b";
      tie = tie || !scores.insert(d.score).second;
      dets.push_back(d);
    }
    with_ties += tie;
    const bool aware = set % 3 == 0;
    if (nms_3d_indices(dets, 0.25, aware) != oracle::brute_nms(dets, 0.25, aware)) ++mismatches;
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && t < 10.0 && with_ties > 0,
          fmt("%zu mismatches on 1000 sets (%zu with score ties), %.2f s", mismatches, with_ties,
              t)};
}

SceneAnnotation cubes(const std::string& id, const std::vector<double>& xs) {
  SceneAnnotation s;
  s.scene_id = id;
  int n = 0;
  for (double x : xs) s.objects.push_back({n++, "chair", {{x, 0, 0.5}, {1, 1, 1}, 0.0}});
  return s;
}

Detection cube_det(double x, double score, double side = 1.0) {
  return {{{x, 0, 0.5}, {side, side, side}, 0.0}, "chair", score};
}

Outcome ap_fixtures() {
  Outcome o;
  std::vector<std::string> notes;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) {
      o.pass = false;
      notes.push_back(what);
    }
  };
  const std::vector<SceneAnnotation> gt{cubes("s", {0, 5})};
  const double half = *average_precision({{"s", {cube_det(0, 0.9), cube_det(20, 0.8)}}}, gt, "chair", 0.25);
  const double full = *average_precision({{"s", {cube_det(0, 0.9), cube_det(5, 0.8)}}}, gt, "chair", 0.25);
  const double none = *average_precision({}, gt, "chair", 0.25);
  expect(std::abs(half - 0.5) <= 1e-9, "[hit, miss] AP");
  expect(std::abs(full - 1.0) <= 1e-9, "all-hit AP");
  expect(std::abs(none - 0.0) <= 1e-9, "no-detection AP");

  EvalConfig cfg;
  expect(cfg.min_points == 5 && cfg.min_side == 0.001 && cfg.nms_iou == 0.25 &&
             cfg.iou_threshold == 0.25,
         "defaults");
  std::vector<Vec3> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({0.1 * i - 0.2, 0, 0.5});
  for (int i = 0; i < 4; ++i) pts.push_back({5 + 0.1 * i, 0, 0.5});
  // 5 points kept, 4 points dropped.
  const std::vector<Detection> counts{cube_det(0, 0.5), cube_det(5, 0.9)};
  expect(postprocess_indices(counts, pts, cfg) == std::vector<std::size_t>{0}, "point filter");
  // Side 0.0005 dropped, 0.001 kept.
  Detection thin = cube_det(0, 0.9);
  thin.box.size.z = 0.0005;
  Detection ok = cube_det(0, 0.8);
  ok.box.size.z = 0.001;
  expect(postprocess_indices(std::vector<Detection>{thin, ok}, pts, cfg) ==
             std::vector<std::size_t>{1},
         "side filter");
  // NMS at 0.25: IoU 1/3 suppressed; IoU 0.2 kept.
  std::vector<Vec3> line;
  for (int i = 0; i < 60; ++i) line.push_back({0.05 * i - 0.5, 0, 0.5});
  const std::vector<Detection> third{cube_det(0, 0.9), cube_det(0.5, 0.8)};
  const std::vector<Detection> fifth{cube_det(0, 0.9), cube_det(2.0 / 3.0, 0.8)};
  expect(postprocess_indices(third, line, cfg).size() == 1, "NMS suppression");
  expect(postprocess_indices(fifth, line, cfg).size() == 2, "NMS keep");
  // Match threshold: IoU 1/3 is a hit, 0.2 a miss.
  const std::vector<SceneAnnotation> one{cubes("s", {0})};
  expect(evaluate_category({{"s", {cube_det(0.5, 0.9)}}}, one, "chair", 0.25).tp == 1,
         "IoU 1/3 match");
  expect(evaluate_category({{"s", {cube_det(2.0 / 3.0, 0.9)}}}, one, "chair", 0.25).tp == 0,
         "IoU 0.2 miss");

  std::string joined;
  for (const auto& n : notes) joined += (joined.empty() ? "" : ", ") + n;
  o.detail = o.pass ? std::string("AP 0.5, 1.0 and 0.0 exact; 5-point, 0.001 m and 0.25 IoU thresholds hold")
                    : "failed: " + joined;
  return o;
}

Outcome sampling_uniformity() {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {2, 0, 0}, {5, 0, 0}, {2, 2, 0}};
  m.faces = {{0, 1, 2}, {3, 4, 5}};
  double worst_p = 1.0;
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const PointCloud c = sample_mesh_surface(m, 40000, rng);
    double first = 0;
    for (const auto& p : c.positions) first += p.x < 1.5 ? 1 : 0;
    const double p = oracle::chi2_sf_1dof(oracle::chi2_stat({first, 40000 - first}, {10000, 30000}));
    worst_p = std::min(worst_p, p);
    passed += p > 0.001;
  }
  return {passed == 20, fmt("%d/20 seeds pass, smallest p = %.4f", passed, worst_p)};
}

Outcome generation(const fs::path& scratch) {
  const GenConfig cfg = default_gen_config();
  const auto t0 = Clock::now();
  pp::generate(cfg, 100, 1, scratch / "gen100", 1);
  const double t100 = seconds_since(t0);

  std::size_t bad = 0, boxes = 0;
  std::string first_bad;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const SceneLayout s = generate_scene(seed, cfg);
    std::string why = oracle::scene_violation(s, 1e-4);
    if (why.empty()) why = check_scene_invariants(s);
    if (!why.empty()) {
      if (first_bad.empty()) first_bad = fmt("seed %llu: ", (unsigned long long)seed) + why;
      ++bad;
    }
    boxes += annotate(s).objects.size();
  }
  const double mean = static_cast<double>(boxes) / 1000.0;
  const bool ok = t100 < 60.0 && bad == 0 && std::abs(mean - 23.8) <= 0.15 * 23.8;
  return {ok, fmt("100 scenes in %.2f s (1 thread); %zu/1000 seeds violate invariants; "
                  "%.2f boxes/scene (target 23.8 +/- 15%%)",
                  t100, bad, mean) +
                  (first_bad.empty() ? "" : "; " + first_bad)};
}

Vec3 frame_extent(const TriMesh& mesh, const Box3& box) {
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  const double c = std::cos(box.heading), s = std::sin(box.heading);
  for (const auto& v : mesh.vertices) {
    const Vec3 d = v - box.center;
    const Vec3 l{c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], l[k]);
      hi[k] = std::max(hi[k], l[k]);
    }
  }
  return hi - lo;
}

Outcome swap_fidelity(const fs::path& scratch) {
  const GenConfig cfg = default_gen_config();
  const fs::path src = scratch / "swap_src", lib_dir = scratch / "swap_lib",
                 dst = scratch / "swap_dst";
  pp::generate(cfg, 20, 6, src, 0);
  const pp::Dataset in = pp::Dataset::open(src);

  // Full coverage: one beta asset at every instance's exact size.
  InstanceLibrary lib;
  Rng arng(6);
  for (const auto& id : in.manifest.all_ids()) {
    for (const auto& o : io::read_scene_annotation(in.annotation_path(id)).objects) {
      LibraryEntry e;
      e.category = o.category;
      e.name = id + "_" + std::to_string(o.instance_id);
      e.mesh = synth_asset(*cfg.find(o.category), o.box.size, kStyleBeta, arng);
      e.dims = mesh_aabb(e.mesh).extent();
      lib.entries.push_back(std::move(e));
    }
  }
  io::write_library(lib_dir, lib);
  pp::swap_dataset(src, lib_dir, 0.3, 6, dst, 0);

  const pp::Dataset out = pp::Dataset::open(dst);
  std::size_t differing = 0, objects = 0, kept = 0;
  double worst = 0.0;
  for (const auto& id : in.manifest.all_ids()) {
    if (io::read_bytes(in.annotation_path(id)) != io::read_bytes(out.annotation_path(id))) ++differing;
    const SceneLayout before = in.layout(id);
    const SceneLayout after = out.layout(id);
    for (std::size_t i = 0; i < after.objects.size(); ++i) {
      const auto& o = after.objects[i];
      ++objects;
      if (o.mesh.vertices == before.objects[i].mesh.vertices) ++kept;
      const Vec3 ext = frame_extent(o.mesh, o.box);
      for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(ext[k] - o.box.size[k]));
    }
  }
  return {differing == 0 && kept == 0 && worst <= 1e-4 && objects > 0,
          fmt("%zu/20 annotation files differ; %zu/%zu meshes unswapped; worst extent error %.2e m",
              differing, kept, objects, worst)};
}

PointCloud cloud_of(const std::vector<Vec3>& pts) {
  PointCloud c;
  for (const auto& p : pts) {
    c.positions.push_back(p);
    c.colors.push_back({0.5, 0.5, 0.5});
  }
  return c;
}

Outcome vss_behavior() {
  std::vector<std::string> notes;
  VssConfig cfg;
  cfg.noise_sigma = 0.0;

  // Identity: a floor grid seen straight down, every point in view at equal depth.
  std::vector<Vec3> grid;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) grid.push_back({-0.8 + 0.04 * i, -0.8 + 0.04 * j, 0});
  Camera down;
  down.position = {0, 0, 1};
  down.pitch = -std::numbers::pi / 2;
  const PointCloud g = cloud_of(grid);
  Rng rng(1);
  const PointCloud same = jitter_points(simulate_occlusion(g, {down}, cfg), cfg, rng);
  if (same.positions != g.positions) notes.push_back("identity");

  // Fixtures.
  Camera cam;
  cam.position = {0, 0, 1};
  if (simulate_occlusion(cloud_of({{3, 0.03, 1.03}}), {cam}, cfg).size() != 1)
    notes.push_back("single visible point");
  const PointCloud pair = cloud_of({{4, 0.04, 1.04}, {3, 0.03, 1.03}});
  const PointCloud front = simulate_occlusion(pair, {cam}, cfg);
  if (front.size() != 1 || !(front.positions[0] == pair.positions[1]))
    notes.push_back("occluded far point");
  if (!simulate_occlusion(cloud_of({{-3, 0, 1}, {1, 5, 1}}), {cam}, cfg).empty())
    notes.push_back("out-of-frustum points");

  // Monotonicity under added cameras.
  std::size_t violations = 0, single_hides = 0;
  const GenConfig gen = default_gen_config();
  VssConfig real;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SceneLayout scene = generate_scene(seed, gen);
    Rng r(seed);
    const PointCloud c = sample_mesh_surface(scene.combined_mesh(), 5000, r);
    const auto cams = sample_cameras(scene.room, real, r);
    std::vector<bool> seen(c.size(), false);
    std::size_t prev = 0;
    for (std::size_t k = 0; k < cams.size(); ++k) {
      const std::vector<Camera> subset(cams.begin(), cams.begin() + static_cast<long>(k) + 1);
      const PointCloud kept = simulate_occlusion(c, subset, real);
      const auto mask = visible_from(c, cams[k], real.depth_tolerance);
      std::size_t now = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        seen[i] = seen[i] || mask[i];
        now += seen[i];
      }
      if (kept.size() != now || now < prev) ++violations;
      if (k == 0 && now < c.size()) ++single_hides;
      prev = now;
    }
  }
  if (violations) notes.push_back(fmt("%zu monotonicity violations", violations));
  std::string joined;
  for (const auto& n : notes) joined += (joined.empty() ? "" : ", ") + n;
  return {notes.empty(),
          notes.empty() ? fmt("identity and fixtures exact; kept sets nested on 50 scenes "
                              "(one camera hides points in %zu/50)",
                              single_hides)
                        : "failed: " + joined};
}

Outcome adaptation_math() {
  std::vector<std::string> notes;
  // EMA closed form.
  double worst = 0.0;
  for (double alpha : {0.5, 0.9, 0.99, 0.999}) {
    ParamVector t{0.0, 4.0, -2.5}, s{1.0, -1.0, 0.5};
    const ParamVector t0 = t;
    for (int n = 1; n <= 1000; ++n) {
      t = ema_update(t, s, alpha);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double closed = s[i] + std::pow(alpha, n) * (t0[i] - s[i]);
        worst = std::max(worst, std::abs(t[i] - closed));
      }
    }
  }
  if (worst > 1e-12) notes.push_back(fmt("EMA error %.2e", worst));

  // Top-K vs exhaustive, and theta monotonicity.
  std::mt19937_64 rng(8);
  std::size_t topk_bad = 0, mono_bad = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t dim = 2 + c % 7;
    FeatureCache cache;
    cache.feature_dim = dim;
    const std::size_t n = 1 + static_cast<std::size_t>(c % 60);
    std::uniform_int_distribution<int> q(-2, 2), cat(0, 2);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> f(dim);
      for (auto& v : f) v = c % 2 ? q(rng) : std::normal_distribution<double>()(rng);
      cache.add(std::move(f), "c" + std::to_string(cat(rng)));
    }
    Proposal p;
    p.detection.category = "c1";
    p.feature.assign(dim, 0.0);
    while (std::all_of(p.feature.begin(), p.feature.end(), [](double v) { return v == 0.0; }))
      for (auto& v : p.feature) v = q(rng);
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, n + 1}) {
      if (top_k_similar(p.feature, cache, k) != oracle::exhaustive_top_k(p.feature, cache, k))
        ++topk_bad;
    }
    bool seen_accept = false;
    for (int step = 20; step >= 0; --step) {
      const bool acc = reliable_vote(p, cache, 5, step / 20.0).accepted;
      if (seen_accept && !acc) ++mono_bad;
      seen_accept = seen_accept || acc;
    }
  }
  if (topk_bad) notes.push_back(fmt("%zu top-K mismatches", topk_bad));
  if (mono_bad) notes.push_back(fmt("%zu theta-monotonicity breaks", mono_bad));
  std::string joined;
  for (const auto& n : notes) joined += (joined.empty() ? "" : ", ") + n;
  return {notes.empty(), notes.empty()
                             ? fmt("EMA max error %.1e over 1000 steps; top-K equals exhaustive "
                                   "sort on 1000 caches; acceptance monotone in theta",
                                   worst)
                             : "failed: " + joined};
}

double bench_map(const fs::path& source, const fs::path& target, pp::Method method) {
  pp::Recipe r;
  r.source = source;
  r.target = target;
  r.method = method;
  return pp::benchmark(r, 0).report.map;
}

Outcome domain_gap(const fs::path& scratch) {
  const GenConfig cfg = default_gen_config();
  int gap_b = 0, gap_c = 0, prior_ok = 0, positive = 0;
  std::ostringstream table;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const fs::path base = scratch / ("gap_" + std::to_string(seed));
    const fs::path a = base / "alpha", lib = base / "library", b = base / "beta",
                   c = base / "vss";
    pp::generate(cfg, 100, seed, a, 0);
    pp::make_library(cfg, kStyleBeta, 64, seed, lib);
    pp::swap_dataset(a, lib, 0.3, seed, b, 0);
    pp::CloudOptions clouds;
    clouds.seed = seed;
    pp::pointcloud(a, clouds, 0);
    pp::pointcloud(b, clouds, 0);
    clouds.vss = true;
    clouds.out = c;
    pp::pointcloud(a, clouds, 0);

    const double ma = bench_map(a, a, pp::Method::kSourceOnly);
    const double mb = bench_map(a, b, pp::Method::kSourceOnly);
    const double mc = bench_map(a, c, pp::Method::kSourceOnly);
    const double mb_prior = bench_map(a, b, pp::Method::kSizePrior);
    positive += ma > 0.0;
    gap_b += ma >= mb;
    gap_c += ma >= mc;
    prior_ok += mb_prior >= mb;
    table << fmt(" [%llu] a %.3f b %.3f c %.3f b+size %.3f", (unsigned long long)seed, ma, mb,
                 mc, mb_prior);
    fs::remove_all(base);
  }
  const bool ok = positive == 10 && gap_b >= 8 && gap_c >= 8 && prior_ok >= 8;
  return {ok, fmt("mAP(a)>0 in %d/10, a>=b in %d/10, a>=c in %d/10, size prior keeps b in %d/10, "
                  "%.0f s;",
                  positive, gap_b, gap_c, prior_ok, seconds_since(t0)) +
                  table.str()};
}

// ---------------------------------------------------------------------------

int run(const std::string& cmd) { return std::system(cmd.c_str()); }

std::map<std::string, std::vector<std::uint8_t>> snapshot(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_bytes(e.path());
  }
  return files;
}

Outcome cli_determinism(const std::string& cli, const fs::path& scratch) {
  const auto t0 = Clock::now();
  auto pipeline = [&](const fs::path& dir, int threads) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string p = "\"" + cli + "\" --threads " + std::to_string(threads) + " ";
    const std::string d = dir.string() + "/";
    const std::vector<std::string> steps{
        p + "generate --scenes 30 --seed 11 --out " + d + "a",
        p + "make-library --style beta --per-category 16 --seed 11 --out " + d + "lib",
        p + "swap --in " + d + "a --library " + d + "lib --seed 11 --out " + d + "b",
        p + "pointcloud --in " + d + "a --points 20000 --seed 11 --ply",
        p + "pointcloud --in " + d + "b --points 20000 --seed 11",
        p + "pointcloud --in " + d + "a --points 20000 --seed 11 --vss --out " + d + "c",
        p + "stats --in " + d + "b --format json > " + d + "stats.json",
        p + "fit --in " + d + "a --out " + d + "model.json",
        p + "detect --in " + d + "c --model " + d + "model.json --out " + d + "pred.json",
        p + "eval --pred " + d + "pred.json --gt " + d + "c --format json --out " + d +
            "report.json > " + d + "eval.txt",
        p + "fewshot --in " + d + "b --k 5 --seed 11 > " + d + "fewshot.txt",
        p + "cache --in " + d + "a --model " + d + "model.json --out " + d + "cache.bin",
        p + "detect --in " + d + "b --split train --model " + d + "model.json --out " + d +
            "pred_train.json",
        p + "pseudolabel --pred " + d + "pred_train.json --cache " + d + "cache.bin --conf 0.3 --out " +
            d + "pseudo",
        p + "benchmark --recipe " + d + "recipe.json --format json > " + d + "bench.json",
    };
    io::write_text(dir / "recipe.json",
                   R"({"source": "a", "target": "b", "method": "reliable_voting", "seed": 11})");
    for (const auto& s : steps) {
      if (run(s + " 2>> " + d + "stderr.txt") != 0) return "step failed: " + s;
    }
    return std::string();
  };
  const fs::path r1 = scratch / "det_t1", r2 = scratch / "det_t4", r3 = scratch / "det_t4_again";
  for (auto [dir, threads] : {std::pair{r1, 1}, std::pair{r2, 4}, std::pair{r3, 4}}) {
    const std::string err = pipeline(dir, threads);
    if (!err.empty()) return {false, err};
  }
  const auto s1 = snapshot(r1), s2 = snapshot(r2), s3 = snapshot(r3);
  std::size_t diff12 = 0, diff23 = 0;
  std::string first;
  for (const auto& [name, bytes] : s1) {
    const auto it = s2.find(name);
    if (it == s2.end() || it->second != bytes) {
      ++diff12;
      if (first.empty()) first = name;
    }
  }
  for (const auto& [name, bytes] : s2) {
    const auto it = s3.find(name);
    if (it == s3.end() || it->second != bytes) ++diff23;
  }
  const bool ok = diff12 == 0 && diff23 == 0 && s1.size() == s2.size() && s2.size() == s3.size();
  std::string detail = fmt("%zu artifacts; %zu differ between 1 and 4 threads, %zu between reruns; "
                           "%.1f s",
                           s1.size(), diff12, diff23, seconds_since(t0));
  if (!first.empty()) detail += "; first difference: " + first;
  if (ok) {
    fs::remove_all(r1);
    fs::remove_all(r2);
    fs::remove_all(r3);
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <procscene-cli> <scratch-dir> [criterion...]\n");
    return 2;
  }
  const std::string cli = fs::absolute(argv[1]).string();
  const fs::path scratch = fs::absolute(argv[2]);
  fs::create_directories(scratch);
  std::set<int> only;
  for (int i = 3; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"IoU vs Monte Carlo", iou_oracle},
      {"NMS vs brute force", nms_oracle},
      {"AP fixtures and post-processing thresholds", ap_fixtures},
      {"sampling uniformity", sampling_uniformity},
      {"generation scale and validity", [&] { return generation(scratch); }},
      {"swap fidelity", [&] { return swap_fidelity(scratch); }},
      {"VSS behavior", vss_behavior},
      {"adaptation math", adaptation_math},
      {"directional domain gap", [&] { return domain_gap(scratch); }},
      {"CLI determinism", [&] { return cli_determinism(cli, scratch); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %-44s %s  %s\n", n, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}

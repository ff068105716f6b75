#include <doctest.h>

#include <cmath>
#include <numbers>

#include "procscene/annotation.hpp"
#include "procscene/error.hpp"
#include "procscene/instance_swap.hpp"
#include "procscene/io.hpp"

using namespace procscene;

namespace {

LibraryEntry entry_of(const std::string& cat, const Vec3& dims) {
  LibraryEntry e;
  e.name = cat;
  e.category = cat;
  e.mesh = make_box_mesh(dims * -0.5, dims * 0.5, Rgb{});
  e.dims = dims;
  return e;
}

// Bounds of `mesh` in the frame of `box`, computed point by point.
Vec3 frame_extent(const TriMesh& mesh, const Box3& box, Vec3* center_offset = nullptr) {
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
  if (center_offset) *center_offset = (lo + hi) * 0.5;
  return hi - lo;
}

}  // namespace

TEST_CASE("candidate retrieval") {
  InstanceLibrary lib;
  lib.entries.push_back(entry_of("table", {1.0, 0.5, 0.8}));
  lib.entries.push_back(entry_of("table", {2.0, 0.5, 0.8}));
  lib.entries.push_back(entry_of("chair", {1.0, 0.5, 0.8}));
  SwapConfig cfg;

  auto c = retrieve_candidates(lib, "table", {1.0, 0.5, 0.8}, cfg);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == SwapCandidate{0, false});

  // Quarter turn: length and width exchanged.
  c = retrieve_candidates(lib, "table", {0.5, 1.0, 0.8}, cfg);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == SwapCandidate{0, true});
  cfg.allow_quarter_turn = false;
  CHECK(retrieve_candidates(lib, "table", {0.5, 1.0, 0.8}, cfg).empty());

  // Band edges at tau = 0.3.
  cfg.allow_quarter_turn = true;
  CHECK(retrieve_candidates(lib, "table", {1.0 / 1.3, 0.5, 0.8}, cfg).size() == 1);
  CHECK(retrieve_candidates(lib, "table", {1.0 / 1.31, 0.5, 0.8}, cfg).empty());
  CHECK(retrieve_candidates(lib, "sofa", {1.0, 0.5, 0.8}, cfg).empty());
}

TEST_CASE("fit_instance") {
  const TriMesh src = make_box_mesh({0, 0, 0}, {2, 1, 1}, Rgb{});
  // Identical dims, heading 0: translation only.
  const Box3 same{{5, 6, 0.5}, {2, 1, 1}, 0};
  const TriMesh moved = fit_instance(src, {2, 1, 1}, same, false);
  for (std::size_t i = 0; i < src.vertices.size(); ++i) {
    const Vec3 d = moved.vertices[i] - src.vertices[i];
    CHECK(d.x == doctest::Approx(4.0));
    CHECK(d.y == doctest::Approx(5.5));
    CHECK(d.z == doctest::Approx(0.0));
  }
  // (2,1,1) into (1,1,1): x halved about the center.
  const TriMesh halved = fit_instance(src, {2, 1, 1}, {{1, 0.5, 0.5}, {1, 1, 1}, 0}, false);
  for (std::size_t i = 0; i < src.vertices.size(); ++i) {
    CHECK(halved.vertices[i].x - 1 == doctest::Approx((src.vertices[i].x - 1) / 2));
  }
  // Arbitrary target, with and without the quarter turn.
  const Box3 target{{1, -2, 0.7}, {0.8, 1.9, 1.4}, 2.1};
  for (bool q : {false, true}) {
    Vec3 off;
    const Vec3 ext = frame_extent(fit_instance(src, {2, 1, 1}, target, q), target, &off);
    CHECK(std::abs(ext.x - 0.8) < 1e-4);
    CHECK(std::abs(ext.y - 1.9) < 1e-4);
    CHECK(std::abs(ext.z - 1.4) < 1e-4);
    CHECK(norm(off) < 1e-9);
  }
  CHECK_THROWS_AS(fit_instance(src, {0, 1, 1}, target, false), Error);
}

TEST_CASE("swap keeps annotations and fits every mesh") {
  const GenConfig cfg = default_gen_config();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SceneLayout scene = generate_scene(seed, cfg);
    // Full coverage: one beta asset at each object's exact size.
    InstanceLibrary lib;
    Rng arng(seed);
    for (const auto& o : scene.objects) {
      LibraryEntry e;
      e.category = o.category;
      e.name = o.category + std::to_string(o.instance_id);
      e.mesh = synth_asset(*cfg.find(o.category), o.box.size, kStyleBeta, arng);
      e.dims = mesh_aabb(e.mesh).extent();
      lib.entries.push_back(std::move(e));
    }
    lib.validate();
    Rng rng(seed);
    const SwapResult r = swap_scene(scene, lib, SwapConfig{}, rng);
    CHECK(r.swapped_ids.size() == scene.objects.size());
    CHECK(r.kept_ids.empty());
    CHECK(io::annotation_to_json(annotate(scene)) == io::annotation_to_json(annotate(r.scene)));
    CHECK(r.scene.room.footprint == scene.room.footprint);
    CHECK(r.scene.structure_mesh.vertices == scene.structure_mesh.vertices);
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
      const auto& o = r.scene.objects[i];
      const Vec3 ext = frame_extent(o.mesh, o.box);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(ext[k] - o.box.size[k]) < 1e-4);
      CHECK_FALSE(o.mesh.colors == scene.objects[i].mesh.colors);
    }
    CHECK(check_scene_invariants(r.scene).empty());
  }
}

TEST_CASE("empty library leaves the scene alone") {
  const SceneLayout scene = generate_scene(4, default_gen_config());
  Rng rng(1);
  const SwapResult r = swap_scene(scene, InstanceLibrary{}, SwapConfig{}, rng);
  CHECK(r.swapped_ids.empty());
  CHECK(r.kept_ids.size() == scene.objects.size());
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    CHECK(r.scene.objects[i].mesh.vertices == scene.objects[i].mesh.vertices);
  }
}

TEST_CASE("swap is deterministic under its seed") {
  const GenConfig cfg = default_gen_config();
  const SceneLayout scene = generate_scene(9, cfg);
  const InstanceLibrary lib = build_procedural_library(cfg, kStyleBeta, 16, 3);
  lib.validate();
  Rng a(5), b(5);
  const SwapResult x = swap_scene(scene, lib, SwapConfig{}, a);
  const SwapResult y = swap_scene(scene, lib, SwapConfig{}, b);
  CHECK(x.swapped_ids == y.swapped_ids);
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    CHECK(x.scene.objects[i].mesh.vertices == y.scene.objects[i].mesh.vertices);
  }
}

TEST_CASE("library validation catches wrong dims") {
  InstanceLibrary lib;
  lib.entries.push_back(entry_of("box", {1, 1, 1}));
  lib.validate();
  lib.entries[0].dims.x = 1.01;
  CHECK_THROWS_AS(lib.validate(), Error);
}

// SPDX-License-Identifier: Apache-2.0
#include "procscene/procgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "procscene/error.hpp"
#include "procscene/parallel.hpp"

namespace procscene {

namespace {

constexpr double kPi = std::numbers::pi;

struct NamedPlacement {
  PlacementClass value;
  const char* name;
};
constexpr NamedPlacement kPlacementNames[] = {
    {PlacementClass::kFloor, "floor"},
    {PlacementClass::kWallMounted, "wall_mounted"},
    {PlacementClass::kSurface, "surface"},
};

struct NamedAsset {
  AssetTemplate value;
  const char* name;
};
constexpr NamedAsset kAssetNames[] = {
    {AssetTemplate::kChair, "chair"},
    {AssetTemplate::kTable, "table"},
    {AssetTemplate::kDesk, "desk"},
    {AssetTemplate::kBed, "bed"},
    {AssetTemplate::kSofa, "sofa"},
    {AssetTemplate::kBookshelf, "bookshelf"},
    {AssetTemplate::kCabinet, "cabinet"},
    {AssetTemplate::kNightstand, "nightstand"},
    {AssetTemplate::kWallCabinet, "wall_cabinet"},
    {AssetTemplate::kWallShelf, "wall_shelf"},
    {AssetTemplate::kLamp, "lamp"},
    {AssetTemplate::kBox, "box"},
};

Box3 inflate_footprint(Box3 box, double margin) {
  box.size.x += margin;
  box.size.y += margin;
  return box;
}

// Positive-volume overlap between `candidate` (footprint grown by
// `clearance`) and `other`. Touching faces do not count.
bool collides(const Box3& candidate, const Box3& other, double clearance) {
  const double lo = std::max(candidate.center.z - 0.5 * candidate.size.z,
                             other.center.z - 0.5 * other.size.z);
  const double hi = std::min(candidate.center.z + 0.5 * candidate.size.z,
                             other.center.z + 0.5 * other.size.z);
  if (hi - lo <= 1e-9) return false;
  return footprint_intersection_area(inflate_footprint(candidate, clearance),
                                     other) > 0.0;
}

bool collides_any(const Box3& candidate, const std::vector<PlacedObject>& a,
                  const std::vector<PlacedObject>& b, double clearance) {
  for (const auto& o : a) {
    if (collides(candidate, o.box, clearance)) return true;
  }
  for (const auto& o : b) {
    if (collides(candidate, o.box, clearance)) return true;
  }
  return false;
}

// Footprint of `inner` lies within the footprint of `outer`.
bool footprint_within(const Box3& inner, const Box3& outer) {
  const double area = inner.size.x * inner.size.y;
  const double overlap = footprint_intersection_area(inner, outer);
  return overlap >= area * (1.0 - 1e-9);
}

Vec3 sample_dims(const CategorySpec& spec, Rng& rng) {
  return {uniform(rng, spec.size_min.x, spec.size_max.x),
          uniform(rng, spec.size_min.y, spec.size_max.y),
          uniform(rng, spec.size_min.z, spec.size_max.z)};
}

struct StageItem {
  std::size_t category = 0;
  Vec3 dims;
};

// Per-category counts clamped to the stage total, dims drawn up front and
// ordered by decreasing footprint so large pieces are placed first.
std::vector<StageItem> draw_stage_items(const GenConfig& cfg,
                                        PlacementClass placement,
                                        IntRange total, Rng& rng) {
  std::vector<std::size_t> eligible;
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < cfg.categories.size(); ++i) {
    const auto& spec = cfg.categories[i];
    if (spec.placement != placement) continue;
    eligible.push_back(i);
    const int n = uniform_int(rng, spec.count_min, spec.count_max);
    for (int k = 0; k < n; ++k) picks.push_back(i);
  }
  for (std::size_t i = picks.size(); i > 1; --i) {
    std::swap(picks[i - 1], picks[uniform_index(rng, i)]);
  }
  if (picks.size() > static_cast<std::size_t>(std::max(total.max, 0))) {
    picks.resize(static_cast<std::size_t>(std::max(total.max, 0)));
  }
  while (!eligible.empty() &&
         picks.size() < static_cast<std::size_t>(std::max(total.min, 0))) {
    picks.push_back(eligible[uniform_index(rng, eligible.size())]);
  }

  std::vector<StageItem> items;
  items.reserve(picks.size());
  for (std::size_t idx : picks) {
    items.push_back({idx, sample_dims(cfg.categories[idx], rng)});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const StageItem& a, const StageItem& b) {
                     return a.dims.x * a.dims.y > b.dims.x * b.dims.y;
                   });
  return items;
}

PlacedObject make_placed(const CategorySpec& spec, const Box3& box,
                         Rng& rng) {
  PlacedObject obj;
  obj.category = spec.name;
  obj.box = box;
  obj.placement = spec.placement;
  obj.mesh = synth_asset(spec, box.size, spec.style, rng);
  transform_mesh(obj.mesh, box.heading, box.center);
  return obj;
}

struct WallFrame {
  Vec2 start;
  Vec2 dir;     // unit, along the edge
  Vec2 inward;  // unit normal pointing into the room
  double length = 0.0;
};

WallFrame wall_frame(const RoomSpec& room, std::size_t edge) {
  const Vec2& a = room.footprint[edge];
  const Vec2& b = room.footprint[(edge + 1) % room.footprint.size()];
  WallFrame w;
  w.start = a;
  w.length = std::hypot(b.x - a.x, b.y - a.y);
  w.dir = {(b.x - a.x) / w.length, (b.y - a.y) / w.length};
  w.inward = {-w.dir.y, w.dir.x};
  return w;
}

// --- asset templates -------------------------------------------------------

struct StyleParams {
  Rgb primary;
  Rgb secondary;
  Rgb accent;
  double leg = 0.05;  // m
  bool beta = false;
};

Rgb jitter_color(const Rgb& c, Rng& rng) {
  auto j = [&](double v) { return std::clamp(v + uniform(rng, -0.05, 0.05), 0.0, 1.0); };
  return {j(c.r), j(c.g), j(c.b)};
}

StyleParams style_params(const std::string& style, Rng& rng) {
  StyleParams p;
  if (style == kStyleAlpha) {
    p.primary = jitter_color({0.55, 0.36, 0.20}, rng);
    p.secondary = jitter_color({0.80, 0.72, 0.58}, rng);
    p.accent = jitter_color({0.30, 0.20, 0.12}, rng);
    p.leg = 0.05;
  } else if (style == kStyleBeta) {
    p.primary = jitter_color({0.32, 0.40, 0.52}, rng);
    p.secondary = jitter_color({0.86, 0.88, 0.90}, rng);
    p.accent = jitter_color({0.12, 0.12, 0.14}, rng);
    p.leg = 0.035;
    p.beta = true;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown asset style '" + style + "'");
  }
  return p;
}

// Parts are given as fractions of the bounding dims, measured from the
// -dims/2 corner; a fraction of exactly 0 or 1 lands on the AABB face.
class PartBuilder {
 public:
  explicit PartBuilder(const Vec3& dims) : dims_(dims) {}

  void add(double x0, double x1, double y0, double y1, double z0, double z1,
           const Rgb& color) {
    const Vec3 lo{coord(0, x0), coord(1, y0), coord(2, z0)};
    const Vec3 hi{coord(0, x1), coord(1, y1), coord(2, z1)};
    mesh_.append(make_box_mesh(lo, hi, color));
  }

  // Four corner legs of absolute thickness `t` from z0 to z1 (fractions).
  void legs(double t, double z0, double z1, const Rgb& color) {
    const double fx = std::min(0.25, t / dims_.x);
    const double fy = std::min(0.25, t / dims_.y);
    add(0, fx, 0, fy, z0, z1, color);
    add(1 - fx, 1, 0, fy, z0, z1, color);
    add(1 - fx, 1, 1 - fy, 1, z0, z1, color);
    add(0, fx, 1 - fy, 1, z0, z1, color);
  }

  double fx(double meters) const { return std::min(0.25, meters / dims_.x); }
  double fy(double meters) const { return std::min(0.25, meters / dims_.y); }
  double fz(double meters) const { return std::min(0.25, meters / dims_.z); }

  TriMesh take() { return std::move(mesh_); }

 private:
  double coord(int axis, double f) const {
    if (f <= 0.0) return -0.5 * dims_[axis];
    if (f >= 1.0) return 0.5 * dims_[axis];
    return -0.5 * dims_[axis] + f * dims_[axis];
  }

  Vec3 dims_;
  TriMesh mesh_;
};

void build_chair(PartBuilder& b, const StyleParams& s, Rng& rng) {
  const double seat = s.beta ? uniform(rng, 0.46, 0.54) : uniform(rng, 0.42, 0.50);
  const double st = 0.07;
  if (!s.beta) {
    b.legs(s.leg, 0, seat, s.accent);
    b.add(0, 1, 0, 1, seat, seat + st, s.primary);
    b.add(0, 0.12, 0, 1, seat + st, 1, s.primary);
  } else {
    b.add(0.1, 0.9, 0.1, 0.9, 0, 0.05, s.accent);
    b.add(0.42, 0.58, 0.42, 0.58, 0.05, seat, s.accent);
    b.add(0, 1, 0, 1, seat, seat + st, s.primary);
    b.add(0, 0.08, 0.1, 0.9, seat + st + 0.06, 1, s.secondary);
    b.add(0.02, 0.06, 0.45, 0.55, seat + st, seat + st + 0.06, s.accent);
  }
}

void build_table(PartBuilder& b, const StyleParams& s, Rng& rng) {
  const double top = 1.0 - b.fz(uniform(rng, 0.03, 0.06));
  if (!s.beta) {
    b.legs(s.leg, 0, top, s.accent);
    b.add(0, 1, 0, 1, top, 1, s.primary);
  } else {
    b.add(0.25, 0.75, 0.25, 0.75, 0, 0.05, s.accent);
    b.add(0.42, 0.58, 0.42, 0.58, 0.05, top, s.accent);
    b.add(0, 1, 0, 1, top, 1, s.secondary);
  }
}

void build_desk(PartBuilder& b, const StyleParams& s, Rng& rng) {
  const double top = 1.0 - b.fz(uniform(rng, 0.03, 0.05));
  b.add(0, 1, 0, 1, top, 1, s.primary);
  if (!s.beta) {
    const double py = b.fy(0.04);
    b.add(0, 1, 0, py, 0, top, s.primary);
    b.add(0, 1, 1 - py, 1, 0, top, s.primary);
  } else {
    b.legs(s.leg, 0, top, s.accent);
    b.add(0.1, 0.9, 0.65, 0.95, 0.6, top, s.secondary);
  }
}

void build_bed(PartBuilder& b, const StyleParams& s, Rng& rng) {
  const double base = uniform(rng, 0.25, 0.32);
  if (!s.beta) {
    b.add(0, 0.05, 0, 1, 0, 1, s.accent);
    b.add(0.05, 1, 0, 1, 0, base, s.primary);
    b.add(0.05, 1, 0.02, 0.98, base, base + 0.2, s.secondary);
  } else {
    // Free-standing headboard separated from the frame.
    b.add(0, 0.04, 0, 0.06, 0, 1, s.accent);
    b.add(0, 0.04, 0.94, 1, 0, 1, s.accent);
    b.add(0, 0.04, 0.06, 0.94, 0.45, 0.95, s.accent);
    b.legs(s.leg, 0, 0.1, s.accent);
    b.add(0.12, 1, 0, 1, 0.1, base + 0.05, s.primary);
    b.add(0.12, 1, 0.03, 0.97, base + 0.05, base + 0.25, s.secondary);
  }
}

void build_sofa(PartBuilder& b, const StyleParams& s, Rng& rng) {
  const double seat = uniform(rng, 0.42, 0.48);
  if (!s.beta) {
    b.add(0, 1, 0, 1, 0, seat, s.primary);
    b.add(0, 0.22, 0, 1, seat, 1, s.primary);
    b.add(0.22, 1, 0, 0.12, seat, 0.7, s.secondary);
    b.add(0.22, 1, 0.88, 1, seat, 0.7, s.secondary);
  } else {
    b.legs(s.leg, 0, 0.15, s.accent);
    b.add(0, 1, 0.1, 0.9, 0.15, seat, s.primary);
    b.add(0, 0.15, 0, 1, seat, 1, s.secondary);
    b.add(0.15, 0.9, 0, 0.1, 0.15, 0.62, s.secondary);
    b.add(0.15, 0.9, 0.9, 1, 0.15, 0.62, s.secondary);
  }
}

void build_bookshelf(PartBuilder& b, const StyleParams& s, Rng& rng) {
  const int shelves = uniform_int(rng, 3, 5);
  const double board = b.fz(0.025);
  if (!s.beta) {
    const double side = b.fy(0.03);
    b.add(0, 1, 0, side, 0, 1, s.primary);
    b.add(0, 1, 1 - side, 1, 0, 1, s.primary);
    b.add(0, b.fx(0.02), side, 1 - side, 0, 1, s.accent);
    for (int i = 0; i <= shelves; ++i) {
      const double z = static_cast<double>(i) / shelves;
      b.add(b.fx(0.02), 1, side, 1 - side, std::max(0.0, z - board),
            std::max(board, z), s.primary);
    }
  } else {
    b.legs(0.03, 0, 1, s.accent);
    for (int i = 0; i <= shelves; ++i) {
      const double z = static_cast<double>(i) / shelves;
      b.add(0, 1, 0, 1, std::max(0.0, z - board), std::max(board, z),
            s.secondary);
    }
  }
}

void build_cabinet(PartBuilder& b, const StyleParams& s, Rng&) {
  if (!s.beta) {
    const double plinth = b.fz(0.06);
    b.add(0.05, 0.95, 0.05, 0.95, 0, plinth, s.accent);
    b.add(0, 1, 0, 1, plinth, 1, s.primary);
  } else {
    const double legs = b.fz(0.15);
    b.legs(s.leg, 0, legs, s.accent);
    b.add(0, 0.94, 0, 1, legs, 1, s.secondary);
    b.add(0.94, 1, 0.02, 0.49, legs + 0.05, 0.95, s.primary);
    b.add(0.94, 1, 0.51, 0.98, legs + 0.05, 0.95, s.primary);
  }
}

void build_nightstand(PartBuilder& b, const StyleParams& s, Rng&) {
  if (!s.beta) {
    b.add(0.03, 0.97, 0.03, 0.97, 0, 0.92, s.primary);
    b.add(0, 1, 0, 1, 0.92, 1, s.accent);
  } else {
    b.legs(s.leg, 0, 0.3, s.accent);
    b.add(0, 1, 0, 1, 0.3, 1, s.secondary);
  }
}

void build_wall_cabinet(PartBuilder& b, const StyleParams& s, Rng&) {
  if (!s.beta) {
    b.add(0, 0.9, 0, 1, 0, 1, s.primary);
    b.add(0.9, 1, 0.02, 0.98, 0.02, 0.98, s.secondary);
  } else {
    const double t = b.fy(0.02);
    b.add(0, b.fx(0.02), 0, 1, 0, 1, s.accent);
    b.add(0, 1, 0, 1, 0, b.fz(0.02), s.secondary);
    b.add(0, 1, 0, 1, 1 - b.fz(0.02), 1, s.secondary);
    b.add(0, 1, 0, t, 0, 1, s.secondary);
    b.add(0, 1, 1 - t, 1, 0, 1, s.secondary);
  }
}

void build_wall_shelf(PartBuilder& b, const StyleParams& s, Rng&) {
  const double board = b.fz(0.03);
  if (!s.beta) {
    b.add(0, 0.12, 0, 1, 0, 1, s.accent);
    b.add(0.12, 1, 0, 1, 0, board, s.primary);
    b.add(0.12, 1, 0, 1, 0.5 - board / 2, 0.5 + board / 2, s.primary);
    b.add(0.12, 1, 0, 1, 1 - board, 1, s.primary);
  } else {
    b.add(0, 1, 0, 1, 0, board, s.secondary);
    b.add(0, 1, 0, 1, 1 - board, 1, s.secondary);
    b.add(0, 0.1, 0.1, 0.15, board, 1 - board, s.accent);
    b.add(0, 0.1, 0.85, 0.9, board, 1 - board, s.accent);
  }
}

void build_lamp(PartBuilder& b, const StyleParams& s, Rng& rng) {
  const double shade = s.beta ? uniform(rng, 0.70, 0.78) : uniform(rng, 0.55, 0.65);
  const double base_h = s.beta ? 0.1 : 0.06;
  const double base_w = s.beta ? 0.3 : 0.2;
  b.add(0.5 - base_w, 0.5 + base_w, 0.5 - base_w, 0.5 + base_w, 0, base_h, s.accent);
  b.add(0.46, 0.54, 0.46, 0.54, base_h, shade, s.accent);
  b.add(0, 1, 0, 1, shade, 1, s.secondary);
}

void build_box(PartBuilder& b, const StyleParams& s, Rng&) {
  if (!s.beta) {
    b.add(0.02, 0.98, 0.02, 0.98, 0, 0.88, s.primary);
    b.add(0, 1, 0, 1, 0.88, 1, s.accent);
  } else {
    b.add(0, 1, 0, 1, 0, 1, s.secondary);
  }
}

// Shared with the rectilinear footprint generator: reflect the L notch into
// one of the four corners while keeping CCW order.
std::vector<Vec2> reflect_polygon(std::vector<Vec2> poly, double w, double h,
                                  bool mirror_x, bool mirror_y) {
  for (Vec2& p : poly) {
    if (mirror_x) p.x = w - p.x;
    if (mirror_y) p.y = h - p.y;
  }
  if (mirror_x != mirror_y) std::reverse(poly.begin(), poly.end());
  return poly;
}

}  // namespace

const char* to_string(PlacementClass placement) {
  for (const auto& n : kPlacementNames) {
    if (n.value == placement) return n.name;
  }
  return "floor";
}

const char* to_string(AssetTemplate asset) {
  for (const auto& n : kAssetNames) {
    if (n.value == asset) return n.name;
  }
  return "box";
}

PlacementClass placement_from_string(const std::string& name) {
  for (const auto& n : kPlacementNames) {
    if (name == n.name) return n.value;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown placement class '" + name + "'");
}

AssetTemplate asset_from_string(const std::string& name) {
  for (const auto& n : kAssetNames) {
    if (name == n.name) return n.value;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown asset template '" + name + "'");
}

void CategorySpec::validate() const {
  if (name.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "category name must not be empty");
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (!(size_min[axis] > 0.0) || size_min[axis] > size_max[axis]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "category '" + name + "' has an invalid size range");
    }
  }
  if (!(wall_align_prob >= 0.0 && wall_align_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "category '" + name + "' wall_align_prob outside [0,1]");
  }
  if (count_min < 0 || count_min > count_max) {
    throw Error(ErrorCode::kInvalidArgument,
                "category '" + name + "' has an invalid count range");
  }
  if (style != kStyleAlpha && style != kStyleBeta) {
    throw Error(ErrorCode::kInvalidArgument,
                "category '" + name + "' uses unknown style '" + style + "'");
  }
}

void GenConfig::validate() const {
  for (const auto& c : categories) c.validate();
  for (std::size_t i = 0; i < categories.size(); ++i) {
    for (std::size_t j = i + 1; j < categories.size(); ++j) {
      if (categories[i].name == categories[j].name) {
        throw Error(ErrorCode::kInvalidArgument,
                    "duplicate category '" + categories[i].name + "'");
      }
    }
  }
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  check(room_area_min > 0.0 && room_area_min <= room_area_max,
        "room_area range invalid");
  check(aspect_min >= 1.0 && aspect_min <= aspect_max, "aspect range invalid");
  check(l_shape_prob >= 0.0 && l_shape_prob <= 1.0, "l_shape_prob outside [0,1]");
  check(wall_height_min > 0.0 && wall_height_min <= wall_height_max,
        "wall_height range invalid");
  check(wall_thickness > 0.0, "wall_thickness must be positive");
  check(large_object_count.min >= 0 &&
            large_object_count.min <= large_object_count.max,
        "large_object_count range invalid");
  check(wall_object_count.min >= 0 &&
            wall_object_count.min <= wall_object_count.max,
        "wall_object_count range invalid");
  check(surface_object_count.min >= 0 &&
            surface_object_count.min <= surface_object_count.max,
        "surface_object_count range invalid");
  check(wall_mount_min >= 0.0 && wall_mount_min <= wall_mount_max,
        "wall_mount range invalid");
  check(placement_clearance >= 0.0, "placement_clearance must be >= 0");
  check(max_placement_attempts > 0, "max_placement_attempts must be positive");
  check(train_fraction > 0.0 && train_fraction < 1.0,
        "train_fraction must lie in (0,1)");
}

const CategorySpec* GenConfig::find(const std::string& name) const {
  for (const auto& c : categories) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> GenConfig::category_names() const {
  std::vector<std::string> names;
  for (const auto& c : categories) names.push_back(c.name);
  return names;
}

GenConfig default_gen_config() {
  using P = PlacementClass;
  using A = AssetTemplate;
  GenConfig cfg;
  // name, placement, template, min dims, max dims, wall prob, count, supports
  auto add = [&](const char* name, P placement, A asset, Vec3 lo, Vec3 hi,
                 double wall, int cmin, int cmax, bool supports) {
    CategorySpec spec;
    spec.name = name;
    spec.placement = placement;
    spec.asset = asset;
    spec.size_min = lo;
    spec.size_max = hi;
    spec.wall_align_prob = wall;
    spec.count_min = cmin;
    spec.count_max = cmax;
    spec.supports_surface = supports;
    cfg.categories.push_back(spec);
  };
  add("bed", P::kFloor, A::kBed, {1.9, 1.2, 0.9}, {2.2, 1.9, 1.3}, 0.95, 0, 1, false);
  add("sofa", P::kFloor, A::kSofa, {0.8, 1.6, 0.75}, {1.0, 2.4, 0.95}, 0.9, 0, 1, false);
  add("chair", P::kFloor, A::kChair, {0.42, 0.42, 0.8}, {0.6, 0.6, 1.05}, 0.1, 2, 6, false);
  add("table", P::kFloor, A::kTable, {0.8, 0.7, 0.7}, {1.8, 1.1, 0.78}, 0.2, 1, 2, true);
  add("desk", P::kFloor, A::kDesk, {0.55, 1.0, 0.72}, {0.8, 1.6, 0.78}, 0.9, 0, 2, true);
  add("bookshelf", P::kFloor, A::kBookshelf, {0.28, 0.6, 1.2}, {0.4, 1.2, 2.0}, 0.95, 0, 2, false);
  add("cabinet", P::kFloor, A::kCabinet, {0.4, 0.6, 0.7}, {0.6, 1.4, 1.1}, 0.9, 1, 2, true);
  add("nightstand", P::kFloor, A::kNightstand, {0.35, 0.35, 0.45}, {0.5, 0.55, 0.65}, 0.8, 0, 2, true);
  add("wall_cabinet", P::kWallMounted, A::kWallCabinet, {0.3, 0.6, 0.5}, {0.4, 1.2, 0.8}, 1.0, 1, 3, false);
  add("wall_shelf", P::kWallMounted, A::kWallShelf, {0.2, 0.6, 0.25}, {0.3, 1.2, 0.45}, 1.0, 1, 3, false);
  add("lamp", P::kSurface, A::kLamp, {0.2, 0.2, 0.35}, {0.35, 0.35, 0.6}, 0.0, 1, 4, false);
  add("box", P::kSurface, A::kBox, {0.15, 0.15, 0.1}, {0.4, 0.4, 0.3}, 0.0, 2, 10, false);
  return cfg;
}

RoomSpec generate_floorplan(const GenConfig& cfg, Rng& rng) {
  RoomSpec room;
  const double area = uniform(rng, cfg.room_area_min, cfg.room_area_max);
  room.wall_height = uniform(rng, cfg.wall_height_min, cfg.wall_height_max);
  room.wall_thickness = cfg.wall_thickness;
  const bool l_shape = bernoulli(rng, cfg.l_shape_prob);
  const double aspect = uniform(rng, cfg.aspect_min, cfg.aspect_max);
  if (!l_shape) {
    double w = std::sqrt(area * aspect);
    double h = area / w;
    if (bernoulli(rng, 0.5)) std::swap(w, h);
    room.footprint = {{0, 0}, {w, 0}, {w, h}, {0, h}};
    return room;
  }
  const double fx = uniform(rng, 0.3, 0.5);
  const double fy = uniform(rng, 0.3, 0.5);
  const double bbox_area = area / (1.0 - fx * fy);
  double w = std::sqrt(bbox_area * aspect);
  double h = bbox_area / w;
  if (bernoulli(rng, 0.5)) std::swap(w, h);
  const double nx = fx * w;
  const double ny = fy * h;
  std::vector<Vec2> poly = {{0, 0},          {w, 0},      {w, h - ny},
                            {w - nx, h - ny}, {w - nx, h}, {0, h}};
  const int corner = uniform_int(rng, 0, 3);
  room.footprint = reflect_polygon(std::move(poly), w, h, (corner & 1) != 0,
                                   (corner & 2) != 0);
  return room;
}

std::vector<std::array<std::uint32_t, 3>> triangulate_polygon(
    std::span<const Vec2> poly) {
  std::vector<std::array<std::uint32_t, 3>> tris;
  std::vector<std::uint32_t> idx(poly.size());
  std::iota(idx.begin(), idx.end(), 0u);
  auto convex = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) > 1e-12;
  };
  auto inside_tri = [](const Vec2& p, const Vec2& a, const Vec2& b,
                       const Vec2& c) {
    auto side = [](const Vec2& o, const Vec2& u, const Vec2& v) {
      return (u.x - o.x) * (v.y - o.y) - (u.y - o.y) * (v.x - o.x);
    };
    return side(a, b, p) >= 0 && side(b, c, p) >= 0 && side(c, a, p) >= 0;
  };
  std::size_t guard = 0;
  while (idx.size() > 3 && guard++ < 10 * poly.size() * poly.size()) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::uint32_t ia = idx[(i + idx.size() - 1) % idx.size()];
      const std::uint32_t ib = idx[i];
      const std::uint32_t ic = idx[(i + 1) % idx.size()];
      if (!convex(poly[ia], poly[ib], poly[ic])) continue;
      bool ear = true;
      for (std::uint32_t other : idx) {
        if (other == ia || other == ib || other == ic) continue;
        if (inside_tri(poly[other], poly[ia], poly[ib], poly[ic])) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) break;
  }
  if (idx.size() == 3) tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

TriMesh build_structure(const RoomSpec& room) {
  const Rgb floor_color{0.62, 0.52, 0.40};
  const Rgb wall_color{0.86, 0.85, 0.80};
  TriMesh mesh;
  const auto& poly = room.footprint;
  for (const Vec2& p : poly) {
    mesh.vertices.push_back({p.x, p.y, 0.0});
    mesh.colors.push_back(floor_color);
  }
  mesh.faces = triangulate_polygon(poly);

  const double h = room.wall_height;
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const WallFrame w = wall_frame(room, e);
    const Vec2& a = poly[e];
    const Vec2& b = poly[(e + 1) % poly.size()];
    const Vec2 oa{a.x - w.inward.x * room.wall_thickness,
                  a.y - w.inward.y * room.wall_thickness};
    const Vec2 ob{b.x - w.inward.x * room.wall_thickness,
                  b.y - w.inward.y * room.wall_thickness};
    const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
    for (const Vec2& p : {a, b}) mesh.vertices.push_back({p.x, p.y, 0.0});
    for (const Vec2& p : {a, b}) mesh.vertices.push_back({p.x, p.y, h});
    for (const Vec2& p : {oa, ob}) mesh.vertices.push_back({p.x, p.y, 0.0});
    for (const Vec2& p : {oa, ob}) mesh.vertices.push_back({p.x, p.y, h});
    mesh.colors.insert(mesh.colors.end(), 8, wall_color);
    // inner face, normal toward the room
    mesh.faces.push_back({base + 0, base + 3, base + 1});
    mesh.faces.push_back({base + 0, base + 2, base + 3});
    // outer face
    mesh.faces.push_back({base + 4, base + 5, base + 7});
    mesh.faces.push_back({base + 4, base + 7, base + 6});
  }
  return mesh;
}

TriMesh synth_asset(const CategorySpec& category, const Vec3& dims,
                    const std::string& style, Rng& rng) {
  if (!(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "asset dims must be positive for '" + category.name + "'");
  }
  const StyleParams params = style_params(style, rng);
  PartBuilder b(dims);
  switch (category.asset) {
    case AssetTemplate::kChair: build_chair(b, params, rng); break;
    case AssetTemplate::kTable: build_table(b, params, rng); break;
    case AssetTemplate::kDesk: build_desk(b, params, rng); break;
    case AssetTemplate::kBed: build_bed(b, params, rng); break;
    case AssetTemplate::kSofa: build_sofa(b, params, rng); break;
    case AssetTemplate::kBookshelf: build_bookshelf(b, params, rng); break;
    case AssetTemplate::kCabinet: build_cabinet(b, params, rng); break;
    case AssetTemplate::kNightstand: build_nightstand(b, params, rng); break;
    case AssetTemplate::kWallCabinet: build_wall_cabinet(b, params, rng); break;
    case AssetTemplate::kWallShelf: build_wall_shelf(b, params, rng); break;
    case AssetTemplate::kLamp: build_lamp(b, params, rng); break;
    case AssetTemplate::kBox: build_box(b, params, rng); break;
  }
  return b.take();
}

bool footprint_inside_room(const Box3& box, const RoomSpec& room) {
  const auto fp = box_footprint(box);
  const double area = box.size.x * box.size.y;
  const auto clipped = clip_polygon(room.footprint, fp);
  return polygon_area(clipped) >= area * (1.0 - 1e-9);
}

std::vector<PlacedObject> place_large_objects(const RoomSpec& room,
                                              const GenConfig& cfg, Rng& rng) {
  std::vector<PlacedObject> placed;
  const auto items =
      draw_stage_items(cfg, PlacementClass::kFloor, cfg.large_object_count, rng);
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const Vec2& p : room.footprint) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const std::size_t n_walls = room.footprint.size();

  for (const StageItem& item : items) {
    const CategorySpec& spec = cfg.categories[item.category];
    for (int attempt = 0; attempt < cfg.max_placement_attempts; ++attempt) {
      Box3 box;
      box.size = item.dims;
      if (bernoulli(rng, spec.wall_align_prob)) {
        const WallFrame w = wall_frame(room, uniform_index(rng, n_walls));
        const double t = uniform01(rng) * w.length;
        box.heading = normalize_heading(std::atan2(w.inward.y, w.inward.x));
        box.center = {w.start.x + w.dir.x * t + w.inward.x * 0.5 * item.dims.x,
                      w.start.y + w.dir.y * t + w.inward.y * 0.5 * item.dims.x,
                      0.0};
      } else {
        box.center = {uniform(rng, min_x, max_x), uniform(rng, min_y, max_y), 0.0};
        box.heading = normalize_heading(uniform(rng, -kPi, kPi));
      }
      box.center.z = 0.5 * item.dims.z;
      if (!footprint_inside_room(box, room)) continue;
      bool overlap = false;
      for (const auto& other : placed) {
        if (footprint_intersection_area(
                inflate_footprint(box, cfg.placement_clearance), other.box) >
            0.0) {
          overlap = true;
          break;
        }
      }
      if (overlap) continue;
      placed.push_back(make_placed(spec, box, rng));
      break;
    }
  }
  return placed;
}

std::vector<PlacedObject> place_wall_objects(
    const RoomSpec& room, const std::vector<PlacedObject>& existing,
    const GenConfig& cfg, Rng& rng) {
  std::vector<PlacedObject> placed;
  const auto items = draw_stage_items(cfg, PlacementClass::kWallMounted,
                                      cfg.wall_object_count, rng);
  const std::size_t n_walls = room.footprint.size();
  for (const StageItem& item : items) {
    const CategorySpec& spec = cfg.categories[item.category];
    for (int attempt = 0; attempt < cfg.max_placement_attempts; ++attempt) {
      const WallFrame w = wall_frame(room, uniform_index(rng, n_walls));
      const double t = uniform01(rng);
      double bottom = uniform(rng, cfg.wall_mount_min, cfg.wall_mount_max);
      if (w.length < item.dims.y) continue;
      bottom = std::min(bottom, room.wall_height - item.dims.z);
      if (bottom < 0.0) continue;
      const double along = 0.5 * item.dims.y + t * (w.length - item.dims.y);
      Box3 box;
      box.size = item.dims;
      box.heading = normalize_heading(std::atan2(w.inward.y, w.inward.x));
      box.center = {w.start.x + w.dir.x * along + w.inward.x * 0.5 * item.dims.x,
                    w.start.y + w.dir.y * along + w.inward.y * 0.5 * item.dims.x,
                    bottom + 0.5 * item.dims.z};
      if (!footprint_inside_room(box, room)) continue;
      if (collides_any(box, existing, placed, cfg.placement_clearance)) continue;
      placed.push_back(make_placed(spec, box, rng));
      break;
    }
  }
  return placed;
}

std::vector<PlacedObject> place_surface_objects(
    const std::vector<PlacedObject>& existing, const GenConfig& cfg,
    Rng& rng) {
  std::vector<PlacedObject> placed;
  const auto items = draw_stage_items(cfg, PlacementClass::kSurface,
                                      cfg.surface_object_count, rng);
  std::vector<std::size_t> supports;
  for (std::size_t i = 0; i < existing.size(); ++i) {
    const CategorySpec* spec = cfg.find(existing[i].category);
    if (spec && spec->supports_surface &&
        existing[i].placement == PlacementClass::kFloor) {
      supports.push_back(i);
    }
  }
  if (supports.empty()) return placed;

  for (const StageItem& item : items) {
    const CategorySpec& spec = cfg.categories[item.category];
    for (int attempt = 0; attempt < cfg.max_placement_attempts; ++attempt) {
      const std::size_t support_index = supports[uniform_index(rng, supports.size())];
      const Box3& support = existing[support_index].box;
      const int quarter = uniform_int(rng, 0, 3);
      const double ex = (quarter % 2 == 0) ? item.dims.x : item.dims.y;
      const double ey = (quarter % 2 == 0) ? item.dims.y : item.dims.x;
      const double slack_x = support.size.x - ex;
      const double slack_y = support.size.y - ey;
      const double ox = uniform(rng, -0.5, 0.5) * slack_x;
      const double oy = uniform(rng, -0.5, 0.5) * slack_y;
      if (slack_x < 0.0 || slack_y < 0.0) continue;
      const Vec3 offset = rotate_z({ox, oy, 0.0}, support.heading);
      Box3 box;
      box.size = item.dims;
      box.heading = normalize_heading(support.heading + quarter * 0.5 * kPi);
      const double top = support.center.z + 0.5 * support.size.z;
      box.center = {support.center.x + offset.x, support.center.y + offset.y,
                    top + 0.5 * item.dims.z};
      if (!footprint_within(box, support)) continue;
      if (collides_any(box, existing, placed, cfg.placement_clearance)) continue;
      PlacedObject obj = make_placed(spec, box, rng);
      obj.support_id = static_cast<int>(support_index);
      placed.push_back(std::move(obj));
      break;
    }
  }
  return placed;
}

TriMesh SceneLayout::combined_mesh() const {
  TriMesh mesh = structure_mesh;
  for (const auto& o : objects) mesh.append(o.mesh);
  return mesh;
}

SceneLayout generate_scene(std::uint64_t seed, const GenConfig& cfg) {
  Rng rng(seed);
  SceneLayout scene;
  scene.seed = seed;
  scene.room = generate_floorplan(cfg, rng);
  scene.structure_mesh = build_structure(scene.room);
  auto large = place_large_objects(scene.room, cfg, rng);
  auto wall = place_wall_objects(scene.room, large, cfg, rng);
  std::vector<PlacedObject> supportable = large;
  supportable.insert(supportable.end(), wall.begin(), wall.end());
  auto surface = place_surface_objects(supportable, cfg, rng);

  scene.objects = std::move(supportable);
  for (auto& o : surface) scene.objects.push_back(std::move(o));
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    scene.objects[i].instance_id = static_cast<int>(i);
  }
  return scene;
}

std::vector<std::string> DatasetManifest::all_ids() const {
  std::vector<std::string> ids = train_ids;
  ids.insert(ids.end(), eval_ids.begin(), eval_ids.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string scene_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%05zu", index);
  return buf;
}

std::uint64_t scene_seed_for(std::uint64_t dataset_seed, std::size_t index) {
  return derive_seed(dataset_seed, 1, index);
}

void split_ids(const std::vector<std::string>& ids, double train_fraction,
               std::uint64_t seed, std::vector<std::string>& train,
               std::vector<std::string>& eval) {
  std::vector<std::string> shuffled = ids;
  Rng rng(derive_seed(seed, 2, 0));
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[uniform_index(rng, i)]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(shuffled.size())));
  train.assign(shuffled.begin(),
               shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
  eval.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train),
              shuffled.end());
  std::sort(train.begin(), train.end());
  std::sort(eval.begin(), eval.end());
}

GeneratedDataset generate_dataset(std::size_t n_scenes, const GenConfig& cfg,
                                  std::uint64_t seed, unsigned threads) {
  cfg.validate();
  GeneratedDataset out;
  out.scenes.resize(n_scenes);
  parallel_for(n_scenes, threads, [&](std::size_t i) {
    SceneLayout scene = generate_scene(scene_seed_for(seed, i), cfg);
    scene.scene_id = scene_id_for(i);
    out.scenes[i] = std::move(scene);
  });
  std::vector<std::string> ids;
  ids.reserve(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) ids.push_back(scene_id_for(i));
  split_ids(ids, cfg.train_fraction, seed, out.manifest.train_ids,
            out.manifest.eval_ids);
  out.manifest.name = cfg.name;
  out.manifest.root = ".";
  out.manifest.categories = cfg.category_names();
  out.manifest.seed = seed;
  return out;
}

std::string check_scene_invariants(const SceneLayout& scene, double tol) {
  const auto& objs = scene.objects;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const PlacedObject& o = objs[i];
    const std::string tag = scene.scene_id + " object " + std::to_string(i) +
                            " (" + o.category + ")";
    try {
      o.mesh.validate();
    } catch (const Error& e) {
      return tag + ": " + e.what();
    }
    if (!footprint_inside_room(o.box, scene.room)) {
      return tag + ": footprint leaves the room";
    }
    const double bottom = o.box.center.z - 0.5 * o.box.size.z;
    const double top = o.box.center.z + 0.5 * o.box.size.z;
    if (bottom < -tol || top > scene.room.wall_height + tol) {
      return tag + ": outside the wall-bounded volume";
    }
    const Aabb bounds = mesh_bounds_in_frame(o.mesh, o.box.center, o.box.heading);
    for (int axis = 0; axis < 3; ++axis) {
      if (std::abs(bounds.min[axis] + 0.5 * o.box.size[axis]) > tol ||
          std::abs(bounds.max[axis] - 0.5 * o.box.size[axis]) > tol) {
        return tag + ": mesh bounds disagree with annotation box";
      }
    }
    if (o.placement == PlacementClass::kSurface) {
      if (o.support_id < 0 || static_cast<std::size_t>(o.support_id) >= objs.size()) {
        return tag + ": surface object without support";
      }
      const Box3& s = objs[static_cast<std::size_t>(o.support_id)].box;
      const double support_top = s.center.z + 0.5 * s.size.z;
      if (std::abs(bottom - support_top) > 1e-6) {
        return tag + ": surface object does not rest on its support";
      }
      if (!footprint_within(o.box, s)) {
        return tag + ": surface object overhangs its support";
      }
    }
    if (o.placement == PlacementClass::kFloor) {
      if (std::abs(bottom) > 1e-9) return tag + ": floor object not on floor";
      for (std::size_t j = i + 1; j < objs.size(); ++j) {
        if (objs[j].placement != PlacementClass::kFloor) continue;
        if (footprint_intersection_area(o.box, objs[j].box) > 0.0) {
          return tag + ": overlaps object " + std::to_string(j);
        }
      }
    }
  }
  return {};
}

}  // namespace procscene

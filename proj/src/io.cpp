// SPDX-License-Identifier: Apache-2.0
#include "procscene/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "procscene/error.hpp"

namespace procscene::io {

namespace {

using json = nlohmann::ordered_json;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed ") + what + ": " + e.what());
  }
}

// Runs `fn`, converting JSON access errors into format errors.
template <typename Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed ") + what + ": " + e.what());
  }
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kFormat, "expected a 3-element array");
  }
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

IntRange range_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::kFormat, "expected a [min, max] array");
  }
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

std::pair<double, double> drange_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::kFormat, "expected a [min, max] array");
  }
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

void check_schema(const json& j, const char* what) {
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::kFormat, std::string("unsupported schema_version in ") + what);
  }
}

void append_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  const auto f = static_cast<float>(v);
  std::uint32_t bits = 0;
  std::memcpy(&bits, &f, sizeof bits);
  put_u32(out, bits);
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  float f32() {
    const std::uint32_t bits = u32();
    float f = 0.0f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double d = 0.0;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kFormat, std::string("truncated ") + what_);
    }
  }
  const std::vector<std::uint8_t>& bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

json category_json(const CategorySpec& c) {
  json j;
  j["name"] = c.name;
  j["placement"] = to_string(c.placement);
  j["template"] = to_string(c.asset);
  j["size_min"] = vec_json(c.size_min);
  j["size_max"] = vec_json(c.size_max);
  j["wall_align_prob"] = c.wall_align_prob;
  j["count"] = json::array({c.count_min, c.count_max});
  j["style"] = c.style;
  j["supports_surface"] = c.supports_surface;
  return j;
}

CategorySpec category_from(const json& j, const std::string& default_style) {
  CategorySpec c;
  c.name = j.at("name").get<std::string>();
  c.placement = placement_from_string(j.value("placement", std::string("floor")));
  c.asset = asset_from_string(j.value("template", c.name));
  c.size_min = vec_from(j.at("size_min"));
  c.size_max = vec_from(j.at("size_max"));
  c.wall_align_prob = j.value("wall_align_prob", 0.0);
  if (j.contains("count")) {
    const IntRange r = range_from(j.at("count"));
    c.count_min = r.min;
    c.count_max = r.max;
  }
  c.style = j.value("style", default_style);
  c.supports_surface = j.value("supports_surface", false);
  return c;
}

json box_fields(json j, const Box3& box) {
  j["center"] = vec_json(box.center);
  j["size"] = vec_json(box.size);
  j["heading"] = box.heading;
  return j;
}

Box3 box_from(const json& j) {
  Box3 b;
  b.center = vec_from(j.at("center"));
  b.size = vec_from(j.at("size"));
  b.heading = j.at("heading").get<double>();
  return b;
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  const std::string text = read_text(path);
  return {text.begin(), text.end()};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  write_text(path, std::string(bytes.begin(), bytes.end()));
}

// --- generation config -------------------------------------------------------

std::string gen_config_to_json(const GenConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = cfg.name;
  j["room"] = {
      {"area", json::array({cfg.room_area_min, cfg.room_area_max})},
      {"aspect", json::array({cfg.aspect_min, cfg.aspect_max})},
      {"l_shape_prob", cfg.l_shape_prob},
      {"wall_height", json::array({cfg.wall_height_min, cfg.wall_height_max})},
      {"wall_thickness", cfg.wall_thickness},
  };
  j["counts"] = {
      {"large", json::array({cfg.large_object_count.min, cfg.large_object_count.max})},
      {"wall", json::array({cfg.wall_object_count.min, cfg.wall_object_count.max})},
      {"surface",
       json::array({cfg.surface_object_count.min, cfg.surface_object_count.max})},
  };
  j["wall_mount_height"] = json::array({cfg.wall_mount_min, cfg.wall_mount_max});
  j["placement_clearance"] = cfg.placement_clearance;
  j["max_placement_attempts"] = cfg.max_placement_attempts;
  j["train_fraction"] = cfg.train_fraction;
  json cats = json::array();
  for (const auto& c : cfg.categories) cats.push_back(category_json(c));
  j["categories"] = std::move(cats);
  return j.dump(2) + "\n";
}

GenConfig gen_config_from_json(const std::string& text) {
  const json j = parse_json(text, "generation config");
  return guarded("generation config", [&] {
    check_schema(j, "generation config");
    GenConfig cfg = default_gen_config();
    cfg.name = j.value("name", cfg.name);
    if (j.contains("room")) {
      const json& r = j.at("room");
      if (r.contains("area")) std::tie(cfg.room_area_min, cfg.room_area_max) = drange_from(r.at("area"));
      if (r.contains("aspect")) std::tie(cfg.aspect_min, cfg.aspect_max) = drange_from(r.at("aspect"));
      cfg.l_shape_prob = r.value("l_shape_prob", cfg.l_shape_prob);
      if (r.contains("wall_height")) {
        std::tie(cfg.wall_height_min, cfg.wall_height_max) = drange_from(r.at("wall_height"));
      }
      cfg.wall_thickness = r.value("wall_thickness", cfg.wall_thickness);
    }
    if (j.contains("counts")) {
      const json& c = j.at("counts");
      if (c.contains("large")) cfg.large_object_count = range_from(c.at("large"));
      if (c.contains("wall")) cfg.wall_object_count = range_from(c.at("wall"));
      if (c.contains("surface")) cfg.surface_object_count = range_from(c.at("surface"));
    }
    if (j.contains("wall_mount_height")) {
      std::tie(cfg.wall_mount_min, cfg.wall_mount_max) = drange_from(j.at("wall_mount_height"));
    }
    cfg.placement_clearance = j.value("placement_clearance", cfg.placement_clearance);
    cfg.max_placement_attempts = j.value("max_placement_attempts", cfg.max_placement_attempts);
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    const std::string style = j.value("style", std::string(kStyleAlpha));
    if (j.contains("categories")) {
      cfg.categories.clear();
      for (const auto& c : j.at("categories")) cfg.categories.push_back(category_from(c, style));
    } else if (j.contains("style")) {
      for (auto& c : cfg.categories) c.style = style;
    }
    cfg.validate();
    return cfg;
  });
}

GenConfig load_gen_config(const fs::path& path) {
  return gen_config_from_json(read_text(path));
}

std::string config_hash(const GenConfig& cfg) {
  const std::string canonical = gen_config_to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- scene annotations -------------------------------------------------------

std::string annotation_to_json(const SceneAnnotation& scene) {
  json j;
  j["scene_id"] = scene.scene_id;
  j["seed"] = scene.seed;
  json poly = json::array();
  for (const Vec2& p : scene.room.footprint) poly.push_back(json::array({p.x, p.y}));
  j["room"] = {{"polygon", std::move(poly)},
               {"wall_height", scene.room.wall_height},
               {"wall_thickness", scene.room.wall_thickness}};
  json objs = json::array();
  for (const auto& o : scene.objects) {
    json oj;
    oj["instance_id"] = o.instance_id;
    oj["category"] = o.category;
    oj = box_fields(std::move(oj), o.box);
    oj["swapped"] = o.swapped;
    oj["pseudo"] = o.pseudo;
    objs.push_back(std::move(oj));
  }
  j["objects"] = std::move(objs);
  if (scene.emptied) j["emptied"] = true;
  return j.dump(2) + "\n";
}

SceneAnnotation annotation_from_json(const std::string& text) {
  const json j = parse_json(text, "scene annotation");
  return guarded("scene annotation", [&] {
    SceneAnnotation s;
    s.scene_id = j.at("scene_id").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    const json& room = j.at("room");
    for (const auto& p : room.at("polygon")) {
      s.room.footprint.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    s.room.wall_height = room.at("wall_height").get<double>();
    s.room.wall_thickness = room.at("wall_thickness").get<double>();
    for (const auto& oj : j.at("objects")) {
      ObjectAnnotation o;
      o.instance_id = oj.at("instance_id").get<int>();
      o.category = oj.at("category").get<std::string>();
      o.box = box_from(oj);
      o.swapped = oj.value("swapped", false);
      o.pseudo = oj.value("pseudo", false);
      s.objects.push_back(std::move(o));
    }
    s.emptied = j.value("emptied", false);
    return s;
  });
}

void write_scene_annotation(const fs::path& path, const SceneAnnotation& scene) {
  write_text(path, annotation_to_json(scene));
}

SceneAnnotation read_scene_annotation(const fs::path& path) {
  return annotation_from_json(read_text(path));
}

// --- manifest ----------------------------------------------------------------

std::string manifest_to_json(const DatasetManifest& m) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = m.name;
  j["root"] = m.root;
  j["splits"] = {{"train", m.train_ids}, {"eval", m.eval_ids}};
  j["categories"] = m.categories;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  const json j = parse_json(text, "manifest");
  return guarded("manifest", [&] {
    check_schema(j, "manifest");
    DatasetManifest m;
    m.name = j.at("name").get<std::string>();
    m.root = j.value("root", std::string("."));
    m.train_ids = j.at("splits").at("train").get<std::vector<std::string>>();
    m.eval_ids = j.at("splits").at("eval").get<std::vector<std::string>>();
    m.categories = j.at("categories").get<std::vector<std::string>>();
    m.config_hash = j.value("config_hash", std::string());
    m.seed = j.value("seed", std::uint64_t{0});
    for (const auto& id : m.train_ids) {
      if (std::find(m.eval_ids.begin(), m.eval_ids.end(), id) != m.eval_ids.end()) {
        throw Error(ErrorCode::kInvariant, "manifest splits overlap at '" + id + "'");
      }
    }
    return m;
  });
}

// --- point clouds ------------------------------------------------------------

std::vector<std::uint8_t> encode_pointcloud(const PointCloud& cloud) {
  cloud.validate();
  if (cloud.size() > 0xFFFFFFFFull) {
    throw Error(ErrorCode::kInvalidArgument, "point cloud too large for IPC1");
  }
  const bool heights = cloud.has_heights();
  std::vector<std::uint8_t> out;
  out.reserve(9 + cloud.size() * (heights ? 28 : 24));
  out.insert(out.end(), {'I', 'P', 'C', '1'});
  put_u32(out, static_cast<std::uint32_t>(cloud.size()));
  out.push_back(heights ? 1 : 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.positions[i];
    const Rgb& c = cloud.colors[i];
    put_f32(out, p.x);
    put_f32(out, p.y);
    put_f32(out, p.z);
    put_f32(out, c.r);
    put_f32(out, c.g);
    put_f32(out, c.b);
    if (heights) put_f32(out, (*cloud.heights)[i]);
  }
  return out;
}

PointCloud decode_pointcloud(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "point cloud");
  if (r.str(4) != "IPC1") throw Error(ErrorCode::kFormat, "bad point cloud magic");
  const std::uint32_t n = r.u32();
  const std::uint8_t flags = r.u8();
  const bool heights = (flags & 1u) != 0;
  const std::size_t stride = heights ? 28 : 24;
  if (r.remaining() != static_cast<std::size_t>(n) * stride) {
    throw Error(ErrorCode::kFormat, "point cloud payload size mismatch");
  }
  PointCloud cloud;
  cloud.reserve(n);
  if (heights) cloud.heights.emplace();
  for (std::uint32_t i = 0; i < n; ++i) {
    const double x = r.f32(), y = r.f32(), z = r.f32();
    const double cr = r.f32(), cg = r.f32(), cb = r.f32();
    cloud.positions.push_back({x, y, z});
    cloud.colors.push_back({cr, cg, cb});
    if (heights) cloud.heights->push_back(r.f32());
  }
  return cloud;
}

void write_pointcloud(const fs::path& path, const PointCloud& cloud) {
  write_bytes(path, encode_pointcloud(cloud));
}

PointCloud read_pointcloud(const fs::path& path) {
  return decode_pointcloud(read_bytes(path));
}

std::string pointcloud_to_ply(const PointCloud& cloud) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " +
                    std::to_string(cloud.size()) +
                    "\nproperty float x\nproperty float y\nproperty float z\n"
                    "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (cloud.has_heights()) out += "property float height\n";
  out += "end_header\n";
  auto channel = [](double v) {
    return std::to_string(static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.positions[i];
    append_double(out, static_cast<float>(p.x));
    out += ' ';
    append_double(out, static_cast<float>(p.y));
    out += ' ';
    append_double(out, static_cast<float>(p.z));
    const Rgb& c = cloud.colors[i];
    out += ' ' + channel(c.r) + ' ' + channel(c.g) + ' ' + channel(c.b);
    if (cloud.has_heights()) {
      out += ' ';
      append_double(out, static_cast<float>((*cloud.heights)[i]));
    }
    out += '\n';
  }
  return out;
}

// --- meshes ------------------------------------------------------------------

std::string meshes_to_obj(const MeshGroups& groups) {
  std::string out = "# procscene mesh export\n";
  std::size_t base = 1;
  for (const auto& [name, mesh] : groups) {
    out += "o " + name + "\n";
    const bool colored = mesh.has_colors();
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec3& v = mesh.vertices[i];
      out += "v ";
      append_double(out, v.x);
      out += ' ';
      append_double(out, v.y);
      out += ' ';
      append_double(out, v.z);
      if (colored) {
        const Rgb& c = mesh.colors[i];
        out += ' ';
        append_double(out, c.r);
        out += ' ';
        append_double(out, c.g);
        out += ' ';
        append_double(out, c.b);
      }
      out += '\n';
    }
    for (const auto& f : mesh.faces) {
      out += "f " + std::to_string(base + f[0]) + ' ' + std::to_string(base + f[1]) +
             ' ' + std::to_string(base + f[2]) + '\n';
    }
    base += mesh.vertices.size();
  }
  return out;
}

MeshGroups meshes_from_obj(const std::string& text) {
  std::vector<Vec3> verts;
  std::vector<Rgb> colors;
  std::vector<bool> has_color;
  struct RawGroup {
    std::string name;
    std::size_t first_vertex = 0;  // vertices declared under this group
    std::size_t end_vertex = 0;
    std::vector<std::array<std::size_t, 3>> faces;
  };
  std::vector<RawGroup> raw;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kFormat, "OBJ line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "o" || tag == "g") {
      std::string name;
      std::getline(ls >> std::ws, name);
      raw.push_back({name, verts.size(), verts.size(), {}});
    } else if (tag == "v") {
      std::vector<double> vals;
      double d = 0.0;
      while (ls >> d) vals.push_back(d);
      if (vals.size() != 3 && vals.size() != 6) fail("vertex needs 3 or 6 values");
      verts.push_back({vals[0], vals[1], vals[2]});
      if (vals.size() == 6) {
        colors.push_back({vals[3], vals[4], vals[5]});
        has_color.push_back(true);
      } else {
        colors.push_back(Rgb{});
        has_color.push_back(false);
      }
      if (!raw.empty()) raw.back().end_vertex = verts.size();
    } else if (tag == "f") {
      std::vector<std::size_t> idx;
      std::string tok;
      while (ls >> tok) {
        long long v = 0;
        const auto slash = tok.find('/');
        const std::string head = tok.substr(0, slash);
        auto res = std::from_chars(head.data(), head.data() + head.size(), v);
        if (res.ec != std::errc{}) fail("bad face index '" + tok + "'");
        if (v < 0) v += static_cast<long long>(verts.size()) + 1;
        if (v < 1 || static_cast<std::size_t>(v) > verts.size()) fail("face index out of range");
        idx.push_back(static_cast<std::size_t>(v - 1));
      }
      if (idx.size() < 3) fail("face needs at least 3 vertices");
      if (raw.empty()) raw.push_back({"default", 0, 0, {}});
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        raw.back().faces.push_back({idx[0], idx[k], idx[k + 1]});
      }
    }
  }

  MeshGroups groups;
  for (const RawGroup& g : raw) {
    TriMesh mesh;
    std::vector<std::int64_t> remap(verts.size(), -1);
    bool all_colored = true;
    // Own vertices keep file order if any face uses them; borrowed ones follow.
    std::vector<bool> used(verts.size(), false);
    for (const auto& f : g.faces)
      for (std::size_t gi : f) used[gi] = true;
    for (std::size_t gi = g.first_vertex; gi < g.end_vertex; ++gi) {
      if (!used[gi]) continue;
      remap[gi] = static_cast<std::int64_t>(mesh.vertices.size());
      mesh.vertices.push_back(verts[gi]);
      mesh.colors.push_back(colors[gi]);
      all_colored = all_colored && has_color[gi];
    }
    for (const auto& f : g.faces) {
      std::array<std::uint32_t, 3> local{};
      for (int k = 0; k < 3; ++k) {
        const std::size_t gi = f[k];
        if (remap[gi] < 0) {
          remap[gi] = static_cast<std::int64_t>(mesh.vertices.size());
          mesh.vertices.push_back(verts[gi]);
          mesh.colors.push_back(colors[gi]);
          all_colored = all_colored && has_color[gi];
        }
        local[k] = static_cast<std::uint32_t>(remap[gi]);
      }
      mesh.faces.push_back(local);
    }
    if (!all_colored) mesh.colors.clear();
    groups.emplace_back(g.name, std::move(mesh));
  }
  return groups;
}

MeshGroups scene_mesh_groups(const SceneLayout& scene) {
  MeshGroups groups;
  groups.emplace_back("structure", scene.structure_mesh);
  for (const auto& o : scene.objects) {
    groups.emplace_back("object_" + std::to_string(o.instance_id) + "_" + o.category,
                        o.mesh);
  }
  return groups;
}

void export_scene_mesh(const fs::path& path, const SceneLayout& scene) {
  write_text(path, meshes_to_obj(scene_mesh_groups(scene)));
}

// --- predictions -------------------------------------------------------------

std::string predictions_to_json(const PredictionSet& preds,
                                const std::string& dataset, bool with_features) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["dataset"] = dataset;
  json scenes = json::object();
  for (const auto& [id, props] : preds) {
    json list = json::array();
    for (const auto& p : props) {
      json d;
      d["category"] = p.detection.category;
      d = box_fields(std::move(d), p.detection.box);
      d["score"] = p.detection.score;
      if (with_features && !p.feature.empty()) d["feature"] = p.feature;
      list.push_back(std::move(d));
    }
    scenes[id] = std::move(list);
  }
  j["scenes"] = std::move(scenes);
  return j.dump(2) + "\n";
}

PredictionSet predictions_from_json(const std::string& text, std::string* dataset) {
  const json j = parse_json(text, "predictions file");
  return guarded("predictions file", [&] {
    check_schema(j, "predictions file");
    if (dataset) *dataset = j.value("dataset", std::string());
    PredictionSet out;
    for (const auto& [id, list] : j.at("scenes").items()) {
      auto& props = out[id];
      for (const auto& d : list) {
        Proposal p;
        p.detection.category = d.at("category").get<std::string>();
        p.detection.box = box_from(d);
        p.detection.score = d.at("score").get<double>();
        if (!std::isfinite(p.detection.score)) {
          throw Error(ErrorCode::kInvariant, "non-finite detection score");
        }
        if (d.contains("feature")) p.feature = d.at("feature").get<std::vector<double>>();
        props.push_back(std::move(p));
      }
    }
    return out;
  });
}

// --- models and caches -------------------------------------------------------

std::string model_to_json(const NaiveModel& model) {
  json j;
  j["schema_version"] = kSchemaVersion;
  json sizes = json::object();
  for (const auto& [cat, size] : model.mean_sizes) sizes[cat] = vec_json(size);
  j["mean_sizes"] = std::move(sizes);
  j["cluster_radius"] = model.cluster_radius;
  j["min_cluster_points"] = model.min_cluster_points;
  j["floor_height"] = model.floor_height;
  j["wall_margin"] = model.wall_margin;
  return j.dump(2) + "\n";
}

NaiveModel model_from_json(const std::string& text) {
  const json j = parse_json(text, "model file");
  return guarded("model file", [&] {
    check_schema(j, "model file");
    NaiveModel m;
    for (const auto& [cat, size] : j.at("mean_sizes").items()) {
      m.mean_sizes[cat] = vec_from(size);
    }
    m.cluster_radius = j.value("cluster_radius", m.cluster_radius);
    m.min_cluster_points = j.value("min_cluster_points", m.min_cluster_points);
    m.floor_height = j.value("floor_height", m.floor_height);
    m.wall_margin = j.value("wall_margin", m.wall_margin);
    m.validate();
    return m;
  });
}

std::vector<std::uint8_t> encode_feature_cache(const FeatureCache& cache) {
  std::vector<std::uint8_t> out;
  put_u32(out, static_cast<std::uint32_t>(cache.feature_dim));
  put_u32(out, static_cast<std::uint32_t>(cache.size()));
  for (std::size_t i = 0; i < cache.size(); ++i) {
    for (double v : cache.features[i]) put_f64(out, v);
    put_u32(out, static_cast<std::uint32_t>(cache.categories[i].size()));
    out.insert(out.end(), cache.categories[i].begin(), cache.categories[i].end());
  }
  return out;
}

FeatureCache decode_feature_cache(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "feature cache");
  FeatureCache cache;
  cache.feature_dim = r.u32();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<double> f(cache.feature_dim);
    for (double& v : f) v = r.f64();
    const std::uint32_t len = r.u32();
    cache.add(std::move(f), r.str(len));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kFormat, "trailing bytes in feature cache");
  return cache;
}

// --- config fragments --------------------------------------------------------

EvalConfig eval_config_from_json(const std::string& text) {
  const json j = parse_json(text, "eval config");
  return guarded("eval config", [&] {
    EvalConfig c;
    c.iou_threshold = j.value("iou_threshold", c.iou_threshold);
    c.nms_iou = j.value("nms_iou", c.nms_iou);
    c.min_points = j.value("min_points", c.min_points);
    c.min_side = j.value("min_side", c.min_side);
    c.class_aware_nms = j.value("class_aware_nms", c.class_aware_nms);
    c.validate();
    return c;
  });
}

AdaptConfig adapt_config_from_json(const std::string& text) {
  const json j = parse_json(text, "adapt config");
  return guarded("adapt config", [&] {
    AdaptConfig c;
    c.ema_alpha = j.value("ema_alpha", c.ema_alpha);
    c.top_k = j.value("top_k", c.top_k);
    c.agreement = j.value("agreement", c.agreement);
    c.confidence = j.value("confidence", c.confidence);
    c.few_shot_k = j.value("few_shot_k", c.few_shot_k);
    c.validate();
    return c;
  });
}

VssConfig vss_config_from_json(const std::string& text) {
  const json j = parse_json(text, "vss config");
  return guarded("vss config", [&] {
    VssConfig c;
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.noise_clip = j.value("noise_clip", c.noise_clip);
    c.n_cameras = j.value("n_cameras", c.n_cameras);
    c.depth_tolerance = j.value("depth_tolerance", c.depth_tolerance);
    if (j.contains("camera_height")) {
      std::tie(c.camera_height_min, c.camera_height_max) = drange_from(j.at("camera_height"));
    }
    c.fov = j.value("fov", c.fov);
    c.resolution = j.value("resolution", c.resolution);
    c.validate();
    return c;
  });
}

// --- instance library --------------------------------------------------------

void write_library(const fs::path& dir, const InstanceLibrary& lib) {
  fs::create_directories(dir);
  json entries = json::array();
  for (const auto& e : lib.entries) {
    const std::string file = e.name + ".obj";
    write_text(dir / file, meshes_to_obj({{e.name, e.mesh}}));
    entries.push_back({{"name", e.name},
                       {"category", e.category},
                       {"file", file},
                       {"dims", vec_json(e.dims)}});
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["entries"] = std::move(entries);
  write_text(dir / "catalog.json", j.dump(2) + "\n");
}

InstanceLibrary read_library(const fs::path& dir) {
  const json j = parse_json(read_text(dir / "catalog.json"), "library catalog");
  InstanceLibrary lib = guarded("library catalog", [&] {
    check_schema(j, "library catalog");
    InstanceLibrary out;
    for (const auto& ej : j.at("entries")) {
      LibraryEntry e;
      e.name = ej.at("name").get<std::string>();
      e.category = ej.at("category").get<std::string>();
      e.dims = vec_from(ej.at("dims"));
      const auto groups = meshes_from_obj(read_text(dir / ej.at("file").get<std::string>()));
      for (const auto& [name, mesh] : groups) e.mesh.append(mesh);
      out.entries.push_back(std::move(e));
    }
    return out;
  });
  lib.validate();
  return lib;
}

std::vector<std::string> parse_category_list(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    const json j = parse_json(text, "category list");
    return guarded("category list", [&] {
      const json& arr = j.is_object() ? j.at("categories") : j;
      return arr.get<std::vector<std::string>>();
    });
  }
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace procscene::io

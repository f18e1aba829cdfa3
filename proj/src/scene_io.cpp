#include <cstdio>
#include <set>
#include <sstream>

#include "avpgarage/scene.hpp"
#include "json.hpp"

namespace avpgarage {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json vec_json(Vec3 v) { return ordered_json::array({v.x, v.y, v.z}); }

ordered_json box_json(const Box3& b) {
  ordered_json j;
  j["center"] = vec_json(b.center);
  j["half_extents"] = vec_json(b.half_extents);
  j["yaw"] = b.yaw;
  return j;
}

ordered_json node_json(const SceneNode& n) {
  ordered_json j;
  j["id"] = n.id;
  j["kind"] = to_string(n.kind);
  j["center"] = vec_json(n.box.center);
  j["half_extents"] = vec_json(n.box.half_extents);
  j["yaw"] = n.box.yaw;
  ordered_json tags = ordered_json::object();
  for (const auto& [k, v] : n.tags) tags[k] = v;
  j["tags"] = tags;
  return j;
}

Vec3 read_vec(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    throw ImportError(what + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double read_number(const json& obj, const char* key, const std::string& what) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) throw ImportError(what + "." + key + " must be a number");
  return it->get<double>();
}

Box3 read_box(const json& obj, const std::string& what) {
  if (!obj.is_object()) throw ImportError(what + " must be an object");
  Box3 b;
  if (!obj.contains("center") || !obj.contains("half_extents")) {
    throw ImportError(what + " needs center and half_extents");
  }
  b.center = read_vec(obj["center"], what + ".center");
  b.half_extents = read_vec(obj["half_extents"], what + ".half_extents");
  b.yaw = read_number(obj, "yaw", what);
  if (!(b.half_extents.x > 0 && b.half_extents.y > 0 && b.half_extents.z > 0)) {
    throw ImportError(what + ".half_extents must be strictly positive");
  }
  return b;
}

std::string export_json(const SceneGraph& scene) {
  std::ostringstream out;
  out << "{\n  \"schema\": \"" << kSceneSchema << "\",\n  \"light_level\": \""
      << to_string(scene.light_level.level) << "\",\n  \"bounds\": " << box_json(scene.bounds).dump()
      << ",\n  \"nodes\": [";
  for (std::size_t k = 0; k < scene.nodes.size(); ++k) {
    out << (k ? ",\n    " : "\n    ") << node_json(scene.nodes[k]).dump();
  }
  out << (scene.nodes.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return out.str();
}

std::string export_obj(const SceneGraph& scene) {
  // Triangles per box face, indices into Box3::corners() (bit0 x, bit1 y, bit2 z).
  static constexpr int kFaces[12][3] = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 5}, {0, 5, 4},
                                        {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  std::ostringstream out;
  out << "# avpgarage scene export, meters, right-handed, +z up\n";
  out << "# nodes " << scene.nodes.size() << "\n";
  char line[128];
  std::size_t base = 1;
  for (const auto& node : scene.nodes) {
    out << "o " << node.id << "\n";
    for (const Vec3& v : node.box.corners()) {
      std::snprintf(line, sizeof line, "v %.6f %.6f %.6f\n", v.x, v.y, v.z);
      out << line;
    }
    for (const auto& f : kFaces) {
      out << "f " << base + f[0] << " " << base + f[1] << " " << base + f[2] << "\n";
    }
    base += 8;
  }
  return out.str();
}

}  // namespace

std::string export_scene(const SceneGraph& scene, SceneFormat format) {
  return format == SceneFormat::Obj ? export_obj(scene) : export_json(scene);
}

SceneGraph import_scene(std::string_view doc_text) {
  json doc;
  try {
    doc = json::parse(doc_text);
  } catch (const json::parse_error& e) {
    throw ImportError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ImportError("scene document must be an object");
  auto schema = doc.find("schema");
  if (schema == doc.end() || !schema->is_string() || schema->get<std::string>() != kSceneSchema) {
    throw ImportError("schema must be \"scene/1\"");
  }
  SceneGraph scene;
  auto level = doc.find("light_level");
  if (level == doc.end() || !level->is_string()) throw ImportError("light_level must be a string");
  auto preset = light_preset_from_string(level->get<std::string>());
  if (!preset) throw ImportError("unknown light_level '" + level->get<std::string>() + "'");
  scene.light_level = LightLevel::preset(*preset);
  if (!doc.contains("bounds")) throw ImportError("missing bounds");
  scene.bounds = read_box(doc["bounds"], "bounds");

  auto nodes = doc.find("nodes");
  if (nodes == doc.end() || !nodes->is_array()) throw ImportError("nodes must be an array");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < nodes->size(); ++k) {
    const json& j = (*nodes)[k];
    const std::string what = "nodes[" + std::to_string(k) + "]";
    if (!j.is_object()) throw ImportError(what + " must be an object");
    if (!j.contains("id") || !j["id"].is_string()) throw ImportError(what + ".id must be a string");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ImportError(what + ".kind must be a string");
    SceneNode node;
    node.id = j["id"].get<std::string>();
    const std::string kind = j["kind"].get<std::string>();
    auto parsed = node_kind_from_string(kind);
    if (!parsed) throw ImportError("unknown node kind '" + kind + "' at " + what);
    node.kind = *parsed;
    node.box = read_box(j, what);
    if (j.contains("tags")) {
      if (!j["tags"].is_object()) throw ImportError(what + ".tags must be an object");
      for (const auto& [key, value] : j["tags"].items()) {
        if (!value.is_string()) throw ImportError(what + ".tags." + key + " must be a string");
        node.tags[key] = value.get<std::string>();
      }
    }
    if (node.kind == NodeKind::Vehicle) {
      auto size = node.tags.find("vehicle_size");
      if (size == node.tags.end() || !vehicle_size_from_string(size->second)) {
        throw ImportError(what + ": vehicle nodes need vehicle_size small|medium|large");
      }
    }
    if (!seen.insert(node.id).second) throw ImportError("duplicate node id '" + node.id + "'");
    scene.nodes.push_back(std::move(node));
  }
  return scene;
}

}  // namespace avpgarage

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "avpgarage/scene.hpp"
#include "json.hpp"

namespace avpgarage {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::FloorTile:
      return "FloorTile";
    case NodeKind::LaneMarking:
      return "LaneMarking";
    case NodeKind::ParkingMarking:
      return "ParkingMarking";
    case NodeKind::Column:
      return "Column";
    case NodeKind::CeilingPanel:
      return "CeilingPanel";
    case NodeKind::Lamp:
      return "Lamp";
    case NodeKind::Vehicle:
      return "Vehicle";
    case NodeKind::RampMarker:
      return "RampMarker";
  }
  return "?";
}

std::optional<NodeKind> node_kind_from_string(std::string_view s) {
  for (NodeKind k : {NodeKind::FloorTile, NodeKind::LaneMarking, NodeKind::ParkingMarking, NodeKind::Column,
                     NodeKind::CeilingPanel, NodeKind::Lamp, NodeKind::Vehicle, NodeKind::RampMarker}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

bool is_opaque(NodeKind k) {
  return k == NodeKind::FloorTile || k == NodeKind::Column || k == NodeKind::CeilingPanel ||
         k == NodeKind::Vehicle;
}

std::string_view to_string(LightPreset p) {
  switch (p) {
    case LightPreset::Bright:
      return "bright";
    case LightPreset::Clear:
      return "clear";
    case LightPreset::Moderate:
      return "moderate";
    case LightPreset::Dim:
      return "dim";
  }
  return "?";
}

std::optional<LightPreset> light_preset_from_string(std::string_view s) {
  for (LightPreset p : {LightPreset::Bright, LightPreset::Clear, LightPreset::Moderate, LightPreset::Dim}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

LightLevel LightLevel::preset(LightPreset p) {
  switch (p) {
    case LightPreset::Bright:
      return {p, 1.0, 1.0};
    case LightPreset::Clear:
      return {p, 1.0, 0.6};
    case LightPreset::Moderate:
      return {p, 0.7, 0.6};
    case LightPreset::Dim:
      return {p, 0.4, 0.6};
  }
  return {};
}

const SceneNode* SceneGraph::find(std::string_view id) const {
  for (const auto& node : nodes) {
    if (node.id == id) return &node;
  }
  return nullptr;
}

VehicleDims vehicle_dims(VehicleSize size) {
  switch (size) {
    case VehicleSize::Small:
      return {4.2, 1.8, 1.5};
    case VehicleSize::Medium:
      return {4.9, 1.9, 1.8};
    case VehicleSize::Large:
      return {5.9, 2.1, 2.4};
  }
  return {4.9, 1.9, 1.8};
}

std::string_view to_string(VehicleSize s) {
  switch (s) {
    case VehicleSize::Small:
      return "small";
    case VehicleSize::Medium:
      return "medium";
    case VehicleSize::Large:
      return "large";
  }
  return "?";
}

std::optional<VehicleSize> vehicle_size_from_string(std::string_view s) {
  for (VehicleSize v : {VehicleSize::Small, VehicleSize::Medium, VehicleSize::Large}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

namespace {

std::vector<double> prefix_sums(const std::vector<double>& widths) {
  std::vector<double> out(widths.size() + 1, 0.0);
  for (std::size_t k = 0; k < widths.size(); ++k) out[k + 1] = out[k] + widths[k];
  return out;
}

std::string cell_tag(CellRef c) { return std::to_string(c.i) + "," + std::to_string(c.j); }
std::string id_suffix(int a, int b) { return std::to_string(a) + "_" + std::to_string(b); }

double yaw_of(Rotation r) { return r.quarter_turns * (std::numbers::pi / 2.0); }

// Extent of the rectangle along the model's local y axis after rotation.
double along_local_y(const CellRect& r, Rotation rot) {
  return rot.quarter_turns % 2 == 0 ? r.y1 - r.y0 : r.x1 - r.x0;
}
double along_local_x(const CellRect& r, Rotation rot) {
  return rot.quarter_turns % 2 == 0 ? r.x1 - r.x0 : r.y1 - r.y0;
}

Box3 slab(const CellRect& r, double z0, double z1) { return box_from_bounds({r.x0, r.y0, z0}, {r.x1, r.y1, z1}); }

Box3 flat_box(const CellRect& r, Rotation rot, double half_x, double half_y, double z0, double z1) {
  Box3 b;
  b.center = {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1), 0.5 * (z0 + z1)};
  b.half_extents = {std::max(half_x, 0.01), std::max(half_y, 0.01), 0.5 * (z1 - z0)};
  b.yaw = yaw_of(rot);
  return b;
}

}  // namespace

std::vector<CellRect> layout_cells(const ClassifiedGrid& grid) {
  const auto xs = prefix_sums(grid.spec.col_widths);
  const auto ys = prefix_sums(grid.spec.row_widths);
  std::vector<CellRect> out;
  out.reserve(grid.cells.size());
  for (int i = 0; i < grid.spec.m; ++i) {
    for (int j = 0; j < grid.spec.n; ++j) {
      out.push_back({{i, j}, xs[j], xs[j + 1], ys[i], ys[i + 1]});
    }
  }
  return out;
}

std::vector<LampSite> lamp_sites(const SceneGraph& scene) {
  std::vector<LampSite> sites;
  for (const auto& node : scene.nodes) {
    if (node.kind != NodeKind::FloorTile) continue;
    auto kind = node.tags.find("cell_kind");
    if (kind == node.tags.end()) continue;
    if (kind->second == "lane" || kind->second == "entrance" || kind->second == "exit") {
      auto cell = node.tags.find("cell");
      sites.push_back({cell == node.tags.end() ? node.id : cell->second, {node.box.center.x, node.box.center.y}});
    }
  }
  return sites;
}

std::size_t lamp_count(std::size_t sites, const LightLevel& level) {
  // Tolerance keeps 0.7 * 10 from rounding up to 8.
  const double want = std::ceil(level.lamp_coverage * static_cast<double>(sites) - 1e-9);
  return std::min(sites, static_cast<std::size_t>(std::max(want, 0.0)));
}

std::vector<SceneNode> make_lamps(const std::vector<LampSite>& sites, const LightLevel& level,
                                  double ceiling_height) {
  std::vector<SceneNode> lamps;
  const std::size_t count = lamp_count(sites.size(), level);
  const double z_top = ceiling_height - kCeilingThickness;
  nlohmann::json intensity(level.lamp_intensity);
  for (std::size_t k = 0; k < count; ++k) {
    SceneNode lamp;
    std::string suffix = sites[k].cell;
    std::replace(suffix.begin(), suffix.end(), ',', '_');
    lamp.id = "lamp_" + suffix;
    lamp.kind = NodeKind::Lamp;
    lamp.box.center = {sites[k].center.x, sites[k].center.y, z_top - 0.025};
    lamp.box.half_extents = {0.3, 0.15, 0.025};
    lamp.tags = {{"cell", sites[k].cell}, {"intensity", intensity.dump()}};
    lamps.push_back(std::move(lamp));
  }
  return lamps;
}

std::size_t count_nodes(const SceneGraph& scene, NodeKind kind) {
  return static_cast<std::size_t>(
      std::count_if(scene.nodes.begin(), scene.nodes.end(), [&](const SceneNode& n) { return n.kind == kind; }));
}

SceneGraph synthesize(const ClassifiedGrid& grid, const SynthOptions& options) {
  const GarageSpec& spec = grid.spec;
  const auto rects = layout_cells(grid);
  const auto xs = prefix_sums(spec.col_widths);
  const auto ys = prefix_sums(spec.row_widths);
  const double h = kCeilingHeight;

  SceneGraph scene;
  scene.light_level = LightLevel::preset(options.light);
  scene.bounds = box_from_bounds({0, 0, 0}, {xs.back(), ys.back(), h});

  // Squares.
  for (std::size_t k = 0; k < rects.size(); ++k) {
    const CellRect& r = rects[k];
    const ClassifiedCell& c = grid.cells[k];
    if (c.kind == CellKind::Obstacle) continue;
    const std::string suffix = id_suffix(c.cell.i, c.cell.j);

    SceneNode tile{"tile_" + suffix, NodeKind::FloorTile, slab(r, 0.0, kFloorThickness), {}};
    tile.tags["cell"] = cell_tag(c.cell);
    tile.tags["cell_kind"] = std::string(to_string(c.kind));
    tile.tags["cnt"] = std::to_string(c.lane_adjacency);
    tile.tags["quarter_turns"] = std::to_string(c.rotation.quarter_turns);
    if (c.lane_subtype) {
      tile.tags["subtype"] = std::string(to_string(*c.lane_subtype));
      tile.tags["render_variant"] = std::string(to_string(c.variant));
    } else if (c.park_subtype) {
      tile.tags["subtype"] = std::string(to_string(*c.park_subtype));
    }
    scene.nodes.push_back(tile);

    const double z0 = kFloorThickness, z1 = kFloorThickness + kMarkingThickness;
    if (c.lane_subtype) {
      SceneNode mark{"lane_mark_" + suffix, NodeKind::LaneMarking,
                     flat_box(r, c.rotation, 0.075, 0.4 * along_local_y(r, c.rotation), z0, z1), {}};
      mark.tags = {{"cell", cell_tag(c.cell)},
                   {"subtype", std::string(to_string(*c.lane_subtype))},
                   {"render_variant", std::string(to_string(c.variant))}};
      scene.nodes.push_back(std::move(mark));
    } else if (c.park_subtype && *c.park_subtype != ParkSubtype::Type4) {
      SceneNode mark{"park_mark_" + suffix, NodeKind::ParkingMarking,
                     flat_box(r, c.rotation, 0.5 * along_local_x(r, c.rotation) - 0.1,
                              0.5 * along_local_y(r, c.rotation) - 0.1, z0, z1),
                     {}};
      mark.tags = {{"cell", cell_tag(c.cell)}, {"subtype", std::string(to_string(*c.park_subtype))}};
      scene.nodes.push_back(std::move(mark));
    }
  }

  // Column network: pillars at interior grid corners next to usable space.
  auto usable = [&](int i, int j) { return grid.at(i, j).kind != CellKind::Obstacle; };
  for (int ci = 1; ci < spec.m; ++ci) {
    for (int cj = 1; cj < spec.n; ++cj) {
      if (!(usable(ci - 1, cj - 1) || usable(ci - 1, cj) || usable(ci, cj - 1) || usable(ci, cj))) continue;
      if (options.pruned_columns.contains(CellRef{ci, cj})) continue;
      SceneNode column{"column_" + id_suffix(ci, cj), NodeKind::Column, {}, {}};
      column.box.center = {xs[cj], ys[ci], 0.5 * h};
      column.box.half_extents = {0.5 * kColumnSize, 0.5 * kColumnSize, 0.5 * h};
      column.tags = {{"corner", cell_tag({ci, cj})}, {"role", "pillar"}};
      scene.nodes.push_back(std::move(column));
    }
  }
  for (std::size_t k = 0; k < rects.size(); ++k) {
    if (grid.cells[k].kind != CellKind::Obstacle) continue;
    const CellRef c = grid.cells[k].cell;
    scene.nodes.push_back({"slab_" + id_suffix(c.i, c.j),
                           NodeKind::Column,
                           slab(rects[k], 0.0, h),
                           {{"cell", cell_tag(c)}, {"role", "slab"}}});
  }

  // Ceiling over the whole envelope.
  for (const CellRect& r : rects) {
    scene.nodes.push_back({"ceiling_" + id_suffix(r.cell.i, r.cell.j),
                           NodeKind::CeilingPanel,
                           slab(r, h - kCeilingThickness, h),
                           {{"cell", cell_tag(r.cell)}}});
  }

  for (auto& lamp : make_lamps(lamp_sites(scene), scene.light_level, h)) scene.nodes.push_back(std::move(lamp));

  for (std::size_t k = 0; k < rects.size(); ++k) {
    const ClassifiedCell& c = grid.cells[k];
    if (c.kind != CellKind::Entrance && c.kind != CellKind::Exit) continue;
    const CellRect& r = rects[k];
    const double z0 = kFloorThickness + kMarkingThickness;
    scene.nodes.push_back({"ramp_" + id_suffix(c.cell.i, c.cell.j),
                           NodeKind::RampMarker,
                           flat_box(r, c.rotation, 0.3 * along_local_x(r, c.rotation),
                                    0.3 * along_local_y(r, c.rotation), z0, z0 + kMarkingThickness),
                           {{"cell", cell_tag(c.cell)}, {"ramp", std::string(to_string(c.kind))}}});
  }
  return scene;
}

SceneNode make_vehicle_node(std::string id, VehicleSize size, Vec2 center, double yaw) {
  const VehicleDims d = vehicle_dims(size);
  SceneNode node;
  node.id = std::move(id);
  node.kind = NodeKind::Vehicle;
  node.box.center = {center.x, center.y, kFloorThickness + 0.5 * d.height};
  node.box.half_extents = {0.5 * d.width, 0.5 * d.length, 0.5 * d.height};
  node.box.yaw = yaw;
  node.tags["vehicle_size"] = std::string(to_string(size));
  return node;
}

SceneGraph populate_vehicles(const SceneGraph& scene, const ClassifiedGrid& grid, const OccupancyPlan& plan) {
  const auto rects = layout_cells(grid);
  SceneGraph out = scene;
  std::set<CellRef> used;
  std::set<std::string> ids;
  for (const auto& node : scene.nodes) ids.insert(node.id);

  for (const OccupancyEntry& e : plan.entries) {
    const std::string where = "(" + cell_tag(e.cell) + ")";
    if (!grid.spec.contains(e.cell)) throw PlanError("occupancy entry " + where + " is outside the grid");
    if (!used.insert(e.cell).second) throw PlanError("cell " + where + " is referenced twice");
    const ClassifiedCell& c = grid.at(e.cell);
    if (c.kind == CellKind::Obstacle) throw PlanError("cell " + where + " is an obstacle");
    if (!e.force) {
      if (c.kind != CellKind::ParkingOrFree) {
        throw PlanError("cell " + where + " is a " + std::string(to_string(c.kind)) + " cell; set force to use it");
      }
      if (c.park_subtype == ParkSubtype::Type4) {
        throw PlanError("cell " + where + " has no lane access (type4); set force to use it");
      }
    }

    const CellRect& r = rects[static_cast<std::size_t>(e.cell.i) * grid.spec.n + e.cell.j];
    const VehicleDims d = vehicle_dims(e.size);
    Vec2 center{0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)};
    SceneNode node = make_vehicle_node("vehicle_" + id_suffix(e.cell.i, e.cell.j), e.size, center,
                                       yaw_of(c.rotation));
    if (!ids.insert(node.id).second) throw PlanError("scene already holds node " + node.id);

    const bool overhang = d.length > along_local_y(r, c.rotation) || d.width > along_local_x(r, c.rotation);
    // Keep the footprint inside the garage envelope when it overhangs the cell.
    const Aabb env = out.bounds.aabb();
    const Aabb box = node.box.aabb();
    auto shift = [](double lo, double hi, double env_lo, double env_hi) {
      if (hi - lo > env_hi - env_lo) return 0.0;
      if (lo < env_lo) return env_lo - lo;
      if (hi > env_hi) return env_hi - hi;
      return 0.0;
    };
    node.box.center.x += shift(box.lo.x, box.hi.x, env.lo.x, env.hi.x);
    node.box.center.y += shift(box.lo.y, box.hi.y, env.lo.y, env.hi.y);

    node.tags["cell"] = cell_tag(e.cell);
    node.tags["parked"] = e.parked ? "true" : "false";
    node.tags["color"] = e.color;
    node.tags["occupied"] = "true";
    if (overhang) node.tags["overhang"] = "true";
    out.nodes.push_back(std::move(node));
  }
  return out;
}

OccupancyPlan parse_occupancy_plan(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != kOccupancySchema) {
    throw ParseError("schema must be \"occupancy/1\"");
  }
  if (!doc.contains("entries") || !doc["entries"].is_array()) throw ParseError("field 'entries' must be an array");
  OccupancyPlan plan;
  for (std::size_t k = 0; k < doc["entries"].size(); ++k) {
    const json& e = doc["entries"][k];
    const std::string at = "entries[" + std::to_string(k) + "]";
    if (!e.is_object() || !e.contains("cell") || !e["cell"].is_array() || e["cell"].size() != 2 ||
        !e["cell"][0].is_number_integer() || !e["cell"][1].is_number_integer()) {
      throw ParseError(at + ": 'cell' must be [i, j]");
    }
    OccupancyEntry entry;
    entry.cell = {e["cell"][0].get<int>(), e["cell"][1].get<int>()};
    try {
      auto size = vehicle_size_from_string(e.value("size", "medium"));
      if (!size) throw ParseError(at + ": unknown vehicle size");
      entry.size = *size;
      entry.parked = e.value("parked", true);
      entry.color = e.value("color", "white");
      entry.force = e.value("force", false);
    } catch (const json::type_error&) {
      throw ParseError(at + ": 'size' and 'color' must be strings, 'parked' and 'force' booleans");
    }
    plan.entries.push_back(std::move(entry));
  }
  return plan;
}

}  // namespace avpgarage

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "avpgarage/geometry.hpp"
#include "avpgarage/tile_classify.hpp"

namespace avpgarage {

// Fixed dimensions of synthesized geometry, meters.
inline constexpr double kCeilingHeight = 3.0;
inline constexpr double kCeilingThickness = 0.1;
inline constexpr double kColumnSize = 0.5;
inline constexpr double kFloorThickness = 0.02;
inline constexpr double kMarkingThickness = 0.005;

enum class NodeKind { FloorTile, LaneMarking, ParkingMarking, Column, CeilingPanel, Lamp, Vehicle, RampMarker };

std::string_view to_string(NodeKind k);
std::optional<NodeKind> node_kind_from_string(std::string_view s);

// Kinds that stop camera rays. Lamps and floor paint do not.
bool is_opaque(NodeKind k);

using Tags = std::map<std::string, std::string>;

struct SceneNode {
  std::string id;
  NodeKind kind = NodeKind::FloorTile;
  Box3 box;
  Tags tags;
  bool operator==(const SceneNode&) const = default;
};

enum class LightPreset { Bright, Clear, Moderate, Dim };

std::string_view to_string(LightPreset p);
std::optional<LightPreset> light_preset_from_string(std::string_view s);

struct LightLevel {
  LightPreset level = LightPreset::Bright;
  double lamp_coverage = 1.0;   // fraction of lamp sites populated
  double lamp_intensity = 1.0;  // relative

  static LightLevel preset(LightPreset p);
  bool operator==(const LightLevel&) const = default;
};

struct SceneGraph {
  std::vector<SceneNode> nodes;
  Box3 bounds;
  LightLevel light_level;

  const SceneNode* find(std::string_view id) const;
  bool operator==(const SceneGraph&) const = default;
};

enum class VehicleSize { Small, Medium, Large };

struct VehicleDims {
  double length;
  double width;
  double height;
};

VehicleDims vehicle_dims(VehicleSize size);
std::string_view to_string(VehicleSize s);
std::optional<VehicleSize> vehicle_size_from_string(std::string_view s);

struct CellRect {
  CellRef cell;
  double x0, x1, y0, y1;
  bool operator==(const CellRect&) const = default;
};

// Cell (i, j) covers [sum C(<j), sum C(<=j)] x [sum R(<i), sum R(<=i)].
std::vector<CellRect> layout_cells(const ClassifiedGrid& grid);

struct SynthOptions {
  LightPreset light = LightPreset::Bright;
  // Interior grid corners (row line, column line) whose column is left out.
  std::set<CellRef> pruned_columns;
};

// Emission order: floor tiles with their markings, column network (pillars,
// then obstacle slabs), ceiling panels, lamps, ramp markers.
SceneGraph synthesize(const ClassifiedGrid& grid, const SynthOptions& options = {});

struct OccupancyEntry {
  CellRef cell;
  VehicleSize size = VehicleSize::Medium;
  bool parked = true;
  std::string color = "white";
  bool force = false;  // allow lane and Type4 cells
};

struct OccupancyPlan {
  std::vector<OccupancyEntry> entries;
};

inline constexpr std::string_view kOccupancySchema = "occupancy/1";
OccupancyPlan parse_occupancy_plan(std::string_view json_text);

// Returns a new graph with one Vehicle node per entry; throws PlanError.
SceneGraph populate_vehicles(const SceneGraph& scene, const ClassifiedGrid& grid, const OccupancyPlan& plan);

// A vehicle box resting on the floor, length along the local y axis.
SceneNode make_vehicle_node(std::string id, VehicleSize size, Vec2 center, double yaw);

struct LampSite {
  std::string cell;  // "i,j" tag of the lane tile
  Vec2 center;
};

// Drivable floor tiles in scene order; every lamp configuration draws from these.
std::vector<LampSite> lamp_sites(const SceneGraph& scene);
std::size_t lamp_count(std::size_t sites, const LightLevel& level);
std::vector<SceneNode> make_lamps(const std::vector<LampSite>& sites, const LightLevel& level, double ceiling_height);

std::size_t count_nodes(const SceneGraph& scene, NodeKind kind);

inline constexpr std::string_view kSceneSchema = "scene/1";

enum class SceneFormat { SceneJson, Obj };

std::string export_scene(const SceneGraph& scene, SceneFormat format = SceneFormat::SceneJson);
SceneGraph import_scene(std::string_view doc);

}  // namespace avpgarage

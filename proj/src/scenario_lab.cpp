#include "avpgarage/scenario_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "avpgarage/errors.hpp"
#include "avpgarage/tile_classify.hpp"
#include "json_io.hpp"

namespace avpgarage {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStallWidth = 2.5;
constexpr double kStallDepth = 5.3;
constexpr Vec2 kCase3Reference{12.0, 2.5};
constexpr double kCase3LaneWidth = 5.0;

// Floor, ceiling and lamps for a plan, without its column network.
SceneGraph bare_scene(const GarageSpec& spec) {
  const ClassifiedGrid grid = classify_all(spec);
  SynthOptions options;
  for (int ci = 1; ci < spec.m; ++ci)
    for (int cj = 1; cj < spec.n; ++cj) options.pruned_columns.insert({ci, cj});
  return synthesize(grid, options);
}

SceneNode make_column(std::string id, Vec2 center) {
  SceneNode column;
  column.id = std::move(id);
  column.kind = NodeKind::Column;
  column.box.center = {center.x, center.y, 0.5 * kCeilingHeight};
  column.box.half_extents = {0.5 * kColumnSize, 0.5 * kColumnSize, 0.5 * kCeilingHeight};
  column.tags = {{"role", "pillar"}};
  return column;
}

bool footprints_overlap(const Box3& a, const Box3& b) {
  const Aabb x = a.aabb(), y = b.aabb();
  return x.lo.x < y.hi.x && y.lo.x < x.hi.x && x.lo.y < y.hi.y && y.lo.y < x.hi.y;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConstructionError(std::string(name) + " must be positive");
}

}  // namespace

std::string_view to_string(ScenarioLabel label) {
  switch (label) {
    case ScenarioLabel::Case1CornerColumn:
      return "case1_corner_column";
    case ScenarioLabel::Case2ParkedEgo:
      return "case2_parked_ego";
    case ScenarioLabel::Case3ParkedRows:
      return "case3_parked_rows";
    case ScenarioLabel::LightOnly:
      return "light_only";
  }
  return "?";
}

std::optional<ScenarioLabel> scenario_label_from_string(std::string_view s) {
  for (ScenarioLabel l : {ScenarioLabel::Case1CornerColumn, ScenarioLabel::Case2ParkedEgo,
                          ScenarioLabel::Case3ParkedRows, ScenarioLabel::LightOnly}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

std::string_view to_string(Slot s) {
  switch (s) {
    case Slot::Far:
      return "far";
    case Slot::Medium:
      return "medium";
    case Slot::Close:
      return "close";
  }
  return "?";
}

std::optional<Slot> slot_from_string(std::string_view s) {
  for (Slot v : {Slot::Far, Slot::Medium, Slot::Close}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

Scenario build_case1(const Case1Params& p) {
  if (!(p.column_setback >= 0.0) || !std::isfinite(p.column_setback)) {
    throw ConstructionError("column_setback must be >= 0");
  }
  require_positive(p.lane_width, "lane_width");
  require_positive(p.target_distance, "target_distance");

  const VehicleDims car = vehicle_dims(VehicleSize::Medium);
  const double w = p.lane_width, inset = p.column_setback + 0.5 * kColumnSize;
  // Ego leg runs along +x in grid row 1; the far leg runs toward -y in column 1.
  const double far_leg = p.target_distance + car.length + 3.0;
  const double depth_behind = p.target_distance + 0.5 * car.length - inset;
  if (depth_behind <= 0.0) throw ConstructionError("target does not sit behind the corner column");
  const double lambda = (0.5 * w + inset) / depth_behind;
  const double approach = inset + lambda * (inset + 0.5 * w) + 2.0;

  const Vec2 corner{approach, far_leg};  // inner corner of the L
  const Vec2 column_at{corner.x - inset, corner.y - inset};
  const Vec2 target_at{corner.x + 0.5 * w, corner.y - p.target_distance - 0.5 * car.length};
  const double lane_y = corner.y + 0.5 * w;
  const double start_x = column_at.x + lambda * (column_at.x - target_at.x);

  GarageSpec spec = GarageSpec::from_rows({{0, 1}, {1, 1}}, {far_leg, w}, {approach, w});
  Scenario scn;
  scn.label = ScenarioLabel::Case1CornerColumn;
  scn.scene = bare_scene(spec);

  SceneNode target = make_vehicle_node("target", VehicleSize::Medium, target_at, 0.0);
  target.tags["role"] = "target";
  const SceneNode column = make_column("corner_column", column_at);
  if (footprints_overlap(target.box, column.box)) throw ConstructionError("target overlaps the corner column");
  if (p.with_column) scn.scene.nodes.push_back(column);
  scn.scene.nodes.push_back(target);

  // Straight approach, quarter-circle turn about the inner corner, then down the far leg.
  scn.ego_path.push_back({{start_x, lane_y}, 0.0});
  scn.ego_path.push_back({{corner.x, lane_y}, 0.0});
  constexpr int kArcSegments = 16;
  for (int k = 1; k <= kArcSegments; ++k) {
    const double phi = 0.5 * kPi * (1.0 - static_cast<double>(k) / kArcSegments);
    scn.ego_path.push_back(
        {{corner.x + 0.5 * w * std::cos(phi), corner.y + 0.5 * w * std::sin(phi)}, phi - 0.5 * kPi});
  }
  scn.ego_path.push_back({{corner.x + 0.5 * w, corner.y - 0.5 * p.target_distance}, -0.5 * kPi});

  scn.target_ids = {"target"};
  scn.structure_ids = {"corner_column"};
  scn.params = {{"column_setback", p.column_setback},
                {"lane_width", p.lane_width},
                {"target_distance", p.target_distance},
                {"with_column", p.with_column ? 1.0 : 0.0}};
  return scn;
}

Scenario build_case2(const Case2Params& p) {
  require_positive(p.column_offset, "column_offset");
  require_positive(p.lane_distance, "lane_distance");
  require_positive(p.pass_half_length, "pass_half_length");
  if (!std::isfinite(p.column_lateral)) throw ConstructionError("column_lateral must be finite");
  const double lane_w = 2.0 * (p.lane_distance - 0.5 * kStallDepth);
  if (lane_w < 2.0) throw ConstructionError("lane_distance leaves a lane narrower than 2 m");

  const double side = p.pass_half_length + 2.0;
  GarageSpec spec = GarageSpec::from_rows({{1, 1, 1}, {0, 0, 0}}, {lane_w, kStallDepth}, {side, kStallWidth, side});
  Scenario scn;
  scn.label = ScenarioLabel::Case2ParkedEgo;
  scn.scene = bare_scene(spec);

  // Ego parked in stall (1,1), nose toward the lane (-y).
  const EgoPose ego{{side + 0.5 * kStallWidth, lane_w + 0.5 * kStallDepth}, -0.5 * kPi};
  const Vec2 column_at{ego.position.x + p.column_lateral, ego.position.y - p.column_offset};
  const double lane_y = 0.5 * lane_w;

  SceneNode target = make_vehicle_node("target", VehicleSize::Medium,
                                       {ego.position.x - p.pass_half_length, lane_y}, -0.5 * kPi);
  target.tags["role"] = "target";
  const SceneNode column = make_column("stall_column", column_at);
  const double reach = 0.5 * vehicle_dims(VehicleSize::Medium).width + 0.5 * kColumnSize;
  if (column_at.y - lane_y < reach) throw ConstructionError("column must stand between the stall and the target's lane");
  if (p.with_column) scn.scene.nodes.push_back(column);
  scn.scene.nodes.push_back(target);

  scn.ego_path = {ego};
  scn.target_path = {{{ego.position.x - p.pass_half_length, lane_y}, 0.0},
                     {{ego.position.x + p.pass_half_length, lane_y}, 0.0}};
  scn.target_ids = {"target"};
  scn.structure_ids = {"stall_column"};
  scn.params = {{"column_offset", p.column_offset},
                {"lane_distance", p.lane_distance},
                {"column_lateral", p.column_lateral},
                {"pass_half_length", p.pass_half_length},
                {"with_column", p.with_column ? 1.0 : 0.0}};
  return scn;
}

std::vector<EgoPose> default_case3_path() {
  return {{{kCase3Reference.x - 10.0, kCase3Reference.y}, 0.0}, {{kCase3Reference.x + 4.0, kCase3Reference.y}, 0.0}};
}

Scenario build_case3(const std::vector<SlotVehicle>& layout, const std::vector<EgoPose>& ego_lane_path,
                     const Case3Params& p) {
  if (layout.empty()) throw ConstructionError("case 3 needs at least one parked vehicle");
  if (ego_lane_path.empty()) throw ConstructionError("case 3 needs an ego lane path");
  require_positive(p.close_offset, "close_offset");
  if (!(p.close_offset < p.medium_offset && p.medium_offset < p.far_offset)) {
    throw ConstructionError("slot offsets must satisfy close < medium < far");
  }
  if (!(p.slot_bearing_deg > 0.0 && p.slot_bearing_deg < 90.0)) {
    throw ConstructionError("slot_bearing_deg must be in (0, 90)");
  }
  const double lane_half = 0.5 * kCase3LaneWidth;
  const double widest = 0.5 * vehicle_dims(VehicleSize::Large).width;
  if (p.close_offset - widest < lane_half) throw ConstructionError("close slot overlaps the lane");

  const double tan_b = std::tan(p.slot_bearing_deg * kPi / 180.0);
  auto offset_of = [&](Slot s) {
    return s == Slot::Close ? p.close_offset : s == Slot::Medium ? p.medium_offset : p.far_offset;
  };
  const double length = kCase3Reference.x + p.far_offset / tan_b + 6.0;
  const double rows = p.far_offset - lane_half + 4.0;
  GarageSpec spec = GarageSpec::from_rows({{1}, {0}}, {kCase3LaneWidth, rows}, {length});

  Scenario scn;
  scn.label = ScenarioLabel::Case3ParkedRows;
  scn.scene = bare_scene(spec);
  std::set<Slot> used;
  for (const SlotVehicle& v : layout) {
    if (!used.insert(v.slot).second) throw ConstructionError("slot '" + std::string(to_string(v.slot)) + "' used twice");
    const double off = offset_of(v.slot);
    const Vec2 at{kCase3Reference.x + off / tan_b, kCase3Reference.y + off};
    // Parked parallel to the lane.
    SceneNode node = make_vehicle_node("vehicle_" + std::string(to_string(v.slot)), v.size, at, 0.5 * kPi);
    node.tags["slot"] = std::string(to_string(v.slot));
    scn.scene.nodes.push_back(node);
    scn.target_ids.push_back(node.id);
  }
  scn.ego_path = ego_lane_path;
  scn.params = {{"close_offset", p.close_offset},
                {"medium_offset", p.medium_offset},
                {"far_offset", p.far_offset},
                {"slot_bearing_deg", p.slot_bearing_deg}};
  return scn;
}

Scenario build_case3(const std::vector<SlotVehicle>& layout) {
  return build_case3(layout, default_case3_path(), Case3Params{});
}

Scenario build_light_only(LightPreset level) {
  GarageSpec spec = GarageSpec::from_rows({{1, 1, 1, 1, 1}}, {5.0}, {6.0, 6.0, 6.0, 6.0, 6.0});
  Scenario scn;
  scn.label = ScenarioLabel::LightOnly;
  scn.scene = apply_light_level(bare_scene(spec), LightLevel::preset(level));
  SceneNode target = make_vehicle_node("target", VehicleSize::Medium, {22.0, 2.5}, 0.5 * kPi);
  target.tags["role"] = "target";
  scn.scene.nodes.push_back(target);
  scn.ego_path = {{{2.0, 2.5}, 0.0}, {{12.0, 2.5}, 0.0}};
  scn.target_ids = {"target"};
  return scn;
}

Scenario build_custom(SceneGraph scene, std::vector<EgoPose> ego_path, std::vector<std::string> target_ids) {
  if (ego_path.empty()) throw ConstructionError("custom scenario needs an ego path");
  if (target_ids.empty()) {
    for (const auto& node : scene.nodes) {
      if (node.kind == NodeKind::Vehicle) target_ids.push_back(node.id);
    }
  }
  if (target_ids.empty()) throw ConstructionError("scene has no vehicle to track");
  for (const auto& id : target_ids) {
    const SceneNode* node = scene.find(id);
    if (!node || node->kind != NodeKind::Vehicle) throw ConstructionError("target '" + id + "' is not a vehicle");
  }
  Scenario scn;
  scn.label = ScenarioLabel::LightOnly;
  scn.scene = std::move(scene);
  scn.ego_path = std::move(ego_path);
  scn.target_ids = std::move(target_ids);
  scn.params = {{"custom_scene", 1.0}};
  return scn;
}

SceneGraph apply_light_level(const SceneGraph& scene, const LightLevel& level) {
  SceneGraph out;
  out.bounds = scene.bounds;
  out.light_level = level;
  std::size_t insert_at = std::string::npos;
  for (const auto& node : scene.nodes) {
    if (node.kind == NodeKind::Lamp) continue;
    out.nodes.push_back(node);
    if (node.kind == NodeKind::CeilingPanel) insert_at = out.nodes.size();
  }
  if (insert_at == std::string::npos) insert_at = out.nodes.size();
  const double ceiling = scene.bounds.center.z + scene.bounds.half_extents.z;
  auto lamps = make_lamps(lamp_sites(out), level, ceiling);
  out.nodes.insert(out.nodes.begin() + static_cast<std::ptrdiff_t>(insert_at), lamps.begin(), lamps.end());
  return out;
}

double light_term(LightPreset level) {
  switch (level) {
    case LightPreset::Bright:
      return 0.0;
    case LightPreset::Clear:
      return 0.2;
    case LightPreset::Moderate:
      return 0.5;
    case LightPreset::Dim:
      return 1.0;
  }
  return 0.0;
}

DifficultyScore score(const std::vector<OcclusionSweep>& sweeps, LightPreset level, const ScoreWeights& weights,
                      double blackout_threshold) {
  if (weights.occlusion < 0 || weights.blackout < 0 || weights.light < 0 ||
      std::abs(weights.occlusion + weights.blackout + weights.light - 1.0) > 1e-9) {
    throw std::invalid_argument("score weights must be non-negative and sum to 1");
  }
  std::size_t samples = 0;
  double occluded = 0.0, blackout = 0.0;
  for (const auto& sw : sweeps) {
    if (sw.samples.empty()) continue;
    std::size_t run = 0, longest = 0;
    for (const auto& v : sw.samples) {
      occluded += 1.0 - v.visible_fraction;
      run = v.visible_fraction < blackout_threshold ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    samples += sw.samples.size();
    blackout = std::max(blackout, static_cast<double>(longest) / static_cast<double>(sw.samples.size()));
  }
  if (samples == 0) throw std::invalid_argument("score needs at least one non-empty sweep");

  DifficultyScore out;
  out.weights = weights;
  out.occlusion_term = occluded / static_cast<double>(samples);
  out.blackout_term = blackout;
  out.light_term = light_term(level);
  out.total = 100.0 * (weights.occlusion * out.occlusion_term + weights.blackout * out.blackout_term +
                       weights.light * out.light_term);
  return out;
}

TargetStats target_stats(const OcclusionSweep& sw) {
  TargetStats st;
  if (sw.samples.empty()) return st;
  st.min_fraction = 1.0;
  double sum = 0.0;
  bool seen = false;
  for (std::size_t k = 0; k < sw.samples.size(); ++k) {
    const double f = sw.samples[k].visible_fraction;
    if (sw.samples[k].in_frustum) {
      st.min_fraction = std::min(st.min_fraction, f);
      seen = true;
    }
    sum += f;
    if (!st.first_full_visibility_s && f >= 1.0) st.first_full_visibility_s = sw.points[k].s;
  }
  if (!seen) st.min_fraction = 0.0;
  st.mean_fraction = sum / static_cast<double>(sw.samples.size());
  return st;
}

RecoveryCheck check_recovery(const OcclusionSweep& sw, const std::vector<std::string>& structure_ids,
                             double clear_threshold) {
  RecoveryCheck out;
  const std::size_t n = sw.samples.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& occ : sw.samples[k].occluders) {
      if (std::find(structure_ids.begin(), structure_ids.end(), occ.id) != structure_ids.end()) out.last_blocked = k;
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    if (sw.samples[k].visible_fraction < clear_threshold) break;
    out.clearing = k;
  }
  out.monotone_after_clear = true;
  for (std::size_t k = out.last_blocked.value_or(0) + 1; k < n; ++k) {
    if (sw.samples[k].visible_fraction < sw.samples[k - 1].visible_fraction) out.monotone_after_clear = false;
  }
  return out;
}

ScenarioReport run_scenario(const Scenario& scn, const CameraConfig& cfg, double step, const ScoreWeights& weights) {
  if (scn.target_ids.empty()) throw ConstructionError("scenario has no targets");
  if (scn.ego_path.empty()) throw ConstructionError("scenario has no ego path");
  ScenarioReport report;
  report.label = scn.label;
  report.params = scn.params;
  report.light = scn.scene.light_level.level;
  report.camera = cfg;

  std::set<std::string> vehicles;
  for (const auto& node : scn.scene.nodes) {
    if (node.kind == NodeKind::Vehicle) vehicles.insert(node.id);
  }
  for (const auto& id : scn.target_ids) {
    OcclusionSweep sw = scn.target_path.empty()
                            ? sweep(scn.scene, scn.ego_path, cfg, id, step)
                            : sweep_target(scn.scene, scn.ego_path.front(), scn.target_path, cfg, id, step);
    std::map<std::string, double> shares;
    for (const auto& v : sw.samples) {
      for (const auto& occ : v.occluders) {
        if (vehicles.contains(occ.id)) shares[occ.id] = std::max(shares[occ.id], occ.fraction);
      }
    }
    for (const auto& [occluder, share] : shares) report.compound_pairs.push_back({occluder, id, share});
    report.stats.push_back(target_stats(sw));
    report.sweeps.push_back(std::move(sw));
  }

  if (scn.label == ScenarioLabel::Case1CornerColumn) {
    const auto& sw = report.sweeps.front();
    report.properties["start_occluded"] = sw.samples.front().visible_fraction < 0.3;
    report.properties["monotone_recovery"] = check_recovery(sw, scn.structure_ids).recovered();
  }
  report.score = score(report.sweeps, report.light, weights);
  return report;
}

std::string export_report(const ScenarioReport& r) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["schema"] = kReportSchema;
  j["label"] = to_string(r.label);
  j["light_level"] = to_string(r.light);
  oj params = oj::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["camera"] = {{"mount_height_m", r.camera.mount_height},
                 {"horizontal_fov_deg", r.camera.horizontal_fov},
                 {"aspect", r.camera.aspect},
                 {"forward", {r.camera.forward.x, r.camera.forward.y}},
                 {"face_samples", r.camera.face_samples}};
  oj targets = oj::array();
  for (std::size_t k = 0; k < r.sweeps.size(); ++k) {
    oj t;
    t["target_id"] = r.sweeps[k].target_id;
    if (k < r.stats.size()) {
      const TargetStats& st = r.stats[k];
      t["min_fraction"] = st.min_fraction;
      t["mean_fraction"] = st.mean_fraction;
      t["first_full_visibility_s"] = st.first_full_visibility_s ? oj(*st.first_full_visibility_s) : oj(nullptr);
    }
    t["sweep"] = detail::sweep_value(r.sweeps[k]);
    targets.push_back(std::move(t));
  }
  j["targets"] = std::move(targets);
  oj pairs = oj::array();
  for (const auto& c : r.compound_pairs) {
    pairs.push_back({{"occluder", c.occluder_id}, {"target", c.target_id}, {"max_share", c.max_share}});
  }
  j["compound_pairs"] = std::move(pairs);
  oj props = oj::object();
  for (const auto& [k, v] : r.properties) props[k] = v;
  j["properties"] = props;
  j["score"] = {{"total", r.score.total},
                {"occlusion_term", r.score.occlusion_term},
                {"blackout_term", r.score.blackout_term},
                {"light_term", r.score.light_term},
                {"weights", {r.score.weights.occlusion, r.score.weights.blackout, r.score.weights.light}}};
  return j.dump(2) + "\n";
}

ScenarioReport import_report(std::string_view doc) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(doc);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != kReportSchema) {
    throw ParseError("report must carry schema \"report/1\"");
  }
  ScenarioReport r;
  try {
    const auto label = scenario_label_from_string(j.at("label").get<std::string>());
    if (!label) throw ParseError("unknown scenario label '" + j.at("label").get<std::string>() + "'");
    r.label = *label;
    const auto light = light_preset_from_string(j.at("light_level").get<std::string>());
    if (!light) throw ParseError("unknown light level '" + j.at("light_level").get<std::string>() + "'");
    r.light = *light;
    if (j.contains("params")) {
      for (const auto& [k, v] : j["params"].items()) r.params[k] = v.get<double>();
    }
    if (j.contains("camera")) {
      const auto& c = j["camera"];
      r.camera.mount_height = c.at("mount_height_m").get<double>();
      r.camera.horizontal_fov = c.at("horizontal_fov_deg").get<double>();
      r.camera.aspect = c.at("aspect").get<double>();
      r.camera.forward = {c.at("forward").at(0).get<double>(), c.at("forward").at(1).get<double>()};
      r.camera.face_samples = c.at("face_samples").get<int>();
    }
    for (const auto& t : j.at("targets")) {
      r.sweeps.push_back(detail::sweep_from_value(t.at("sweep")));
      r.stats.push_back(target_stats(r.sweeps.back()));
    }
    if (j.contains("compound_pairs")) {
      for (const auto& c : j["compound_pairs"]) {
        r.compound_pairs.push_back(
            {c.at("occluder").get<std::string>(), c.at("target").get<std::string>(), c.at("max_share").get<double>()});
      }
    }
    if (j.contains("properties")) {
      for (const auto& [k, v] : j["properties"].items()) r.properties[k] = v.get<bool>();
    }
    ScoreWeights w;
    if (j.contains("score") && j["score"].contains("weights")) {
      const auto& ws = j["score"]["weights"];
      w = {ws.at(0).get<double>(), ws.at(1).get<double>(), ws.at(2).get<double>()};
    }
    if (!r.sweeps.empty()) r.score = score(r.sweeps, r.light, w);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return r;
}

namespace {

nlohmann::json parse_doc(std::string_view doc, const char* what) {
  try {
    return nlohmann::json::parse(doc);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::vector<SlotVehicle> layout_from_value(const nlohmann::json& arr) {
  if (!arr.is_array()) throw ParseError("layout must be an array");
  std::vector<SlotVehicle> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& e = arr[k];
    if (!e.is_object() || !e.contains("slot") || !e["slot"].is_string()) {
      throw ParseError("layout[" + std::to_string(k) + "] needs a string 'slot'");
    }
    const auto slot = slot_from_string(e["slot"].get<std::string>());
    if (!slot) throw ParseError("layout[" + std::to_string(k) + "] has unknown slot '" + e["slot"].get<std::string>() + "'");
    VehicleSize size = VehicleSize::Medium;
    if (e.contains("size")) {
      if (!e["size"].is_string()) throw ParseError("layout[" + std::to_string(k) + "].size must be a string");
      const auto sz = vehicle_size_from_string(e["size"].get<std::string>());
      if (!sz) throw ParseError("layout[" + std::to_string(k) + "] has unknown size '" + e["size"].get<std::string>() + "'");
      size = *sz;
    }
    out.push_back({*slot, size});
  }
  return out;
}

}  // namespace

std::vector<SlotVehicle> parse_layout(std::string_view doc) {
  const auto j = parse_doc(doc, "layout");
  if (j.is_object() && j.contains("layout")) return layout_from_value(j["layout"]);
  return layout_from_value(j);
}

ScenarioRequest parse_scenario_request(std::string_view doc) {
  const auto j = parse_doc(doc, "scenario request");
  if (!j.is_object() || j.value("schema", "") != kScenarioSchema) {
    throw ParseError("scenario request must carry schema \"scenario/1\"");
  }
  ScenarioRequest req;
  if (!j.contains("label") || !j["label"].is_string()) throw ParseError("scenario request needs a string 'label'");
  const auto label = scenario_label_from_string(j["label"].get<std::string>());
  if (!label) throw ParseError("unknown scenario label '" + j["label"].get<std::string>() + "'");
  req.label = *label;
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ParseError("'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      if (v.is_boolean()) {
        req.params[k] = v.get<bool>() ? 1.0 : 0.0;
      } else if (v.is_number()) {
        req.params[k] = v.get<double>();
      } else {
        throw ParseError("param '" + k + "' is not numeric");
      }
    }
  }
  if (j.contains("layout")) req.layout = layout_from_value(j["layout"]);
  if (j.contains("light_level")) {
    if (!j["light_level"].is_string()) throw ParseError("'light_level' must be a string");
    const auto light = light_preset_from_string(j["light_level"].get<std::string>());
    if (!light) throw ParseError("unknown light level '" + j["light_level"].get<std::string>() + "'");
    req.light = *light;
  }
  return req;
}

Scenario build_scenario(const ScenarioRequest& req) {
  std::set<std::string> used;
  auto take = [&](const char* name, double& field) {
    if (auto it = req.params.find(name); it != req.params.end()) {
      field = it->second;
      used.insert(name);
    }
  };
  auto take_flag = [&](const char* name, bool& field) {
    double v = field ? 1.0 : 0.0;
    take(name, v);
    field = v != 0.0;
  };
  Scenario scn;
  switch (req.label) {
    case ScenarioLabel::Case1CornerColumn: {
      Case1Params p;
      take("column_setback", p.column_setback);
      take("lane_width", p.lane_width);
      take("target_distance", p.target_distance);
      take_flag("with_column", p.with_column);
      scn = build_case1(p);
      break;
    }
    case ScenarioLabel::Case2ParkedEgo: {
      Case2Params p;
      take("column_offset", p.column_offset);
      take("lane_distance", p.lane_distance);
      take("column_lateral", p.column_lateral);
      take("pass_half_length", p.pass_half_length);
      take_flag("with_column", p.with_column);
      scn = build_case2(p);
      break;
    }
    case ScenarioLabel::Case3ParkedRows: {
      Case3Params p;
      take("close_offset", p.close_offset);
      take("medium_offset", p.medium_offset);
      take("far_offset", p.far_offset);
      take("slot_bearing_deg", p.slot_bearing_deg);
      const auto layout = req.layout.empty()
                              ? std::vector<SlotVehicle>{{Slot::Far, VehicleSize::Medium},
                                                         {Slot::Medium, VehicleSize::Medium},
                                                         {Slot::Close, VehicleSize::Medium}}
                              : req.layout;
      scn = build_case3(layout, default_case3_path(), p);
      break;
    }
    case ScenarioLabel::LightOnly:
      scn = build_light_only(req.light);
      break;
  }
  for (const auto& [k, v] : req.params) {
    if (!used.contains(k)) throw ParseError("parameter '" + k + "' does not apply to " + std::string(to_string(req.label)));
  }
  if (scn.scene.light_level.level != req.light) scn.scene = apply_light_level(scn.scene, LightLevel::preset(req.light));
  return scn;
}

}  // namespace avpgarage

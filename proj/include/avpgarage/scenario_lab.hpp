#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avpgarage/scene.hpp"
#include "avpgarage/visibility.hpp"

namespace avpgarage {

enum class ScenarioLabel { Case1CornerColumn, Case2ParkedEgo, Case3ParkedRows, LightOnly };

std::string_view to_string(ScenarioLabel label);
std::optional<ScenarioLabel> scenario_label_from_string(std::string_view s);

using Params = std::map<std::string, double>;

struct Scenario {
  SceneGraph scene;
  ScenarioLabel label = ScenarioLabel::LightOnly;
  std::vector<EgoPose> ego_path;     // single pose when the ego is parked
  std::vector<EgoPose> target_path;  // non-empty only when the target moves (case 2)
  std::vector<std::string> target_ids;
  std::vector<std::string> structure_ids;  // occluders the case is built around
  Params params;
};

// Ego rounds an L-shaped corner; a medium car waits in the far leg behind the
// corner column. The path starts where ego, column and target are collinear.
struct Case1Params {
  double column_setback = 0.3;   // gap between column faces and both lane edges
  double lane_width = 5.0;
  double target_distance = 6.0;  // corner edge to the target's rear
  bool with_column = true;
};
Scenario build_case1(const Case1Params& p = {});

// Ego parked nose-out with a column beside its stall; a car passes along the
// lane ahead and is swept past the fixed camera.
struct Case2Params {
  double column_offset = 3.0;   // column center ahead of the camera
  double lane_distance = 6.0;   // camera to lane centerline
  double column_lateral = 1.5;  // column center beside the camera axis
  double pass_half_length = 12.0;
  bool with_column = true;
};
Scenario build_case2(const Case2Params& p = {});

enum class Slot { Far, Medium, Close };
std::string_view to_string(Slot s);
std::optional<Slot> slot_from_string(std::string_view s);

struct SlotVehicle {
  Slot slot;
  VehicleSize size;
};

// Three parked rows beside the ego lane. Slot centers lie on one sightline
// from the reference pose, so nearer rows cover farther ones.
struct Case3Params {
  double close_offset = 4.0;
  double medium_offset = 8.0;
  double far_offset = 12.0;
  double slot_bearing_deg = 25.0;
};
std::vector<EgoPose> default_case3_path();
Scenario build_case3(const std::vector<SlotVehicle>& layout, const std::vector<EgoPose>& ego_lane_path,
                     const Case3Params& p = {});
Scenario build_case3(const std::vector<SlotVehicle>& layout);

// One unoccluded car ahead of a straight approach.
Scenario build_light_only(LightPreset level = LightPreset::Bright);
// Wraps an arbitrary scene (for example one written by `generate`).
Scenario build_custom(SceneGraph scene, std::vector<EgoPose> ego_path, std::vector<std::string> target_ids);

// Replaces every lamp; non-lamp nodes keep their order and geometry.
SceneGraph apply_light_level(const SceneGraph& scene, const LightLevel& level);

struct ScoreWeights {
  double occlusion = 0.4;
  double blackout = 0.4;
  double light = 0.2;
};

struct DifficultyScore {
  double total = 0.0;
  double occlusion_term = 0.0;
  double blackout_term = 0.0;
  double light_term = 0.0;
  ScoreWeights weights;
};

inline constexpr double kBlackoutThreshold = 0.2;

double light_term(LightPreset level);
DifficultyScore score(const std::vector<OcclusionSweep>& sweeps, LightPreset level, const ScoreWeights& weights = {},
                      double blackout_threshold = kBlackoutThreshold);

struct TargetStats {
  double min_fraction = 0.0;  // over in-frustum samples; 0 when the target is never in view
  double mean_fraction = 0.0;
  std::optional<double> first_full_visibility_s;
};

TargetStats target_stats(const OcclusionSweep& sweep);

struct CompoundPair {
  std::string occluder_id;
  std::string target_id;
  double max_share = 0.0;  // largest blocked share over the sweep
};

// Recovery of a case-1 sweep once the corner column stops blocking.
struct RecoveryCheck {
  std::optional<std::size_t> last_blocked;  // last sample the structure blocks
  std::optional<std::size_t> clearing;      // first index with all later fractions >= 0.9
  bool monotone_after_clear = false;
  bool recovered() const { return clearing.has_value() && monotone_after_clear; }
};
RecoveryCheck check_recovery(const OcclusionSweep& sweep, const std::vector<std::string>& structure_ids,
                             double clear_threshold = 0.9);

struct ScenarioReport {
  ScenarioLabel label = ScenarioLabel::LightOnly;
  Params params;
  LightPreset light = LightPreset::Bright;
  CameraConfig camera;
  std::vector<OcclusionSweep> sweeps;  // one per target
  std::vector<TargetStats> stats;
  std::vector<CompoundPair> compound_pairs;
  std::map<std::string, bool> properties;
  DifficultyScore score;
};

ScenarioReport run_scenario(const Scenario& scn, const CameraConfig& cfg = {}, double step = 0.5,
                            const ScoreWeights& weights = {});

inline constexpr std::string_view kReportSchema = "report/1";
inline constexpr std::string_view kScenarioSchema = "scenario/1";

std::string export_report(const ScenarioReport& report);
// Reads back what score() needs: label, light level, sweeps.
ScenarioReport import_report(std::string_view doc);

// "scenario/1" parameter document.
struct ScenarioRequest {
  ScenarioLabel label = ScenarioLabel::Case1CornerColumn;
  Params params;
  std::vector<SlotVehicle> layout;
  LightPreset light = LightPreset::Bright;
};
ScenarioRequest parse_scenario_request(std::string_view doc);
std::vector<SlotVehicle> parse_layout(std::string_view doc);
Scenario build_scenario(const ScenarioRequest& request);

}  // namespace avpgarage

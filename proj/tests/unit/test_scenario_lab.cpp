#include <cmath>
#include <numbers>

#include "avpgarage/scenario_lab.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace avpgarage;

namespace {

constexpr double kPi = std::numbers::pi;

oracle::V3 v3(Vec3 p) { return {p.x, p.y, p.z}; }

Box3 target_box_at(const Scenario& scn, const EgoPose& pose) {
  Box3 b = scn.scene.find(scn.target_ids.front())->box;
  b.center.x = pose.position.x;
  b.center.y = pose.position.y;
  b.yaw = pose.heading - kPi / 2;
  return b;
}

// Lowest fraction over samples with the target centre inside the camera view.
double centred_min(const Scenario& scn, const OcclusionSweep& sw) {
  const Frustum cam = make_camera(scn.ego_path.front(), {});
  double m = 1.0;
  for (std::size_t k = 0; k < sw.samples.size(); ++k) {
    if (cam.contains(target_box_at(scn, sw.points[k].pose).center)) m = std::min(m, sw.samples[k].visible_fraction);
  }
  return m;
}

OcclusionSweep run1(const Scenario& scn) { return run_scenario(scn).sweeps.front(); }

}  // namespace

TEST_CASE("labels and slots round trip through strings") {
  for (auto l : {ScenarioLabel::Case1CornerColumn, ScenarioLabel::Case2ParkedEgo, ScenarioLabel::Case3ParkedRows,
                 ScenarioLabel::LightOnly}) {
    CHECK(scenario_label_from_string(to_string(l)) == l);
  }
  for (auto s : {Slot::Far, Slot::Medium, Slot::Close}) CHECK(slot_from_string(to_string(s)) == s);
  CHECK_FALSE(scenario_label_from_string("case4").has_value());
}

TEST_CASE("case 1: the corner column hides the target at the start") {
  const Scenario scn = build_case1();
  const auto sw = run1(scn);
  REQUIRE(sw.samples.size() >= 10);
  CHECK(sw.samples.front().visible_fraction < 0.3);
  CHECK(sw.samples.back().visible_fraction > 0.9);

  // At the start the sightline to the target centre passes through the column.
  const SceneNode* column = scn.scene.find("corner_column");
  REQUIRE(column);
  const Frustum cam = make_camera(scn.ego_path.front(), {});
  const Vec3 target = scn.scene.find("target")->box.center;
  CHECK(oracle::segment_hits_box(column->box, v3(cam.apex), v3(target)).has_value());
  const Frustum end = make_camera(scn.ego_path.back(), {});
  CHECK_FALSE(oracle::segment_hits_box(column->box, v3(end.apex), v3(target)).has_value());
}

TEST_CASE("case 1: recovery is monotone once the column leaves the sightline") {
  const Scenario scn = build_case1();
  const auto sw = run1(scn);
  const SceneNode* column = scn.scene.find("corner_column");
  const Vec3 target = scn.scene.find("target")->box.center;
  std::size_t last_on_line = 0;
  for (std::size_t k = 0; k < sw.points.size(); ++k) {
    const Frustum cam = make_camera(sw.points[k].pose, {});
    if (oracle::segment_hits_box(column->box, v3(cam.apex), v3(target))) last_on_line = k;
  }
  for (std::size_t k = last_on_line + 1; k < sw.samples.size(); ++k) {
    CHECK(sw.samples[k].visible_fraction >= sw.samples[k - 1].visible_fraction);
  }
  const RecoveryCheck rc = check_recovery(sw, scn.structure_ids);
  REQUIRE(rc.clearing.has_value());
  for (std::size_t k = *rc.clearing; k < sw.samples.size(); ++k) CHECK(sw.samples[k].visible_fraction >= 0.9);
  CHECK(rc.recovered());
  CHECK(run_scenario(scn).properties.at("monotone_recovery"));
}

TEST_CASE("case 1: removing the column never lowers visibility") {
  Case1Params p;
  const auto with = run1(build_case1(p));
  p.with_column = false;
  const auto without = run1(build_case1(p));
  REQUIRE(with.samples.size() == without.samples.size());
  for (std::size_t k = 0; k < with.samples.size(); ++k) {
    CHECK(without.samples[k].visible_fraction >= with.samples[k].visible_fraction);
  }
}

TEST_CASE("case 1: a farther target is no easier to see at the start") {
  double prev = 2.0;
  for (double d : {4.0, 6.0, 8.0, 12.0}) {
    Case1Params p;
    p.target_distance = d;
    const double f = run1(build_case1(p)).samples.front().visible_fraction;
    CHECK(f <= prev);
    prev = f;
  }
}

TEST_CASE("case 1: impossible geometry") {
  CHECK_THROWS_AS(build_case1({0.1, 1.0, 0.2, true}), ConstructionError);
  CHECK_THROWS_AS(build_case1({0.3, -5.0, 6.0, true}), ConstructionError);
  CHECK_THROWS_AS(build_case1({0.3, 5.0, 0.0, true}), ConstructionError);
}

TEST_CASE("case 2: minimum lies where the column bearing crosses the car") {
  const Scenario scn = build_case2();
  const auto sw = run1(scn);
  const EgoPose ego = scn.ego_path.front();
  const Frustum cam = make_camera(ego, {});
  const Vec3 col = scn.scene.find("stall_column")->box.center;
  const Vec3 far_point = cam.apex + 40.0 * (Vec3{col.x, col.y, cam.apex.z} - cam.apex);

  // Consider samples with the car centred in view; near the frustum edge only a sliver remains eligible.
  std::vector<std::size_t> centred;
  for (std::size_t k = 0; k < sw.samples.size(); ++k) {
    if (cam.contains(target_box_at(scn, sw.points[k].pose).center)) centred.push_back(k);
  }
  REQUIRE(centred.size() >= 3);
  std::size_t argmin = centred.front();
  for (std::size_t k : centred) {
    if (sw.samples[k].visible_fraction < sw.samples[argmin].visible_fraction) argmin = k;
  }
  const double low = sw.samples[argmin].visible_fraction;
  CHECK(low < 1.0);
  CHECK(oracle::segment_hits_box(target_box_at(scn, sw.points[argmin].pose), v3(cam.apex), v3(far_point)).has_value());
  for (std::size_t k : centred) {
    const Box3 b = target_box_at(scn, sw.points[k].pose);
    if (!oracle::segment_hits_box(b, v3(cam.apex), v3(far_point))) CHECK(sw.samples[k].visible_fraction > low);
  }
}

TEST_CASE("case 2: a farther column blocks less") {
  // Slide the column along a fixed bearing so only its distance changes.
  double prev = -1.0;
  for (double offset : {2.0, 2.5, 3.0, 3.5, 4.0, 4.5}) {
    Case2Params p;
    p.column_offset = offset;
    p.column_lateral = 0.25 * offset;
    const Scenario scn = build_case2(p);
    const double m = centred_min(scn, run1(scn));
    CAPTURE(offset);
    CHECK(m < 1.0);
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("case 2: without the column the passing car is fully visible") {
  Case2Params p;
  p.with_column = false;
  const Scenario scn = build_case2(p);
  const auto sw = run1(scn);
  for (std::size_t k = 0; k < sw.samples.size(); ++k) {
    if (sw.samples[k].in_frustum) CHECK(sw.samples[k].visible_fraction == 1.0);
  }
}

TEST_CASE("case 2: impossible geometry") {
  Case2Params p;
  p.column_offset = 5.5;
  CHECK_THROWS_AS(build_case2(p), ConstructionError);
  p = {};
  p.lane_distance = 3.0;
  CHECK_THROWS_AS(build_case2(p), ConstructionError);
}

TEST_CASE("case 3: a lone parked car is in plain view") {
  for (Slot slot : {Slot::Far, Slot::Medium, Slot::Close}) {
    const auto sw = run1(build_case3({{slot, VehicleSize::Small}}));
    bool seen = false;
    for (const auto& v : sw.samples) {
      if (!v.in_frustum) continue;
      seen = true;
      CHECK(v.visible_fraction == 1.0);
    }
    CHECK(seen);
  }
}

TEST_CASE("case 3: added cars only ever hide more") {
  for (VehicleSize occ : {VehicleSize::Small, VehicleSize::Medium, VehicleSize::Large}) {
    for (VehicleSize tgt : {VehicleSize::Small, VehicleSize::Medium, VehicleSize::Large}) {
      const auto solo = run_scenario(build_case3({{Slot::Far, tgt}}));
      const auto both = run_scenario(build_case3({{Slot::Close, occ}, {Slot::Far, tgt}}));
      const auto& a = solo.sweeps.front();
      const auto& b = both.sweeps.back();
      REQUIRE(b.target_id == "vehicle_far");
      for (std::size_t k = 0; k < a.samples.size(); ++k) {
        CHECK(b.samples[k].visible_fraction <= a.samples[k].visible_fraction);
      }
      bool shared_hidden = false;
      for (const auto& pair : both.compound_pairs) {
        if (pair.occluder_id == "vehicle_close" && pair.target_id == "vehicle_far") shared_hidden = true;
      }
      CHECK(shared_hidden);
    }
  }
}

TEST_CASE("case 3: large covering small is worse than small covering large") {
  auto min_far = [](VehicleSize occ, VehicleSize tgt) {
    const auto r = run_scenario(build_case3({{Slot::Close, occ}, {Slot::Far, tgt}}));
    return r.stats.back().min_fraction;
  };
  CHECK(min_far(VehicleSize::Large, VehicleSize::Small) < min_far(VehicleSize::Small, VehicleSize::Large));
}

TEST_CASE("case 3: bad layouts") {
  CHECK_THROWS_AS(build_case3({}), ConstructionError);
  CHECK_THROWS_AS(build_case3({{Slot::Far, VehicleSize::Small}, {Slot::Far, VehicleSize::Large}}), ConstructionError);
  Case3Params p;
  p.medium_offset = 20;
  CHECK_THROWS_AS(build_case3({{Slot::Far, VehicleSize::Small}}, default_case3_path(), p), ConstructionError);
}

TEST_CASE("light levels") {
  const SceneGraph base = build_light_only(LightPreset::Bright).scene;
  const std::size_t sites = lamp_sites(base).size();
  CHECK(count_nodes(base, NodeKind::Lamp) == sites);
  const SceneGraph dim = apply_light_level(base, LightLevel::preset(LightPreset::Dim));
  CHECK(count_nodes(dim, NodeKind::Lamp) == lamp_count(sites, LightLevel::preset(LightPreset::Dim)));
  CHECK(dim.light_level.level == LightPreset::Dim);
  CHECK(apply_light_level(dim, LightLevel::preset(LightPreset::Bright)) == base);

  // Non-lamp geometry is untouched.
  std::vector<SceneNode> a, b;
  for (const auto& n : base.nodes)
    if (n.kind != NodeKind::Lamp) a.push_back(n);
  for (const auto& n : dim.nodes)
    if (n.kind != NodeKind::Lamp) b.push_back(n);
  CHECK(a == b);
}

TEST_CASE("score formula") {
  OcclusionSweep clear;
  clear.samples.resize(4);
  clear.points.resize(4);
  for (auto& v : clear.samples) v.visible_fraction = 1.0;
  CHECK(score({clear}, LightPreset::Bright).total == 0.0);

  OcclusionSweep dark = clear;
  for (auto& v : dark.samples) v.visible_fraction = 0.0;
  CHECK(score({dark}, LightPreset::Dim).total == doctest::Approx(100.0));

  OcclusionSweep mixed = clear;
  mixed.samples[1].visible_fraction = 0.1;
  mixed.samples[2].visible_fraction = 0.15;
  const auto s = score({mixed}, LightPreset::Moderate);
  CHECK(s.occlusion_term == doctest::Approx((0.9 + 0.85) / 4));
  CHECK(s.blackout_term == doctest::Approx(0.5));
  CHECK(s.light_term == 0.5);
  CHECK(s.total == doctest::Approx(100 * (0.4 * s.occlusion_term + 0.4 * 0.5 + 0.2 * 0.5)));
  CHECK(score({mixed}, LightPreset::Moderate, {1, 0, 0}).total == doctest::Approx(100 * s.occlusion_term));

  double prev = -1;
  for (auto level : {LightPreset::Bright, LightPreset::Clear, LightPreset::Moderate, LightPreset::Dim}) {
    const double t = score({mixed}, level).total;
    CHECK(t > prev);
    prev = t;
  }
  CHECK_THROWS_AS(score({}, LightPreset::Bright), std::invalid_argument);
  CHECK_THROWS_AS(score({mixed}, LightPreset::Bright, {0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(score({mixed}, LightPreset::Bright, {1.2, -0.2, 0}), std::invalid_argument);
}

TEST_CASE("stats come from the sweeps") {
  const auto r = run_scenario(build_case1());
  const auto again = target_stats(r.sweeps.front());
  CHECK(again.min_fraction == r.stats.front().min_fraction);
  CHECK(again.mean_fraction == r.stats.front().mean_fraction);
  REQUIRE(r.stats.front().first_full_visibility_s.has_value());
}

TEST_CASE("reports are deterministic and round trip") {
  const auto r = run_scenario(build_case3({{Slot::Close, VehicleSize::Large}, {Slot::Far, VehicleSize::Small}}));
  const std::string text = export_report(r);
  CHECK(text == export_report(run_scenario(build_case3({{Slot::Close, VehicleSize::Large},
                                                         {Slot::Far, VehicleSize::Small}}))));
  const ScenarioReport back = import_report(text);
  CHECK(back.label == r.label);
  CHECK(back.sweeps.size() == r.sweeps.size());
  CHECK(back.score.total == doctest::Approx(r.score.total));
  CHECK(back.properties == r.properties);
  CHECK(back.compound_pairs.size() == r.compound_pairs.size());
  CHECK(back.camera == r.camera);
  CHECK(export_report(back) == text);
  CHECK_THROWS_AS(import_report("{}"), ParseError);
  CHECK_THROWS_AS(import_report("[1"), ParseError);
}

TEST_CASE("scenario requests") {
  const auto req = parse_scenario_request(
      R"({"schema":"scenario/1","label":"case2_parked_ego","params":{"column_offset":4.0,"with_column":true},"light_level":"dim"})");
  CHECK(req.label == ScenarioLabel::Case2ParkedEgo);
  CHECK(req.params.at("column_offset") == 4.0);
  const Scenario scn = build_scenario(req);
  CHECK(scn.scene.light_level.level == LightPreset::Dim);
  CHECK(scn.params.at("column_offset") == 4.0);

  ScenarioRequest wrong = req;
  wrong.params["far_offset"] = 3;
  CHECK_THROWS_AS(build_scenario(wrong), ParseError);
  CHECK_THROWS_AS(parse_scenario_request(R"({"schema":"scenario/1","label":"case9"})"), ParseError);
  CHECK_THROWS_AS(parse_scenario_request(R"({"schema":"scenario/1","label":"light_only","params":{"a":"b"}})"),
                  ParseError);

  const auto layout = parse_layout(R"([{"slot":"close","size":"large"},{"slot":"far"}])");
  REQUIRE(layout.size() == 2);
  CHECK(layout[0].size == VehicleSize::Large);
  CHECK(layout[1].size == VehicleSize::Medium);
  CHECK_THROWS_AS(parse_layout(R"([{"slot":"middle"}])"), ParseError);
}

TEST_CASE("custom scenes") {
  const Scenario light = build_light_only();
  const Scenario scn = build_custom(light.scene, {{{2, 2.5}, 0.0}, {{6, 2.5}, 0.0}}, {});
  CHECK(scn.target_ids == std::vector<std::string>{"target"});
  CHECK_THROWS_AS(build_custom(light.scene, {{{2, 2.5}, 0.0}}, {"tile_0_0"}), ConstructionError);
  CHECK_THROWS_AS(build_custom(light.scene, {}, {}), ConstructionError);
}

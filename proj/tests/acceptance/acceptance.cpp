// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "avpgarage/grid_model.hpp"
#include "avpgarage/scenario_lab.hpp"
#include "avpgarage/scene.hpp"
#include "avpgarage/tile_classify.hpp"
#include "avpgarage/visibility.hpp"
#include "oracles.hpp"

using namespace avpgarage;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Keeps the first failure message; later ones are only counted.
struct Tally {
  std::size_t checks = 0, failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first = what;
  }
  Outcome outcome(std::string detail) const {
    if (failures) detail += "; " + std::to_string(failures) + " failed, first: " + first;
    return {failures == 0, std::move(detail)};
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, const char* f = "%.3f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GarageSpec random_valid_spec(std::mt19937& rng, int max_dim) {
  for (;;) {
    GarageSpec s = oracle::random_spec(rng, max_dim);
    if (validate(s).ok) return s;
  }
}

// 1. Injected single violations are flagged exactly; clean specs pass.
Outcome validation_completeness() {
  std::mt19937 rng(101);
  Tally t;
  for (int k = 0; k < 1000; ++k) {
    const GarageSpec clean = random_valid_spec(rng, 6);
    t.expect(validate(clean).violations.empty(), "clean spec flagged");
  }
  std::uniform_int_distribution<int> pick(0, 2), bad_code(2, 9);
  for (int k = 0; k < 1000; ++k) {
    GarageSpec s = random_valid_spec(rng, 6);
    while (s.m * s.n < 2) s = random_valid_spec(rng, 6);
    RuleId rule;
    std::string location;
    switch (pick(rng)) {
      case 0:
        rule = RuleId::RowWidthsLength;
        location = "row_widths";
        if (rng() % 2 || s.m == 0) s.row_widths.push_back(4.0);
        else s.row_widths.pop_back();
        break;
      case 1:
        rule = RuleId::ColWidthsLength;
        location = "col_widths";
        if (rng() % 2) s.col_widths.push_back(4.0);
        else s.col_widths.pop_back();
        break;
      default: {
        rule = RuleId::CellCode;
        // Keep one drivable cell so the no-lane rule stays quiet.
        std::vector<int> cells;
        int drivable = 0;
        for (int c = 0; c < s.m * s.n; ++c) drivable += oracle::drivable_code(s.structure[c]);
        for (int c = 0; c < s.m * s.n; ++c) {
          if (!oracle::drivable_code(s.structure[c]) || drivable > 1) cells.push_back(c);
        }
        const int c = cells[rng() % cells.size()];
        const int code = bad_code(rng);
        s.structure[c] = (rng() % 2) ? code + 2 : -code;  // 4..11 or -9..-2
        location = "structure[" + std::to_string(c / s.n) + "][" + std::to_string(c % s.n) + "]";
      }
    }
    const auto r = validate(s);
    t.expect(r.violations.size() == 1 && r.violations[0].rule == rule && r.violations[0].location == location,
             "injected " + std::string(to_string(rule)) + " at " + location + " gave " +
                 std::to_string(r.violations.size()) + " violations");
  }
  return t.outcome("1000 injected, 1000 clean");
}

// 2. Every centre kind x neighbour pattern x truncation against the tables.
Outcome classifier_oracle() {
  Tally t;
  for (int centre : {-1, 0, 1, 2, 3}) {
    for (unsigned off = 0; off < 16; ++off) {
      for (unsigned lanes = 0; lanes < 16; ++lanes) {
        if (lanes & off) continue;
        for (int filler : {-1, 0}) {
          const oracle::Probe p = oracle::probe(centre, lanes, off, filler);
          const std::string at = "centre " + std::to_string(centre) + " lanes " + std::to_string(lanes) + " off " +
                                 std::to_string(off);
          if (oracle::drivable_code(centre)) {
            const LaneSubtype got = classify_lane(p.spec, p.cell);
            const char c = got == LaneSubtype::Crossroads ? 'X' : got == LaneSubtype::TJunction ? 'T' : 'S';
            t.expect(c == oracle::kLaneTable[lanes], at);
            t.expect(count_lane_neighbors(p.spec, p.cell) == std::popcount(lanes), at);
          } else if (centre == 0) {
            t.expect(static_cast<int>(classify_parking(p.spec, p.cell)) + 1 == oracle::kParkTable[lanes], at);
          } else {
            bool threw = false;
            try {
              classify_parking(p.spec, p.cell);
            } catch (const DomainError&) {
              threw = true;
            }
            t.expect(threw, at + " obstacle accepted");
          }
        }
      }
    }
  }
  return t.outcome(std::to_string(t.checks) + " checks");
}

// 3. Quarter turn of the plan commutes with classification.
Outcome rotation_equivariance() {
  std::mt19937 rng(303);
  Tally t;
  std::size_t cells = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const GarageSpec s = oracle::random_spec(rng, 20);
    const GarageSpec r = oracle::quarter_turn(s);
    const ClassifiedGrid a = classify_all(s), b = classify_all(r);
    for (const auto& c : a.cells) {
      const ClassifiedCell& d = b.at(c.cell.j, s.m - 1 - c.cell.i);
      const int period = rotational_period(c);
      const bool same = d.kind == c.kind && d.lane_adjacency == c.lane_adjacency && d.lane_subtype == c.lane_subtype &&
                        d.park_subtype == c.park_subtype && d.variant == c.variant &&
                        rotational_period(d) == period &&
                        (c.rotation.quarter_turns + 1) % period == d.rotation.quarter_turns % period;
      t.expect(same, "cell " + std::to_string(c.cell.i) + "," + std::to_string(c.cell.j));
      ++cells;
    }
  }
  return t.outcome("200 specs, " + std::to_string(cells) + " cells, turns compared modulo the tile's period");
}

// 4. Cell rectangles tile the footprint.
Outcome geometry_tiling() {
  std::mt19937 rng(404);
  Tally t;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const GarageSpec s = oracle::random_spec(rng, 15);
    const auto rects = layout_cells(classify_all(s));
    double area = 0.0, sum_r = 0.0, sum_c = 0.0;
    for (double r : s.row_widths) sum_r += r;
    for (double c : s.col_widths) sum_c += c;
    bool disjoint = true;
    for (std::size_t a = 0; a < rects.size(); ++a) {
      area += (rects[a].x1 - rects[a].x0) * (rects[a].y1 - rects[a].y0);
      for (std::size_t b = a + 1; b < rects.size(); ++b) {
        const double ox = std::min(rects[a].x1, rects[b].x1) - std::max(rects[a].x0, rects[b].x0);
        const double oy = std::min(rects[a].y1, rects[b].y1) - std::max(rects[a].y0, rects[b].y0);
        if (ox > 1e-9 && oy > 1e-9) disjoint = false;
      }
    }
    const double rel = std::abs(area - sum_r * sum_c) / (sum_r * sum_c);
    worst = std::max(worst, rel);
    t.expect(disjoint, "overlap in trial " + std::to_string(trial));
    t.expect(rel <= 1e-9, "area off in trial " + std::to_string(trial));
  }
  return t.outcome("200 specs, worst relative area error " + num(worst, "%.2e"));
}

// 5. Engine vs dense oracle vs analytic shadow share.
Outcome visibility_accuracy() {
  std::mt19937 rng(505);
  std::uniform_real_distribution<double> depth(3.0, 7.0), edge(-3.5, 3.5), thick(0.05, 0.6), car(9.0, 13.0);
  Tally t;
  double worst_oracle = 0.0, worst_analytic = 0.0;
  const EgoPose ego{{0, 0}, 0.0};
  for (int k = 0; k < 50; ++k) {
    oracle::ShadowFixture f;
    if (k == 0) {
      f = oracle::shadow_fixture(10, 5, 5.2, 0.0, 3.0);  // slab edge on the axis: exactly half
      t.expect(std::abs(f.expected_visible - 0.5) < 1e-12, "half fixture is not 0.5");
    } else {
      const double x0 = depth(rng), y0 = edge(rng);
      f = oracle::shadow_fixture(car(rng), x0, x0 + thick(rng), y0, y0 + 0.3 + std::abs(edge(rng)));
    }
    const double engine = visible_fraction(f.scene, ego, {}, "target").visible_fraction;
    const double dense = oracle::visible_fraction(f.scene, ego, {}, "target", 512).fraction;
    worst_oracle = std::max(worst_oracle, std::abs(engine - dense));
    worst_analytic = std::max(worst_analytic, std::abs(engine - f.expected_visible));
    t.expect(std::abs(engine - dense) <= 0.05, "fixture " + std::to_string(k) + " vs oracle");
    t.expect(std::abs(engine - f.expected_visible) <= 0.05, "fixture " + std::to_string(k) + " vs analytic");
  }
  return t.outcome("50 fixtures, max |engine-oracle| " + num(worst_oracle) + ", max |engine-analytic| " +
                   num(worst_analytic));
}

// 6. Corner column: hidden at the start, recovered at the end, pruning only helps.
Outcome case1_behaviour() {
  Tally t;
  const Scenario scn = build_case1();
  const ScenarioReport r = run_scenario(scn, {}, 0.5);
  const OcclusionSweep& sw = r.sweeps.front();
  const double start = sw.samples.front().visible_fraction;
  t.expect(start < 0.3, "start fraction " + num(start));
  const RecoveryCheck rc = check_recovery(sw, scn.structure_ids);
  t.expect(rc.clearing.has_value(), "no clearing sample");
  if (rc.clearing) {
    for (std::size_t k = *rc.clearing; k < sw.samples.size(); ++k) {
      t.expect(sw.samples[k].visible_fraction >= 0.9, "after clearing at " + std::to_string(k));
    }
  }
  Case1Params p;
  p.with_column = false;
  const OcclusionSweep open = run_scenario(build_case1(p), {}, 0.5).sweeps.front();
  t.expect(open.samples.size() == sw.samples.size(), "pruned sweep length");
  for (std::size_t k = 0; k < std::min(open.samples.size(), sw.samples.size()); ++k) {
    t.expect(open.samples[k].visible_fraction >= sw.samples[k].visible_fraction, "pruned lower at " + std::to_string(k));
  }
  return t.outcome(std::to_string(sw.samples.size()) + " samples, start " + num(start) + ", clearing at " +
                   (rc.clearing ? std::to_string(*rc.clearing) : std::string("none")));
}

// 7. A larger car in the close row hides the far target at least as much.
Outcome case3_ordering() {
  Tally t;
  const VehicleSize sizes[3] = {VehicleSize::Small, VehicleSize::Medium, VehicleSize::Large};
  double lows[3][3] = {};
  for (int o = 0; o < 3; ++o) {
    for (int g = 0; g < 3; ++g) {
      if (o == g) continue;
      const ScenarioReport r = run_scenario(build_case3({{Slot::Close, sizes[o]}, {Slot::Far, sizes[g]}}));
      lows[o][g] = r.stats.back().min_fraction;
    }
  }
  int strict = 0;
  std::string detail;
  for (int g = 0; g < 3; ++g) {
    int a = -1, b = -1;  // the two other sizes, a smaller than b
    for (int o = 0; o < 3; ++o) {
      if (o == g) continue;
      (a < 0 ? a : b) = o;
    }
    t.expect(lows[b][g] <= lows[a][g], std::string(to_string(sizes[g])) + " target");
    if (lows[b][g] < lows[a][g]) ++strict;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(to_string(sizes[g])) + " " + num(lows[b][g]) +
              "<=" + num(lows[a][g]);
  }
  t.expect(strict > 0, "no strict pair");
  return t.outcome("6 pairs; " + detail + "; strict on " + std::to_string(strict));
}

Scenario random_scenario(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const LightPreset lights[4] = {LightPreset::Bright, LightPreset::Clear, LightPreset::Moderate, LightPreset::Dim};
  const LightPreset light = lights[rng() % 4];
  Scenario scn;
  switch (rng() % 4) {
    case 0: {
      Case1Params p;
      p.target_distance = 3.0 + 7.0 * u(rng);
      p.column_setback = 0.2 + 0.4 * u(rng);
      scn = build_case1(p);
      break;
    }
    case 1: {
      Case2Params p;
      p.column_offset = 2.0 + 2.5 * u(rng);
      p.column_lateral = 0.5 + 1.5 * u(rng);
      scn = build_case2(p);
      break;
    }
    case 2: {
      std::vector<SlotVehicle> layout;
      for (Slot slot : {Slot::Close, Slot::Medium, Slot::Far}) {
        if (layout.empty() || rng() % 2) {
          layout.push_back({slot, static_cast<VehicleSize>(rng() % 3)});
        }
      }
      scn = build_case3(layout);
      break;
    }
    default:
      scn = build_light_only();
  }
  scn.scene = apply_light_level(scn.scene, LightLevel::preset(light));
  return scn;
}

// 8. Extra geometry never lowers the score; darker light always raises it.
Outcome score_monotonicity() {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tally t;
  int raised = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Scenario scn = random_scenario(rng);
    const ScenarioReport before = run_scenario(scn);

    double lo_x = 1e9, hi_x = -1e9, lo_y = 1e9, hi_y = -1e9;
    for (const auto& n : scn.scene.nodes) {
      const Aabb b = n.box.aabb();
      lo_x = std::min(lo_x, b.lo.x), hi_x = std::max(hi_x, b.hi.x);
      lo_y = std::min(lo_y, b.lo.y), hi_y = std::max(hi_y, b.hi.y);
    }
    const double x = lo_x + (hi_x - lo_x) * u(rng), y = lo_y + (hi_y - lo_y) * u(rng);
    const double hx = 0.1 + 1.0 * u(rng), hy = 0.1 + 1.0 * u(rng), h = 0.5 + 2.4 * u(rng);
    scn.scene.nodes.push_back({"extra_occluder", NodeKind::Column,
                               box_from_bounds({x - hx, y - hy, kFloorThickness}, {x + hx, y + hy, h}), {}});
    const ScenarioReport after = run_scenario(scn);
    t.expect(after.score.total >= before.score.total - 1e-12,
             "trial " + std::to_string(trial) + ": " + num(before.score.total) + " -> " + num(after.score.total));
    if (after.score.total > before.score.total) ++raised;

    const double bright = score(before.sweeps, LightPreset::Bright).total;
    const double dim = score(before.sweeps, LightPreset::Dim).total;
    t.expect(dim > bright, "dim not above bright in trial " + std::to_string(trial));
  }
  return t.outcome("100 scenarios, extra node raised the score in " + std::to_string(raised));
}

// 9. Spec and scene documents survive a round trip byte for byte.
Outcome round_trips() {
  Tally t;
  int specs = 0, scenes = 0;
  const fs::path dir = AVPGARAGE_FIXTURES;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string text = slurp(f);
    const std::string name = f.filename().string();
    if (text.find("\"garage-spec/1\"") != std::string::npos) {
      const GarageSpec s = parse_garage_spec(text);
      const std::string once = emit_garage_spec(s);
      t.expect(emit_garage_spec(parse_garage_spec(once)) == once, name);
      ++specs;
      if (!validate(s).ok) continue;
      const ClassifiedGrid grid = classify_all(s);
      SceneGraph scene = synthesize(grid);
      const fs::path plan = dir / (f.stem().string().substr(0, f.stem().string().find("_garage")) + "_occupancy.json");
      if (name.find("_garage") != std::string::npos && fs::exists(plan)) {
        scene = populate_vehicles(scene, grid, parse_occupancy_plan(slurp(plan)));
      }
      const std::string doc = export_scene(scene);
      t.expect(export_scene(import_scene(doc)) == doc, name + " scene");
      t.expect(import_scene(doc) == scene, name + " scene graph");
      ++scenes;
    } else if (text.find("\"scene/1\"") != std::string::npos) {
      t.expect(export_scene(import_scene(text)) == text, name);
      ++scenes;
    }
  }
  t.expect(specs > 0 && scenes > 0, "empty corpus");
  return t.outcome(std::to_string(specs) + " spec documents, " + std::to_string(scenes) + " scene documents");
}

// 10. Desk-scale timings.
Outcome performance() {
  Tally t;
  std::mt19937 rng(1010);
  auto t0 = Clock::now();
  GarageSpec big;
  big.m = big.n = 200;
  std::uniform_int_distribution<int> code(-1, 3);
  for (int k = 0; k < 200 * 200; ++k) big.structure.push_back(code(rng));
  big.row_widths.assign(200, 5.3);
  big.col_widths.assign(200, 2.5);
  const SceneGraph large = synthesize(classify_all(big));
  const double build_s = seconds_since(t0);
  t.expect(build_s < 2.0, "200x200 took " + num(build_s) + " s");

  // Stalls above and below one long lane, every other stall taken.
  constexpr int kCols = 40;
  const std::vector<std::vector<int>> rows = {std::vector<int>(kCols, 0), std::vector<int>(kCols, 1),
                                              std::vector<int>(kCols, 0)};
  const GarageSpec strip = GarageSpec::from_rows(rows, {5.3, 6.0, 5.3}, std::vector<double>(kCols, 2.5));
  const ClassifiedGrid grid = classify_all(strip);
  OccupancyPlan plan;
  for (int j = 0; j < kCols; j += 2) {
    plan.entries.push_back({{0, j}, VehicleSize::Medium});
    plan.entries.push_back({{2, j + 1}, VehicleSize::Large});
  }
  const SceneGraph scene = populate_vehicles(synthesize(grid), grid, plan);
  const double far_end = kCols * 2.5 - 1.0;
  std::vector<EgoPose> path;
  for (int leg = 0; leg <= 6; ++leg) path.push_back({{leg % 2 ? far_end : 1.0, 8.3}, 0.0});
  const auto points = sample_path(path, 0.5);
  t0 = Clock::now();
  const OcclusionSweep sw = sweep(scene, path, {}, "vehicle_0_20", 0.5);
  const double sweep_s = seconds_since(t0);
  t.expect(scene.nodes.size() >= 500, "scene has only " + std::to_string(scene.nodes.size()) + " nodes");
  t.expect(points.size() >= 1000, "path has only " + std::to_string(points.size()) + " samples");
  t.expect(sweep_s < 5.0, "sweep took " + num(sweep_s) + " s");
  return t.outcome("200x200: " + std::to_string(large.nodes.size()) + " nodes in " + num(build_s) + " s; sweep " +
                   std::to_string(sw.samples.size()) + " samples over " + std::to_string(scene.nodes.size()) +
                   " nodes in " + num(sweep_s) + " s");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 when the criterion states no runtime
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "validation completeness", 5.0, validation_completeness},
      {2, "classifier oracle equivalence", 1.0, classifier_oracle},
      {3, "rotation equivariance", 10.0, rotation_equivariance},
      {4, "geometry tiling", 0.0, geometry_tiling},
      {5, "visibility accuracy", 30.0, visibility_accuracy},
      {6, "case 1 behaviour", 5.0, case1_behaviour},
      {7, "case 3 compound ordering", 10.0, case3_ordering},
      {8, "score monotonicity", 30.0, score_monotonicity},
      {9, "round trips", 0.0, round_trips},
      {10, "desk-scale performance", 0.0, performance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double took = seconds_since(t0);
    if (c.budget_s > 0 && took >= c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + num(c.budget_s, "%.0f") + " s budget";
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s (%s s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, num(took).c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}

#include "avpgarage/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "avpgarage/errors.hpp"
#include "avpgarage/grid_model.hpp"
#include "avpgarage/scenario_lab.hpp"
#include "avpgarage/scene.hpp"
#include "avpgarage/tile_classify.hpp"
#include "json.hpp"

namespace avpgarage {

namespace {

namespace fs = std::filesystem;

// Raised for bad flag values that CLI11 cannot check on its own.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in " + what);
  }
}

std::vector<double> number_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) out.push_back(to_number(tok, what));
  return out;
}

LightPreset light_flag(const std::string& s) {
  const auto p = light_preset_from_string(s);
  if (!p) throw UsageError("unknown light level '" + s + "'");
  return *p;
}

GarageSpec load_spec(const std::string& path, const std::string& rows_csv, const std::string& cols_csv) {
  if (fs::path(path).extension() == ".csv") {
    if (rows_csv.empty() || cols_csv.empty()) throw UsageError("a CSV structure needs --row-widths and --col-widths");
    for (const auto& p : {path, rows_csv, cols_csv}) {
      if (!fs::exists(p)) throw IoError("cannot open " + p);
    }
    return load_garage_spec_csv(path, rows_csv, cols_csv);
  }
  return parse_garage_spec(slurp(path));
}

void print_violations(const ValidationReport& report, std::ostream& err) {
  for (const auto& v : report.violations) err << to_string(v.rule) << " at " << v.location << ": " << v.message << "\n";
}

struct Globals {
  bool seedless = false;
  std::string format = "human";
};

struct SpecInput {
  std::string path;
  std::string rows_csv;
  std::string cols_csv;
};

void add_spec_input(CLI::App* cmd, SpecInput& in) {
  cmd->add_option("spec", in.path, "garage-spec/1 JSON, or a structure CSV")->required();
  cmd->add_option("--row-widths", in.rows_csv, "row extents CSV (with a structure CSV)");
  cmd->add_option("--col-widths", in.cols_csv, "column extents CSV (with a structure CSV)");
}

int cmd_validate(const Globals& g, const SpecInput& in, std::ostream& out) {
  const GarageSpec spec = load_spec(in.path, in.rows_csv, in.cols_csv);
  const ValidationReport report = validate(spec);
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["ok"] = report.ok;
    j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : report.violations) {
      j["violations"].push_back({{"rule", to_string(v.rule)}, {"location", v.location}, {"message", v.message}});
    }
    out << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    out << "rule,location,message\n";
    for (const auto& v : report.violations) out << to_string(v.rule) << ',' << v.location << ",\"" << v.message << "\"\n";
  } else if (report.ok) {
    out << "ok\n";
  } else {
    for (const auto& v : report.violations) out << to_string(v.rule) << " at " << v.location << ": " << v.message << "\n";
  }
  return report.ok ? kExitOk : kExitInvalid;
}

struct GenerateArgs {
  SpecInput spec;
  std::string light = "bright";
  std::string occupancy;
  std::vector<std::string> prune;
  std::string out;
  std::string obj;
  std::string classified;
};

std::set<CellRef> parse_corners(const std::vector<std::string>& items) {
  std::set<CellRef> out;
  for (const auto& item : items) {
    for (const auto& pair : split(item, ';')) {
      const auto v = number_list(pair, "--prune-columns");
      if (v.size() != 2 || v[0] != static_cast<int>(v[0]) || v[1] != static_cast<int>(v[1])) {
        throw UsageError("--prune-columns expects 'i,j' corner pairs, got '" + pair + "'");
      }
      out.insert({static_cast<int>(v[0]), static_cast<int>(v[1])});
    }
  }
  return out;
}

int cmd_generate(const Globals& g, const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const GarageSpec spec = load_spec(a.spec.path, a.spec.rows_csv, a.spec.cols_csv);
  const ValidationReport report = validate(spec);
  if (!report.ok) {
    print_violations(report, err);
    return kExitInvalid;
  }
  SynthOptions options;
  options.light = light_flag(a.light);
  options.pruned_columns = parse_corners(a.prune);
  for (const CellRef& c : options.pruned_columns) {
    if (c.i < 0 || c.j < 0 || c.i > spec.m || c.j > spec.n) {
      throw UsageError("--prune-columns corner " + std::to_string(c.i) + "," + std::to_string(c.j) +
                       " lies outside the " + std::to_string(spec.m + 1) + "x" + std::to_string(spec.n + 1) +
                       " corner lattice");
    }
  }
  const ClassifiedGrid grid = classify_all(spec);
  SceneGraph scene = synthesize(grid, options);
  if (!a.occupancy.empty()) scene = populate_vehicles(scene, grid, parse_occupancy_plan(slurp(a.occupancy)));

  const std::string doc = export_scene(scene);
  if (!a.obj.empty()) write_file(a.obj, export_scene(scene, SceneFormat::Obj));
  if (!a.classified.empty()) write_file(a.classified, export_classified_grid(grid));
  if (a.out.empty()) {
    out << doc;
    return kExitOk;
  }
  write_file(a.out, doc);

  const std::vector<std::pair<std::string, std::size_t>> counts = {
      {"nodes", scene.nodes.size()},
      {"floor_tiles", count_nodes(scene, NodeKind::FloorTile)},
      {"columns", count_nodes(scene, NodeKind::Column)},
      {"lamps", count_nodes(scene, NodeKind::Lamp)},
      {"vehicles", count_nodes(scene, NodeKind::Vehicle)}};
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["scene"] = a.out;
    for (const auto& [k, v] : counts) j[k] = v;
    out << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    for (std::size_t k = 0; k < counts.size(); ++k) out << (k ? "," : "") << counts[k].first;
    out << "\n";
    for (std::size_t k = 0; k < counts.size(); ++k) out << (k ? "," : "") << counts[k].second;
    out << "\n";
  } else {
    out << "wrote " << a.out << "\n";
    for (const auto& [k, v] : counts) out << k << ": " << v << "\n";
  }
  return kExitOk;
}

struct ScenarioArgs {
  std::string case_id;
  std::map<std::string, double> values;  // numeric flags, keyed by parameter name
  bool no_column = false;
  std::string params_file;
  std::string layout;
  std::string light;
  std::string scene;
  std::string ego_path;
  std::string targets;
  double step = 0.5;
  CameraConfig camera;
  std::string out;
};

std::vector<EgoPose> parse_pose_list(const std::string& s) {
  std::vector<EgoPose> out;
  for (const auto& item : split(s, ';')) {
    const auto v = number_list(item, "--ego-path");
    if (v.size() != 2 && v.size() != 3) throw UsageError("--ego-path expects 'x,y' or 'x,y,heading' points");
    out.push_back({{v[0], v[1]}, v.size() == 3 ? v[2] : 0.0});
  }
  return out;
}

void print_report_summary(const Globals& g, const ScenarioReport& r, const std::vector<std::string>& files,
                          std::ostream& out) {
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["label"] = to_string(r.label);
    j["files"] = files;
    auto targets = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < r.sweeps.size(); ++k) {
      targets.push_back({{"target_id", r.sweeps[k].target_id},
                         {"samples", r.sweeps[k].samples.size()},
                         {"min_fraction", r.stats[k].min_fraction},
                         {"mean_fraction", r.stats[k].mean_fraction}});
    }
    j["targets"] = targets;
    nlohmann::ordered_json props = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.properties) props[k] = v;
    j["properties"] = props;
    j["score"] = r.score.total;
    out << j.dump(2) << "\n";
    return;
  }
  if (g.format == "csv") {
    out << "target_id,samples,min_fraction,mean_fraction\n";
    for (std::size_t k = 0; k < r.sweeps.size(); ++k) {
      out << r.sweeps[k].target_id << ',' << r.sweeps[k].samples.size() << ',' << fmt(r.stats[k].min_fraction) << ','
          << fmt(r.stats[k].mean_fraction) << "\n";
    }
    return;
  }
  out << "scenario " << to_string(r.label) << " (" << to_string(r.light) << ")\n";
  for (std::size_t k = 0; k < r.sweeps.size(); ++k) {
    out << "  " << r.sweeps[k].target_id << ": " << r.sweeps[k].samples.size() << " samples, min "
        << fmt(r.stats[k].min_fraction) << ", mean " << fmt(r.stats[k].mean_fraction) << "\n";
  }
  for (const auto& [k, v] : r.properties) out << "  " << k << ": " << (v ? "true" : "false") << "\n";
  for (const auto& c : r.compound_pairs) {
    out << "  " << c.occluder_id << " covers " << c.target_id << " up to " << fmt(c.max_share) << "\n";
  }
  out << "  score: " << fmt(r.score.total) << "\n";
  for (const auto& f : files) out << "wrote " << f << "\n";
}

int cmd_scenario(const Globals& g, const ScenarioArgs& a, std::ostream& out, std::ostream&) {
  Scenario scn;
  if (!a.scene.empty()) {
    if (a.ego_path.empty()) throw UsageError("--scene needs --ego-path");
    SceneGraph scene = import_scene(slurp(a.scene));
    if (!a.light.empty()) scene = apply_light_level(scene, LightLevel::preset(light_flag(a.light)));
    scn = build_custom(std::move(scene), parse_pose_list(a.ego_path), split(a.targets, ','));
  } else {
    ScenarioRequest req;
    if (!a.params_file.empty()) req = parse_scenario_request(slurp(a.params_file));
    if (!a.case_id.empty()) {
      static const std::map<std::string, ScenarioLabel> kCases = {{"1", ScenarioLabel::Case1CornerColumn},
                                                                  {"2", ScenarioLabel::Case2ParkedEgo},
                                                                  {"3", ScenarioLabel::Case3ParkedRows},
                                                                  {"light", ScenarioLabel::LightOnly}};
      const ScenarioLabel label = kCases.at(a.case_id);
      if (!a.params_file.empty() && label != req.label) throw UsageError("--case disagrees with the --params label");
      req.label = label;
    } else if (a.params_file.empty()) {
      throw UsageError("scenario needs --case, --params or --scene");
    }
    for (const auto& [k, v] : a.values) req.params[k] = v;
    if (a.no_column) req.params["with_column"] = 0.0;
    if (!a.layout.empty()) req.layout = parse_layout(slurp(a.layout));
    if (!a.light.empty()) req.light = light_flag(a.light);
    scn = build_scenario(req);
  }

  a.camera.check();
  const ScenarioReport report = run_scenario(scn, a.camera, a.step);
  std::vector<std::string> files;
  if (a.out.empty()) {
    out << export_report(report);
    return kExitOk;
  }
  write_file(a.out, export_report(report));
  files.push_back(a.out);
  const fs::path base(a.out);
  for (const auto& sw : report.sweeps) {
    fs::path csv = base.parent_path() / (base.stem().string() + "." + sw.target_id + ".csv");
    write_file(csv, sweep_to_csv(sw));
    files.push_back(csv.string());
  }
  print_report_summary(g, report, files, out);
  return kExitOk;
}

ScoreWeights parse_weights(const std::string& s) {
  const auto v = number_list(s, "--weights");
  if (v.size() != 3) throw UsageError("--weights expects three numbers");
  if (std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; }) ||
      std::abs(v[0] + v[1] + v[2] - 1.0) > 1e-9) {
    throw UsageError("--weights must be non-negative and sum to 1");
  }
  return {v[0], v[1], v[2]};
}

int cmd_score(const Globals& g, const std::string& path, const std::string& weights, std::ostream& out) {
  const ScoreWeights w = parse_weights(weights);
  const ScenarioReport report = import_report(slurp(path));
  const DifficultyScore s = score(report.sweeps, report.light, w);
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["total"] = s.total;
    j["occlusion_term"] = s.occlusion_term;
    j["blackout_term"] = s.blackout_term;
    j["light_term"] = s.light_term;
    j["weights"] = {w.occlusion, w.blackout, w.light};
    out << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    out << "total,occlusion_term,blackout_term,light_term\n"
        << fmt(s.total) << ',' << fmt(s.occlusion_term) << ',' << fmt(s.blackout_term) << ',' << fmt(s.light_term)
        << "\n";
  } else {
    out << "total: " << fmt(s.total) << "\n"
        << "occlusion: " << fmt(s.occlusion_term) << " x " << fmt(w.occlusion) << "\n"
        << "blackout: " << fmt(s.blackout_term) << " x " << fmt(w.blackout) << "\n"
        << "light: " << fmt(s.light_term) << " x " << fmt(w.light) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parking garage scene generator and occlusion lab", "avpgarage"};
  app.set_config("--config", "", "TOML/INI file with default flag values");
  app.require_subcommand(1);

  Globals g;
  app.add_flag("--seedless", g.seedless, "accepted for scripts; nothing here is random");
  app.add_option("--format", g.format, "stdout format")
      ->check(CLI::IsMember({"json", "csv", "human"}))
      ->capture_default_str();

  SpecInput vin;
  auto* validate_cmd = app.add_subcommand("validate", "check a garage spec");
  add_spec_input(validate_cmd, vin);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "synthesize a scene from a garage spec");
  add_spec_input(generate_cmd, gen.spec);
  generate_cmd->add_option("--light", gen.light, "bright|clear|moderate|dim")->capture_default_str();
  generate_cmd->add_option("--occupancy", gen.occupancy, "occupancy/1 plan");
  generate_cmd->add_option("--prune-columns", gen.prune, "corners to leave empty, 'i,j' or 'i,j;k,l'");
  generate_cmd->add_option("--out", gen.out, "scene/1 output (stdout if absent)");
  generate_cmd->add_option("--obj", gen.obj, "also write Wavefront OBJ");
  generate_cmd->add_option("--classified", gen.classified, "also write the classified grid");

  ScenarioArgs sc;
  auto* scenario_cmd = app.add_subcommand("scenario", "build a test case and sweep it");
  scenario_cmd->add_option("--case", sc.case_id, "1, 2, 3 or light")->check(CLI::IsMember({"1", "2", "3", "light"}));
  const std::vector<std::pair<std::string, std::string>> numeric = {
      {"--column-setback", "column_setback"}, {"--lane-width", "lane_width"},
      {"--target-distance", "target_distance"}, {"--column-offset", "column_offset"},
      {"--lane-distance", "lane_distance"},   {"--column-lateral", "column_lateral"},
      {"--pass-half-length", "pass_half_length"}, {"--close-offset", "close_offset"},
      {"--medium-offset", "medium_offset"},   {"--far-offset", "far_offset"},
      {"--slot-bearing", "slot_bearing_deg"}};
  std::map<std::string, double> raw;
  std::vector<std::pair<CLI::Option*, std::string>> numeric_opts;
  for (const auto& [flag, name] : numeric) {
    numeric_opts.push_back({scenario_cmd->add_option(flag, raw[name], name), name});
  }
  scenario_cmd->add_flag("--no-column", sc.no_column, "drop the case's structural column");
  scenario_cmd->add_option("--params", sc.params_file, "scenario/1 parameter file");
  scenario_cmd->add_option("--layout", sc.layout, "case 3 slot layout JSON");
  scenario_cmd->add_option("--light", sc.light, "bright|clear|moderate|dim");
  scenario_cmd->add_option("--scene", sc.scene, "run on an existing scene/1 file instead");
  scenario_cmd->add_option("--ego-path", sc.ego_path, "'x,y[,heading];...' with --scene");
  scenario_cmd->add_option("--targets", sc.targets, "comma-separated vehicle ids with --scene");
  scenario_cmd->add_option("--step", sc.step, "sample spacing, m")->capture_default_str();
  scenario_cmd->add_option("--mount-height", sc.camera.mount_height, "camera height, m")->capture_default_str();
  scenario_cmd->add_option("--fov", sc.camera.horizontal_fov, "horizontal field of view, deg")->capture_default_str();
  scenario_cmd->add_option("--aspect", sc.camera.aspect, "image width / height")->capture_default_str();
  scenario_cmd->add_option("--face-samples", sc.camera.face_samples, "points per face edge")->capture_default_str();
  scenario_cmd->add_option("--out", sc.out, "report/1 output; sweep CSVs go beside it");

  std::string report_path;
  std::string weights = "0.4,0.4,0.2";
  auto* score_cmd = app.add_subcommand("score", "difficulty score of a report");
  score_cmd->add_option("report", report_path, "report/1 file")->required();
  score_cmd->add_option("--weights", weights, "occlusion,blackout,light")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(g, vin, out);
    if (generate_cmd->parsed()) return cmd_generate(g, gen, out, err);
    if (scenario_cmd->parsed()) {
      for (const auto& [opt, name] : numeric_opts) {
        if (opt->count() > 0) sc.values[name] = raw[name];
      }
      return cmd_scenario(g, sc, out, err);
    }
    if (score_cmd->parsed()) return cmd_score(g, report_path, weights, out);
  } catch (const InvalidSpecError& e) {
    print_violations(e.report(), err);
    return kExitInvalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const PlanError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ConstructionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace avpgarage

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "avpgarage/errors.hpp"
#include "avpgarage/grid_model.hpp"
#include "avpgarage/scenario_lab.hpp"
#include "avpgarage/scene.hpp"
#include "avpgarage/tile_classify.hpp"
#include "avpgarage/visibility.hpp"

namespace py = pybind11;
using namespace avpgarage;

namespace {

LightPreset light_arg(const std::string& s) {
  auto p = light_preset_from_string(s);
  if (!p) throw py::value_error("unknown light level '" + s + "'");
  return *p;
}

NodeKind kind_arg(const std::string& s) {
  auto k = node_kind_from_string(s);
  if (!k) throw py::value_error("unknown node kind '" + s + "'");
  return *k;
}

std::vector<std::vector<int>> rows_of(const GarageSpec& s) {
  std::vector<std::vector<int>> rows(s.m);
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j) rows[i].push_back(s.at(i, j));
  return rows;
}

py::list violations_of(const ValidationReport& r) {
  py::list out;
  for (const auto& v : r.violations) {
    py::dict d;
    d["rule"] = std::string(to_string(v.rule));
    d["location"] = v.location;
    d["message"] = v.message;
    out.append(d);
  }
  return out;
}

py::list cells_of(const ClassifiedGrid& g) {
  py::list out;
  for (const auto& c : g.cells) {
    py::dict d;
    d["i"] = c.cell.i;
    d["j"] = c.cell.j;
    d["cnt"] = c.lane_adjacency;
    if (c.lane_subtype) d["subtype"] = std::string(to_string(*c.lane_subtype));
    else if (c.park_subtype) d["subtype"] = std::string(to_string(*c.park_subtype));
    else d["subtype"] = py::none();
    d["render_variant"] = std::string(to_string(c.variant));
    d["quarter_turns"] = c.rotation.quarter_turns;
    out.append(d);
  }
  return out;
}

SceneGraph synthesize_spec(const GarageSpec& spec, const std::string& light,
                           const std::vector<std::pair<int, int>>& pruned, const std::string& occupancy) {
  const ClassifiedGrid grid = classify_all(spec);
  SynthOptions opt;
  opt.light = light_arg(light);
  for (const auto& [i, j] : pruned) opt.pruned_columns.insert({i, j});
  SceneGraph scene = synthesize(grid, opt);
  if (!occupancy.empty()) scene = populate_vehicles(scene, grid, parse_occupancy_plan(occupancy));
  return scene;
}

CameraConfig camera(double fov, double mount_height, int face_samples) {
  CameraConfig c;
  c.horizontal_fov = fov;
  c.mount_height = mount_height;
  c.face_samples = face_samples;
  c.check();
  return c;
}

std::string scenario_report(const std::string& label, const std::map<std::string, double>& params,
                            const std::vector<std::pair<std::string, std::string>>& layout, const std::string& light,
                            double step, double fov, int face_samples) {
  ScenarioRequest req;
  auto l = scenario_label_from_string(label);
  if (!l) throw py::value_error("unknown scenario label '" + label + "'");
  req.label = *l;
  req.params = params;
  for (const auto& [slot, size] : layout) {
    auto s = slot_from_string(slot);
    auto v = vehicle_size_from_string(size);
    if (!s || !v) throw py::value_error("bad layout entry (" + slot + ", " + size + ")");
    req.layout.push_back({*s, *v});
  }
  req.light = light_arg(light);
  return export_report(run_scenario(build_scenario(req), camera(fov, 1.6, face_samples), step));
}

py::dict score_report(const std::string& report, const std::tuple<double, double, double>& w) {
  const ScenarioReport r = import_report(report);
  const auto [o, b, l] = w;
  const DifficultyScore s = score(r.sweeps, r.light, {o, b, l});
  py::dict d;
  d["total"] = s.total;
  d["occlusion_term"] = s.occlusion_term;
  d["blackout_term"] = s.blackout_term;
  d["light_term"] = s.light_term;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Garage plan validation, scene synthesis and camera occlusion sweeps";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IndexError>(m, "CellIndexError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<PlanError>(m, "PlanError", base.ptr());
  py::register_exception<ImportError>(m, "SceneImportError", base.ptr());
  py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());

  py::class_<GarageSpec>(m, "GarageSpec")
      .def(py::init(&GarageSpec::from_rows), py::arg("rows"), py::arg("row_widths"), py::arg("col_widths"))
      .def_static("parse", [](const std::string& text) { return parse_garage_spec(text); })
      .def_static("load", [](const std::string& path) { return load_garage_spec(path); })
      .def_readonly("m", &GarageSpec::m)
      .def_readonly("n", &GarageSpec::n)
      .def_property_readonly("rows", &rows_of)
      .def_readonly("row_widths", &GarageSpec::row_widths)
      .def_readonly("col_widths", &GarageSpec::col_widths)
      .def("to_json", &emit_garage_spec)
      .def("__eq__", [](const GarageSpec& a, const GarageSpec& b) { return a == b; })
      .def("__repr__", [](const GarageSpec& s) {
        return "<GarageSpec " + std::to_string(s.m) + "x" + std::to_string(s.n) + ">";
      });

  m.def("validate", [](const GarageSpec& s) { return violations_of(validate(s)); }, py::arg("spec"),
        "Violations as dicts with rule, location and message; empty when the spec is usable.");
  m.def("classify", [](const GarageSpec& s) { return cells_of(classify_all(s)); }, py::arg("spec"));
  m.def("classified_json", [](const GarageSpec& s) { return export_classified_grid(classify_all(s)); },
        py::arg("spec"));

  py::class_<SceneGraph>(m, "SceneGraph")
      .def("__len__", [](const SceneGraph& s) { return s.nodes.size(); })
      .def("count", [](const SceneGraph& s, const std::string& kind) { return count_nodes(s, kind_arg(kind)); },
           py::arg("kind"))
      .def("ids", [](const SceneGraph& s) {
        std::vector<std::string> ids;
        for (const auto& n : s.nodes) ids.push_back(n.id);
        return ids;
      })
      .def_property_readonly("light_level", [](const SceneGraph& s) { return std::string(to_string(s.light_level.level)); })
      .def("with_light", [](const SceneGraph& s, const std::string& level) {
        return apply_light_level(s, LightLevel::preset(light_arg(level)));
      }, py::arg("level"))
      .def("to_json", [](const SceneGraph& s) { return export_scene(s); })
      .def("to_obj", [](const SceneGraph& s) { return export_scene(s, SceneFormat::Obj); })
      .def("__eq__", [](const SceneGraph& a, const SceneGraph& b) { return a == b; });

  m.def("synthesize", &synthesize_spec, py::arg("spec"), py::arg("light") = "bright",
        py::arg("pruned_columns") = std::vector<std::pair<int, int>>{}, py::arg("occupancy") = "",
        "Scene for a valid spec; `occupancy` is an occupancy/1 document.");
  m.def("import_scene", [](const std::string& text) { return import_scene(text); }, py::arg("text"));

  m.def(
      "visible_fraction",
      [](const SceneGraph& scene, double x, double y, double heading, const std::string& target, double fov,
         double mount_height, int face_samples) {
        const auto v = visible_fraction(scene, {{x, y}, heading}, camera(fov, mount_height, face_samples), target);
        py::dict d;
        d["visible_fraction"] = v.visible_fraction;
        d["in_frustum"] = v.in_frustum;
        py::dict occ;
        for (const auto& o : v.occluders) occ[py::str(o.id)] = o.fraction;
        d["occluders"] = occ;
        return d;
      },
      py::arg("scene"), py::arg("x"), py::arg("y"), py::arg("heading"), py::arg("target"), py::arg("fov") = 60.0,
      py::arg("mount_height") = 1.6, py::arg("face_samples") = 24);

  m.def("scenario_report", &scenario_report, py::arg("label"),
        py::arg("params") = std::map<std::string, double>{},
        py::arg("layout") = std::vector<std::pair<std::string, std::string>>{}, py::arg("light") = "bright",
        py::arg("step") = 0.5, py::arg("fov") = 60.0, py::arg("face_samples") = 24,
        "Builds a test case, sweeps it and returns the report/1 document.");
  m.def("score", &score_report, py::arg("report"), py::arg("weights") = std::make_tuple(0.4, 0.4, 0.2));
}

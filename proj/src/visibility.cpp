#include "avpgarage/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"

namespace avpgarage {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Box data laid out for repeated ray tests.
struct PreparedBox {
  const std::string* id;
  double cx, cy, cz;
  double c, s;  // cos/sin of yaw
  double hx, hy, hz;
};

PreparedBox prepare(const std::string& id, const Box3& b) {
  return {&id, b.center.x, b.center.y, b.center.z, std::cos(b.yaw), std::sin(b.yaw),
          b.half_extents.x, b.half_extents.y, b.half_extents.z};
}

// Slab test in the box frame. Returns +inf on a miss.
inline double hit_distance(const PreparedBox& b, Vec3 o, Vec3 d) {
  const double px = o.x - b.cx, py = o.y - b.cy;
  const double lo[3] = {b.c * px + b.s * py, -b.s * px + b.c * py, o.z - b.cz};
  const double ld[3] = {b.c * d.x + b.s * d.y, -b.s * d.x + b.c * d.y, d.z};
  const double h[3] = {b.hx, b.hy, b.hz};
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(ld[k]) < 1e-15) {
      if (lo[k] < -h[k] || lo[k] > h[k]) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double inv = 1.0 / ld[k];
    double t1 = (-h[k] - lo[k]) * inv;
    double t2 = (h[k] - lo[k]) * inv;
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmax < tmin) return std::numeric_limits<double>::infinity();
  }
  return tmin;
}

Aabb merge(const Aabb& a, Vec3 p) {
  return {{std::min(a.lo.x, p.x), std::min(a.lo.y, p.y), std::min(a.lo.z, p.z)},
          {std::max(a.hi.x, p.x), std::max(a.hi.y, p.y), std::max(a.hi.z, p.z)}};
}

VisibilitySample evaluate(const SceneGraph& scene, const EgoPose& ego, const CameraConfig& cfg,
                          const std::string& target_id, const Box3& target_box) {
  const Frustum cam = make_camera(ego, cfg);
  VisibilitySample out;
  out.ego = ego;
  out.target_id = target_id;

  // Only boxes overlapping the hull of apex and target can block a sightline.
  const Aabb region = merge(target_box.aabb(), cam.apex);
  std::vector<PreparedBox> candidates;
  for (const auto& node : scene.nodes) {
    if (!is_opaque(node.kind) || node.id == target_id) continue;
    if (node.box.aabb().overlaps(region)) candidates.push_back(prepare(node.id, node.box));
  }

  const int s = cfg.face_samples;
  const Vec3 axes[3] = {target_box.axis_x(), target_box.axis_y(), {0, 0, 1}};
  const double half[3] = {target_box.half_extents.x, target_box.half_extents.y, target_box.half_extents.z};

  std::size_t eligible = 0, visible = 0;
  std::map<std::string, std::size_t> blocked_by;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {1, -1}) {
      const Vec3 normal = static_cast<double>(sign) * axes[axis];
      const Vec3 face_center = target_box.center + half[axis] * normal;
      if (dot(normal, cam.apex - face_center) <= 0.0) continue;
      const int ua = (axis + 1) % 3, va = (axis + 2) % 3;
      for (int a = 0; a < s; ++a) {
        const double u = ((a + 0.5) / s * 2.0 - 1.0) * half[ua];
        for (int b = 0; b < s; ++b) {
          const double v = ((b + 0.5) / s * 2.0 - 1.0) * half[va];
          const Vec3 p = face_center + u * axes[ua] + v * axes[va];
          if (!cam.contains(p)) continue;
          ++eligible;
          const Vec3 delta = p - cam.apex;
          const double dist = norm(delta);
          const Vec3 dir = (1.0 / dist) * delta;
          const double limit = dist - 1e-7;
          double best = limit;
          const PreparedBox* hit = nullptr;
          for (const auto& c : candidates) {
            const double t = hit_distance(c, cam.apex, dir);
            if (t < best) {
              best = t;
              hit = &c;
            }
          }
          if (hit) {
            ++blocked_by[*hit->id];
          } else {
            ++visible;
          }
        }
      }
    }
  }

  out.in_frustum = eligible > 0;
  if (out.in_frustum) {
    out.visible_fraction = static_cast<double>(visible) / static_cast<double>(eligible);
    for (const auto& [id, count] : blocked_by) {
      out.occluders.push_back({id, static_cast<double>(count) / static_cast<double>(eligible)});
    }
  }
  return out;
}

const SceneNode& require_target(const SceneGraph& scene, std::string_view target_id) {
  const SceneNode* node = scene.find(target_id);
  if (!node) throw std::invalid_argument("unknown target id '" + std::string(target_id) + "'");
  if (node->kind != NodeKind::Vehicle) {
    throw std::invalid_argument("target '" + std::string(target_id) + "' is not a Vehicle node");
  }
  return *node;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

void CameraConfig::check() const {
  if (!(horizontal_fov > 0.0 && horizontal_fov < 180.0)) throw std::invalid_argument("horizontal_fov must be in (0, 180)");
  if (!(mount_height > 0.0)) throw std::invalid_argument("mount_height must be > 0");
  if (!(aspect > 0.0)) throw std::invalid_argument("aspect must be > 0");
  if (!(norm(forward) > 0.0)) throw std::invalid_argument("forward must be non-zero");
  if (face_samples < 1) throw std::invalid_argument("face_samples must be >= 1");
}

bool Frustum::contains(Vec3 p) const {
  const Vec3 d = p - apex;
  const double depth = dot(d, forward);
  if (depth <= 0.0) return false;
  return std::abs(dot(d, right)) <= tan_half_h * depth && std::abs(dot(d, up)) <= tan_half_v * depth;
}

Frustum make_camera(const EgoPose& ego, const CameraConfig& cfg) {
  cfg.check();
  const Vec2 f = rotate((1.0 / norm(cfg.forward)) * cfg.forward, ego.heading);
  Frustum fr;
  fr.apex = {ego.position.x, ego.position.y, kFloorThickness + cfg.mount_height};
  fr.forward = {f.x, f.y, 0.0};
  fr.up = {0.0, 0.0, 1.0};
  fr.right = cross(fr.forward, fr.up);
  fr.half_h = 0.5 * cfg.horizontal_fov * kDeg;
  fr.tan_half_h = std::tan(fr.half_h);
  fr.tan_half_v = fr.tan_half_h / cfg.aspect;
  fr.half_v = std::atan(fr.tan_half_v);
  return fr;
}

std::optional<double> intersect_box(const Box3& box, Vec3 origin, Vec3 dir) {
  static const std::string unnamed;
  const double t = hit_distance(prepare(unnamed, box), origin, dir);
  if (std::isinf(t)) return std::nullopt;
  return t;
}

std::optional<RayHit> ray_intersect(const SceneGraph& scene, Vec3 origin, Vec3 dir,
                                    const std::set<std::string>& ignore) {
  std::optional<RayHit> best;
  for (const auto& node : scene.nodes) {
    if (!is_opaque(node.kind) || ignore.contains(node.id)) continue;
    auto t = intersect_box(node.box, origin, dir);
    if (t && (!best || *t < best->distance)) best = RayHit{node.id, *t};
  }
  return best;
}

VisibilitySample visible_fraction(const SceneGraph& scene, const EgoPose& ego, const CameraConfig& cfg,
                                  std::string_view target_id) {
  const SceneNode& target = require_target(scene, target_id);
  return evaluate(scene, ego, cfg, target.id, target.box);
}

std::vector<SweepPoint> sample_path(const std::vector<EgoPose>& path, double step) {
  if (path.empty()) throw std::invalid_argument("sweep path needs at least one vertex");
  if (!(step > 0.0)) throw std::invalid_argument("sweep step must be > 0");
  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t k = 1; k < path.size(); ++k) {
    cum[k] = cum[k - 1] + norm(path[k].position - path[k - 1].position);
  }
  const double total = cum.back();
  if (total <= 0.0) return {{0.0, path.front()}};

  std::vector<std::size_t> segments;  // indices of segments with positive length
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    if (cum[k + 1] > cum[k]) segments.push_back(k);
  }

  const auto count = static_cast<std::size_t>(std::floor(total / step + 1e-9)) + 1;
  std::vector<SweepPoint> out;
  out.reserve(count);
  std::size_t at = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double s = std::min(static_cast<double>(k) * step, total);
    // A point on a vertex takes the tangent of the segment leaving it.
    while (at + 1 < segments.size() && s >= cum[segments[at] + 1]) ++at;
    const std::size_t seg = segments[at];
    const Vec2 a = path[seg].position, b = path[seg + 1].position;
    const double u = std::clamp((s - cum[seg]) / (cum[seg + 1] - cum[seg]), 0.0, 1.0);
    const Vec2 d = b - a;
    out.push_back({s, {a + u * d, std::atan2(d.y, d.x)}});
  }
  return out;
}

OcclusionSweep sweep(const SceneGraph& scene, const std::vector<EgoPose>& path, const CameraConfig& cfg,
                     std::string_view target_id, double step) {
  const SceneNode& target = require_target(scene, target_id);
  OcclusionSweep out;
  out.target_id = target.id;
  out.step = step;
  out.mover = SweepMover::Ego;
  out.path = path;
  out.points = sample_path(path, step);
  out.samples.reserve(out.points.size());
  for (const auto& pt : out.points) out.samples.push_back(evaluate(scene, pt.pose, cfg, target.id, target.box));
  return out;
}

OcclusionSweep sweep_target(const SceneGraph& scene, const EgoPose& ego, const std::vector<EgoPose>& target_path,
                            const CameraConfig& cfg, std::string_view target_id, double step) {
  const SceneNode& target = require_target(scene, target_id);
  OcclusionSweep out;
  out.target_id = target.id;
  out.step = step;
  out.mover = SweepMover::Target;
  out.path = target_path;
  out.points = sample_path(target_path, step);
  out.samples.reserve(out.points.size());
  for (const auto& pt : out.points) {
    Box3 moved = target.box;
    moved.center.x = pt.pose.position.x;
    moved.center.y = pt.pose.position.y;
    // Vehicle length runs along the box's local y axis.
    moved.yaw = pt.pose.heading - std::numbers::pi / 2.0;
    out.samples.push_back(evaluate(scene, ego, cfg, target.id, moved));
  }
  return out;
}

std::string sweep_to_csv(const OcclusionSweep& sw) {
  std::ostringstream out;
  out << kSweepCsvHeader << "\n";
  for (std::size_t k = 0; k < sw.samples.size(); ++k) {
    const SweepPoint& pt = sw.points[k];
    const VisibilitySample& v = sw.samples[k];
    out << fmt("%.3f", pt.s) << "," << fmt("%.6f", pt.pose.position.x) << "," << fmt("%.6f", pt.pose.position.y)
        << "," << fmt("%.6f", pt.pose.heading) << "," << (v.in_frustum ? 1 : 0) << ","
        << fmt("%.6f", v.visible_fraction) << ",\n";
  }
  return out.str();
}

namespace detail {

nlohmann::ordered_json sweep_value(const OcclusionSweep& sw) {
  nlohmann::ordered_json j;
  j["schema"] = kSweepSchema;
  j["target_id"] = sw.target_id;
  j["step_m"] = sw.step;
  j["mover"] = sw.mover == SweepMover::Ego ? "ego" : "target";
  auto samples = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < sw.samples.size(); ++k) {
    const SweepPoint& pt = sw.points[k];
    const VisibilitySample& v = sw.samples[k];
    nlohmann::ordered_json row;
    row["s_m"] = pt.s;
    row["x"] = pt.pose.position.x;
    row["y"] = pt.pose.position.y;
    row["heading_rad"] = pt.pose.heading;
    row["in_frustum"] = v.in_frustum;
    row["visible_fraction"] = v.visible_fraction;
    row["confidence_ext"] = nullptr;
    nlohmann::ordered_json occ = nlohmann::ordered_json::object();
    for (const auto& o : v.occluders) occ[o.id] = o.fraction;
    row["occluders"] = occ;
    samples.push_back(std::move(row));
  }
  j["samples"] = std::move(samples);
  return j;
}

OcclusionSweep sweep_from_value(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", "") != kSweepSchema) {
    throw ParseError("sweep must carry schema \"sweep/1\"");
  }
  OcclusionSweep sw;
  try {
    sw.target_id = j.at("target_id").get<std::string>();
    sw.step = j.at("step_m").get<double>();
    sw.mover = j.at("mover").get<std::string>() == "target" ? SweepMover::Target : SweepMover::Ego;
    for (const auto& row : j.at("samples")) {
      SweepPoint pt;
      pt.s = row.at("s_m").get<double>();
      pt.pose.position = {row.at("x").get<double>(), row.at("y").get<double>()};
      pt.pose.heading = row.at("heading_rad").get<double>();
      VisibilitySample v;
      v.target_id = sw.target_id;
      v.in_frustum = row.at("in_frustum").get<bool>();
      v.visible_fraction = row.at("visible_fraction").get<double>();
      if (row.contains("occluders")) {
        for (const auto& [id, frac] : row["occluders"].items()) v.occluders.push_back({id, frac.get<double>()});
      }
      v.ego = sw.mover == SweepMover::Ego ? pt.pose : EgoPose{};
      sw.points.push_back(pt);
      sw.samples.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed sweep: ") + e.what());
  }
  return sw;
}

}  // namespace detail

std::string sweep_to_json(const OcclusionSweep& sw) { return detail::sweep_value(sw).dump(2) + "\n"; }

}  // namespace avpgarage

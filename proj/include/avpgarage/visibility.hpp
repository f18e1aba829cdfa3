#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "avpgarage/geometry.hpp"
#include "avpgarage/scene.hpp"

namespace avpgarage {

struct CameraConfig {
  double mount_height = 1.6;      // m above the ego floor point
  double horizontal_fov = 60.0;   // degrees
  double aspect = 16.0 / 9.0;     // width / height
  Vec2 forward{1.0, 0.0};         // viewing direction in the ego frame
  int face_samples = 24;          // s: s x s points per target face

  void check() const;  // throws std::invalid_argument
  bool operator==(const CameraConfig&) const = default;
};

struct EgoPose {
  Vec2 position;
  double heading = 0.0;  // radians, counter-clockwise from +x
  bool operator==(const EgoPose&) const = default;
};

// Pinhole camera frustum (no far plane).
struct Frustum {
  Vec3 apex;
  Vec3 forward;  // unit, horizontal
  Vec3 right;    // unit, horizontal
  Vec3 up;       // +z
  double tan_half_h = 0.0;
  double tan_half_v = 0.0;
  double half_h = 0.0;  // radians
  double half_v = 0.0;  // radians

  bool contains(Vec3 p) const;
};

Frustum make_camera(const EgoPose& ego, const CameraConfig& cfg);

struct RayHit {
  std::string id;
  double distance = 0.0;
};

// Distance along the ray to an oriented box, or nullopt on a miss. A ray
// starting inside the box hits at distance 0.
std::optional<double> intersect_box(const Box3& box, Vec3 origin, Vec3 dir);

// Nearest opaque, non-ignored node hit by the ray.
std::optional<RayHit> ray_intersect(const SceneGraph& scene, Vec3 origin, Vec3 dir,
                                    const std::set<std::string>& ignore = {});

struct OccluderShare {
  std::string id;
  double fraction = 0.0;  // share of eligible points this node blocks first
  bool operator==(const OccluderShare&) const = default;
};

struct VisibilitySample {
  EgoPose ego;
  std::string target_id;
  double visible_fraction = 0.0;
  bool in_frustum = false;
  std::vector<OccluderShare> occluders;  // sorted by id
  bool operator==(const VisibilitySample&) const = default;
};

VisibilitySample visible_fraction(const SceneGraph& scene, const EgoPose& ego, const CameraConfig& cfg,
                                  std::string_view target_id);

enum class SweepMover { Ego, Target };

struct SweepPoint {
  double s = 0.0;  // arc length from path start
  EgoPose pose;    // pose of the moving body
  bool operator==(const SweepPoint&) const = default;
};

struct OcclusionSweep {
  std::string target_id;
  double step = 0.5;
  SweepMover mover = SweepMover::Ego;
  std::vector<EgoPose> path;
  std::vector<SweepPoint> points;
  std::vector<VisibilitySample> samples;
  bool operator==(const OcclusionSweep&) const = default;
};

// Poses at arc lengths 0, step, 2*step, ... <= path length; heading is the
// local path tangent. floor(L / step) + 1 poses.
std::vector<SweepPoint> sample_path(const std::vector<EgoPose>& path, double step);

OcclusionSweep sweep(const SceneGraph& scene, const std::vector<EgoPose>& path, const CameraConfig& cfg,
                     std::string_view target_id, double step = 0.5);

// Fixed camera; the target vehicle is moved along the path instead.
OcclusionSweep sweep_target(const SceneGraph& scene, const EgoPose& ego, const std::vector<EgoPose>& target_path,
                            const CameraConfig& cfg, std::string_view target_id, double step = 0.5);

inline constexpr std::string_view kSweepCsvHeader =
    "s_m,x,y,heading_rad,in_frustum,visible_fraction,confidence_ext";
inline constexpr std::string_view kSweepSchema = "sweep/1";

std::string sweep_to_csv(const OcclusionSweep& sweep);
std::string sweep_to_json(const OcclusionSweep& sweep);

}  // namespace avpgarage

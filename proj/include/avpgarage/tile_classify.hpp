#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "avpgarage/grid_model.hpp"

namespace avpgarage {

enum class LaneSubtype { Crossroads, TJunction, Straight };
enum class ParkSubtype { Type1, Type2, Type3, Type4 };

// Which canonical model a lane square is drawn with. A Straight square can be
// a through-road, a corner or a dead end depending on its lane neighbours.
enum class RenderVariant { None, Cross, Tee, Axis, Corner, DeadEnd };

std::string_view to_string(LaneSubtype s);
std::string_view to_string(ParkSubtype s);
std::string_view to_string(RenderVariant v);

// Counter-clockwise quarter turns (about +z, in world x/y) applied to the
// canonical model, whose primary open edge faces north. One turn maps
// N -> E -> S -> W.
struct Rotation {
  int quarter_turns = 0;
  bool operator==(const Rotation&) const = default;
};

inline Direction rotate(Direction d, Rotation r) {
  return static_cast<Direction>((static_cast<int>(d) + r.quarter_turns) % 4);
}

struct ClassifiedCell {
  CellRef cell;
  CellKind kind = CellKind::Obstacle;
  int lane_adjacency = 0;
  std::optional<LaneSubtype> lane_subtype;
  std::optional<ParkSubtype> park_subtype;
  RenderVariant variant = RenderVariant::None;
  Rotation rotation;
  bool operator==(const ClassifiedCell&) const = default;
};

struct ClassifiedGrid {
  GarageSpec spec;
  std::vector<ClassifiedCell> cells;  // row-major, m * n

  const ClassifiedCell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * spec.n + j]; }
  const ClassifiedCell& at(CellRef c) const { return at(c.i, c.j); }
  bool operator==(const ClassifiedGrid&) const = default;
};

// Bit mask of directions holding drivable neighbours (bit k = Direction k).
unsigned lane_neighbor_mask(const GarageSpec& spec, CellRef cell);

int count_lane_neighbors(const GarageSpec& spec, CellRef cell);
LaneSubtype classify_lane(const GarageSpec& spec, CellRef cell);
ParkSubtype classify_parking(const GarageSpec& spec, CellRef cell);
RenderVariant lane_render_variant(const GarageSpec& spec, CellRef cell);

using Subtype = std::variant<LaneSubtype, ParkSubtype>;
Rotation assign_rotation(const GarageSpec& spec, CellRef cell, Subtype subtype);

// Open edges of the canonical (unrotated) model as a direction mask.
unsigned canonical_open_edges(const ClassifiedCell& c);
// Smallest number of quarter turns mapping the cell's model onto itself (1, 2 or 4).
int rotational_period(const ClassifiedCell& c);

class InvalidSpecError : public ValidationError {
 public:
  explicit InvalidSpecError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Throws InvalidSpecError when validate(spec) is not ok.
ClassifiedGrid classify_all(const GarageSpec& spec);

inline constexpr std::string_view kClassifiedGridSchema = "classified-grid/1";
std::string export_classified_grid(const ClassifiedGrid& grid);

}  // namespace avpgarage

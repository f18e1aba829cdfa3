#include "avpgarage/tile_classify.hpp"

#include <bit>
#include <sstream>

#include "json.hpp"

namespace avpgarage {

namespace {

constexpr unsigned bit(Direction d) { return 1u << static_cast<int>(d); }

constexpr unsigned kAll = 0xFu;
constexpr unsigned kNorthSouth = bit(Direction::North) | bit(Direction::South);
constexpr unsigned kEastWest = bit(Direction::East) | bit(Direction::West);

unsigned rotate_mask(unsigned mask, int turns) {
  turns = ((turns % 4) + 4) % 4;
  return ((mask << turns) | (mask >> (4 - turns))) & kAll;
}

bool is_collinear_pair(unsigned mask) { return mask == kNorthSouth || mask == kEastWest; }

// Orientation of the primary open edge for any open-edge pattern; lanes and
// parking squares share it.
//   4 open       -> 0 (symmetric)
//   3 open       -> the edge opposite the closed one
//   2 collinear  -> 0 for N/S, 1 for E/W
//   2 adjacent   -> d where d and d+1 are open: {N,E}=0 {E,S}=1 {S,W}=2 {W,N}=3
//   1 open       -> that edge
//   0 open       -> 0
Rotation rotation_for_mask(unsigned mask) {
  switch (std::popcount(mask)) {
    case 3: {
      for (Direction d : kDirections) {
        if (!(mask & bit(d))) return {static_cast<int>(opposite(d))};
      }
      break;
    }
    case 2: {
      if (mask == kNorthSouth) return {0};
      if (mask == kEastWest) return {1};
      for (Direction d : kDirections) {
        Direction next = static_cast<Direction>((static_cast<int>(d) + 1) % 4);
        if ((mask & bit(d)) && (mask & bit(next))) return {static_cast<int>(d)};
      }
      break;
    }
    case 1:
      return {std::countr_zero(mask)};
    default:
      break;
  }
  return {0};
}

unsigned canonical_for_mask(unsigned mask) {
  switch (std::popcount(mask)) {
    case 4:
      return kAll;
    case 3:
      return kAll & ~bit(Direction::South);
    case 2:
      return is_collinear_pair(mask) ? kNorthSouth : bit(Direction::North) | bit(Direction::East);
    case 1:
      return bit(Direction::North);
    default:
      return 0;
  }
}

std::string cell_name(CellRef c) { return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")"; }

}  // namespace

std::string_view to_string(LaneSubtype s) {
  switch (s) {
    case LaneSubtype::Crossroads:
      return "crossroads";
    case LaneSubtype::TJunction:
      return "t_junction";
    case LaneSubtype::Straight:
      return "straight";
  }
  return "?";
}

std::string_view to_string(ParkSubtype s) {
  switch (s) {
    case ParkSubtype::Type1:
      return "type1";
    case ParkSubtype::Type2:
      return "type2";
    case ParkSubtype::Type3:
      return "type3";
    case ParkSubtype::Type4:
      return "type4";
  }
  return "?";
}

std::string_view to_string(RenderVariant v) {
  switch (v) {
    case RenderVariant::None:
      return "none";
    case RenderVariant::Cross:
      return "cross";
    case RenderVariant::Tee:
      return "tee";
    case RenderVariant::Axis:
      return "axis";
    case RenderVariant::Corner:
      return "corner";
    case RenderVariant::DeadEnd:
      return "dead_end";
  }
  return "?";
}

unsigned lane_neighbor_mask(const GarageSpec& spec, CellRef cell) {
  NeighborSet around = neighbor_set(spec, cell);
  unsigned mask = 0;
  for (Direction d : kDirections) {
    if (around[d] && is_drivable(*around[d])) mask |= bit(d);
  }
  return mask;
}

int count_lane_neighbors(const GarageSpec& spec, CellRef cell) {
  return std::popcount(lane_neighbor_mask(spec, cell));
}

LaneSubtype classify_lane(const GarageSpec& spec, CellRef cell) {
  if (!is_drivable(cell_kind(spec, cell))) {
    throw DomainError("classify_lane: cell " + cell_name(cell) + " is not a lane square");
  }
  const int cnt = count_lane_neighbors(spec, cell);
  if (cnt == 4) return LaneSubtype::Crossroads;
  if (cnt == 3) return LaneSubtype::TJunction;
  return LaneSubtype::Straight;
}

ParkSubtype classify_parking(const GarageSpec& spec, CellRef cell) {
  if (cell_kind(spec, cell) != CellKind::ParkingOrFree) {
    throw DomainError("classify_parking: cell " + cell_name(cell) + " is not a parking square");
  }
  const unsigned mask = lane_neighbor_mask(spec, cell);
  switch (std::popcount(mask)) {
    case 4:
    case 3:
      return ParkSubtype::Type1;
    case 2:
      return is_collinear_pair(mask) ? ParkSubtype::Type1 : ParkSubtype::Type2;
    case 1:
      return ParkSubtype::Type3;
    default:
      return ParkSubtype::Type4;
  }
}

RenderVariant lane_render_variant(const GarageSpec& spec, CellRef cell) {
  switch (classify_lane(spec, cell)) {
    case LaneSubtype::Crossroads:
      return RenderVariant::Cross;
    case LaneSubtype::TJunction:
      return RenderVariant::Tee;
    case LaneSubtype::Straight:
      break;
  }
  const unsigned mask = lane_neighbor_mask(spec, cell);
  if (std::popcount(mask) == 2) return is_collinear_pair(mask) ? RenderVariant::Axis : RenderVariant::Corner;
  return RenderVariant::DeadEnd;
}

Rotation assign_rotation(const GarageSpec& spec, CellRef cell, Subtype subtype) {
  const CellKind kind = cell_kind(spec, cell);
  const bool lane_subtype = std::holds_alternative<LaneSubtype>(subtype);
  if (lane_subtype != is_drivable(kind) || (!lane_subtype && kind != CellKind::ParkingOrFree)) {
    throw DomainError("assign_rotation: subtype does not match kind of cell " + cell_name(cell));
  }
  return rotation_for_mask(lane_neighbor_mask(spec, cell));
}

unsigned canonical_open_edges(const ClassifiedCell& c) {
  if (c.kind == CellKind::Obstacle) return 0;
  const bool collinear_pair =
      c.variant == RenderVariant::Axis || (c.park_subtype && *c.park_subtype == ParkSubtype::Type1);
  switch (c.lane_adjacency) {
    case 4:
      return canonical_for_mask(kAll);
    case 3:
      return canonical_for_mask(kAll & ~bit(Direction::South));
    case 2:
      return canonical_for_mask(collinear_pair ? kNorthSouth : bit(Direction::North) | bit(Direction::East));
    case 1:
      return canonical_for_mask(bit(Direction::North));
    default:
      return 0;
  }
}

int rotational_period(const ClassifiedCell& c) {
  const unsigned open = canonical_open_edges(c);
  for (int p : {1, 2}) {
    if (rotate_mask(open, p) == open) return p;
  }
  return 4;
}

InvalidSpecError::InvalidSpecError(ValidationReport report)
    : ValidationError([&] {
        std::string msg = "garage spec is invalid:";
        for (const auto& v : report.violations) {
          msg += " [" + std::string(to_string(v.rule)) + " at " + v.location + ": " + v.message + "]";
        }
        return msg;
      }()),
      report_(std::move(report)) {}

ClassifiedGrid classify_all(const GarageSpec& spec) {
  ValidationReport report = validate(spec);
  if (!report.ok) throw InvalidSpecError(std::move(report));

  ClassifiedGrid grid;
  grid.spec = spec;
  grid.cells.reserve(static_cast<std::size_t>(spec.m) * spec.n);
  for (int i = 0; i < spec.m; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      ClassifiedCell c;
      c.cell = {i, j};
      c.kind = cell_kind(spec, c.cell);
      const unsigned mask = lane_neighbor_mask(spec, c.cell);
      c.lane_adjacency = std::popcount(mask);
      if (is_drivable(c.kind)) {
        c.lane_subtype = classify_lane(spec, c.cell);
        c.variant = lane_render_variant(spec, c.cell);
        c.rotation = rotation_for_mask(mask);
      } else if (c.kind == CellKind::ParkingOrFree) {
        c.park_subtype = classify_parking(spec, c.cell);
        c.rotation = rotation_for_mask(mask);
      }
      grid.cells.push_back(c);
    }
  }
  return grid;
}

std::string export_classified_grid(const ClassifiedGrid& grid) {
  using nlohmann::ordered_json;
  std::ostringstream out;
  out << "{\n  \"schema\": \"" << kClassifiedGridSchema << "\",\n  \"m\": " << grid.spec.m
      << ",\n  \"n\": " << grid.spec.n << ",\n  \"cells\": [\n";
  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const ClassifiedCell& c = grid.cells[k];
    ordered_json row;
    row["i"] = c.cell.i;
    row["j"] = c.cell.j;
    row["kind"] = to_string(c.kind);
    row["cnt"] = c.lane_adjacency;
    if (c.lane_subtype) {
      row["subtype"] = to_string(*c.lane_subtype);
    } else if (c.park_subtype) {
      row["subtype"] = to_string(*c.park_subtype);
    } else {
      row["subtype"] = nullptr;
    }
    row["render_variant"] = to_string(c.variant);
    row["quarter_turns"] = c.rotation.quarter_turns;
    out << "    " << row.dump() << (k + 1 < grid.cells.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  return out.str();
}

}  // namespace avpgarage

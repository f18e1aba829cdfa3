#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avpgarage/errors.hpp"

namespace avpgarage {

// Integer codes of the structure matrix.
enum class CellKind : int {
  Obstacle = -1,
  ParkingOrFree = 0,
  Lane = 1,
  Entrance = 2,
  Exit = 3,
};

bool is_valid_code(int code);
CellKind kind_from_code(int code);  // throws DomainError outside [-1, 3]
int code_of(CellKind kind);
std::string_view to_string(CellKind kind);

// Entrance and exit ramps carry traffic, so they count as lane squares.
inline bool is_drivable(CellKind kind) {
  return kind == CellKind::Lane || kind == CellKind::Entrance || kind == CellKind::Exit;
}

struct CellRef {
  int i = 0;  // row
  int j = 0;  // column
  bool operator==(const CellRef&) const = default;
  auto operator<=>(const CellRef&) const = default;
};

// Compass directions over the grid. North is row i-1, east is column j+1.
enum class Direction : int { North = 0, East = 1, South = 2, West = 3 };

inline constexpr Direction kDirections[4] = {Direction::North, Direction::East, Direction::South,
                                             Direction::West};

CellRef step(CellRef cell, Direction d);
Direction opposite(Direction d);
std::string_view to_string(Direction d);

// The plan as given: structure matrix S plus the row and column extents.
// Holds possibly invalid content; validate() decides whether it is usable.
struct GarageSpec {
  int m = 0;
  int n = 0;
  std::vector<int> structure;       // row-major, m * n
  std::vector<double> row_widths;   // R, meters along +y per grid row
  std::vector<double> col_widths;   // C, meters along +x per grid column

  int at(int i, int j) const { return structure[static_cast<std::size_t>(i) * n + j]; }
  int& at(int i, int j) { return structure[static_cast<std::size_t>(i) * n + j]; }
  bool contains(CellRef c) const { return c.i >= 0 && c.i < m && c.j >= 0 && c.j < n; }

  static GarageSpec from_rows(const std::vector<std::vector<int>>& rows, std::vector<double> row_widths,
                              std::vector<double> col_widths);

  bool operator==(const GarageSpec&) const = default;
};

struct NeighborSet {
  std::optional<CellKind> north;
  std::optional<CellKind> east;
  std::optional<CellKind> south;
  std::optional<CellKind> west;

  const std::optional<CellKind>& operator[](Direction d) const;
  bool operator==(const NeighborSet&) const = default;
};

enum class RuleId {
  RowWidthsLength,  // |R| == m
  ColWidthsLength,  // |C| == n
  CellCode,         // -1 <= S(i,j) <= 3
  WidthPositive,    // every extent finite and > 0
  NoLanes,          // at least one drivable cell
};

std::string_view to_string(RuleId rule);

struct Violation {
  RuleId rule;
  std::string location;  // "row_widths", "col_widths[2]", "structure[1][3]", "structure"
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

inline constexpr std::string_view kGarageSpecSchema = "garage-spec/1";

// JSON document "garage-spec/1". Only the shape is checked here.
GarageSpec parse_garage_spec(std::string_view json_text);
GarageSpec load_garage_spec(const std::filesystem::path& path);
// Three-file fallback: structure.csv, rows.csv, cols.csv.
GarageSpec load_garage_spec_csv(const std::filesystem::path& structure_csv, const std::filesystem::path& rows_csv,
                                const std::filesystem::path& cols_csv);
std::string emit_garage_spec(const GarageSpec& spec);

ValidationReport validate(const GarageSpec& spec);

CellKind cell_kind(const GarageSpec& spec, CellRef cell);
NeighborSet neighbor_set(const GarageSpec& spec, CellRef cell);

}  // namespace avpgarage

#include "avpgarage/grid_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace avpgarage {

using nlohmann::json;

bool is_valid_code(int code) { return code >= -1 && code <= 3; }

CellKind kind_from_code(int code) {
  if (!is_valid_code(code)) {
    throw DomainError("cell code " + std::to_string(code) + " is outside [-1, 3]");
  }
  return static_cast<CellKind>(code);
}

int code_of(CellKind kind) { return static_cast<int>(kind); }

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Obstacle:
      return "obstacle";
    case CellKind::ParkingOrFree:
      return "parking";
    case CellKind::Lane:
      return "lane";
    case CellKind::Entrance:
      return "entrance";
    case CellKind::Exit:
      return "exit";
  }
  return "?";
}

CellRef step(CellRef cell, Direction d) {
  switch (d) {
    case Direction::North:
      return {cell.i - 1, cell.j};
    case Direction::East:
      return {cell.i, cell.j + 1};
    case Direction::South:
      return {cell.i + 1, cell.j};
    case Direction::West:
      return {cell.i, cell.j - 1};
  }
  return cell;
}

Direction opposite(Direction d) { return static_cast<Direction>((static_cast<int>(d) + 2) % 4); }

std::string_view to_string(Direction d) {
  static constexpr std::string_view names[] = {"N", "E", "S", "W"};
  return names[static_cast<int>(d)];
}

std::string_view to_string(RuleId rule) {
  switch (rule) {
    case RuleId::RowWidthsLength:
      return "row-widths-length";
    case RuleId::ColWidthsLength:
      return "col-widths-length";
    case RuleId::CellCode:
      return "cell-code";
    case RuleId::WidthPositive:
      return "width-positive";
    case RuleId::NoLanes:
      return "no-lanes";
  }
  return "?";
}

GarageSpec GarageSpec::from_rows(const std::vector<std::vector<int>>& rows, std::vector<double> row_widths,
                                 std::vector<double> col_widths) {
  GarageSpec spec;
  spec.m = static_cast<int>(rows.size());
  spec.n = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != spec.n) {
      throw ParseError("ragged row " + std::to_string(i));
    }
    spec.structure.insert(spec.structure.end(), rows[i].begin(), rows[i].end());
  }
  spec.row_widths = std::move(row_widths);
  spec.col_widths = std::move(col_widths);
  return spec;
}

const std::optional<CellKind>& NeighborSet::operator[](Direction d) const {
  switch (d) {
    case Direction::North:
      return north;
    case Direction::East:
      return east;
    case Direction::South:
      return south;
    case Direction::West:
      return west;
  }
  return north;
}

namespace {

std::vector<double> parse_width_array(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end() || !it->is_array()) {
    throw ParseError(std::string("field '") + field + "' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (std::size_t k = 0; k < it->size(); ++k) {
    const json& v = (*it)[k];
    if (!v.is_number()) {
      throw ParseError(std::string("field '") + field + "' entry " + std::to_string(k) + " is not numeric");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> load_width_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<double> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (const auto& field : split_csv_line(line)) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(path.filename().string() + " line " + std::to_string(line_no) + ": non-numeric width '" +
                         field + "'");
      }
      out.push_back(value);
    }
  }
  return out;
}

std::string dump_number(double v) { return json(v).dump(); }

}  // namespace

GarageSpec parse_garage_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document must be a JSON object");
  auto schema = doc.find("schema");
  if (schema == doc.end() || !schema->is_string() || schema->get<std::string>() != kGarageSpecSchema) {
    throw ParseError("schema must be \"garage-spec/1\"");
  }
  auto structure = doc.find("structure");
  if (structure == doc.end() || !structure->is_array() || structure->empty()) {
    throw ParseError("field 'structure' must be a non-empty array of rows");
  }
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < structure->size(); ++i) {
    const json& row = (*structure)[i];
    if (!row.is_array() || row.empty()) {
      throw ParseError("structure row " + std::to_string(i) + " must be a non-empty array");
    }
    std::vector<int> cells;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number_integer()) {
        throw ParseError("structure[" + std::to_string(i) + "][" + std::to_string(j) + "] is not an integer");
      }
      cells.push_back(row[j].get<int>());
    }
    if (!rows.empty() && cells.size() != rows.front().size()) {
      throw ParseError("ragged row " + std::to_string(i));
    }
    rows.push_back(std::move(cells));
  }
  return GarageSpec::from_rows(rows, parse_width_array(doc, "row_widths_m"), parse_width_array(doc, "col_widths_m"));
}

GarageSpec load_garage_spec(const std::filesystem::path& path) { return parse_garage_spec(read_file(path)); }

GarageSpec load_garage_spec_csv(const std::filesystem::path& structure_csv, const std::filesystem::path& rows_csv,
                                const std::filesystem::path& cols_csv) {
  std::istringstream in(read_file(structure_csv));
  std::vector<std::vector<int>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<int> cells;
    for (const auto& field : split_csv_line(line)) {
      int value = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(structure_csv.filename().string() + " line " + std::to_string(line_no) +
                         ": non-integer cell '" + field + "'");
      }
      cells.push_back(value);
    }
    if (!rows.empty() && cells.size() != rows.front().size()) {
      throw ParseError(structure_csv.filename().string() + " line " + std::to_string(line_no) + ": ragged row " +
                       std::to_string(rows.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ParseError(structure_csv.filename().string() + ": no rows");
  return GarageSpec::from_rows(rows, load_width_csv(rows_csv), load_width_csv(cols_csv));
}

std::string emit_garage_spec(const GarageSpec& spec) {
  std::ostringstream out;
  out << "{\n  \"schema\": \"" << kGarageSpecSchema << "\",\n  \"structure\": [\n";
  for (int i = 0; i < spec.m; ++i) {
    out << "    [";
    for (int j = 0; j < spec.n; ++j) out << (j ? ", " : "") << spec.at(i, j);
    out << "]" << (i + 1 < spec.m ? ",\n" : "\n");
  }
  auto vec = [&](const std::vector<double>& v) {
    out << "[";
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? ", " : "") << dump_number(v[k]);
    out << "]";
  };
  out << "  ],\n  \"row_widths_m\": ";
  vec(spec.row_widths);
  out << ",\n  \"col_widths_m\": ";
  vec(spec.col_widths);
  out << "\n}\n";
  return out.str();
}

ValidationReport validate(const GarageSpec& spec) {
  ValidationReport report;
  auto add = [&](RuleId rule, std::string location, std::string message) {
    report.violations.push_back({rule, std::move(location), std::move(message)});
  };

  if (static_cast<int>(spec.row_widths.size()) != spec.m) {
    add(RuleId::RowWidthsLength, "row_widths",
        "row vector length " + std::to_string(spec.row_widths.size()) + " != m=" + std::to_string(spec.m));
  }
  if (static_cast<int>(spec.col_widths.size()) != spec.n) {
    add(RuleId::ColWidthsLength, "col_widths",
        "column vector length " + std::to_string(spec.col_widths.size()) + " != n=" + std::to_string(spec.n));
  }
  bool any_lane = false;
  for (int i = 0; i < spec.m; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      const int code = spec.at(i, j);
      if (!is_valid_code(code)) {
        add(RuleId::CellCode, "structure[" + std::to_string(i) + "][" + std::to_string(j) + "]",
            "code " + std::to_string(code) + " outside [-1, 3]");
      } else if (is_drivable(static_cast<CellKind>(code))) {
        any_lane = true;
      }
    }
  }
  auto check_widths = [&](const std::vector<double>& widths, const char* name) {
    for (std::size_t k = 0; k < widths.size(); ++k) {
      if (!std::isfinite(widths[k]) || widths[k] <= 0.0) {
        add(RuleId::WidthPositive, std::string(name) + "[" + std::to_string(k) + "]",
            "width " + dump_number(widths[k]) + " must be finite and > 0");
      }
    }
  };
  check_widths(spec.row_widths, "row_widths");
  check_widths(spec.col_widths, "col_widths");
  if (spec.m * spec.n > 0 && !any_lane) {
    add(RuleId::NoLanes, "structure", "garage has no lane, entrance or exit cells");
  }
  if (spec.m <= 0 || spec.n <= 0) {
    add(RuleId::NoLanes, "structure", "structure matrix is empty");
  }
  report.ok = report.violations.empty();
  return report;
}

CellKind cell_kind(const GarageSpec& spec, CellRef cell) {
  if (!spec.contains(cell)) {
    throw IndexError("cell (" + std::to_string(cell.i) + "," + std::to_string(cell.j) + ") outside " +
                     std::to_string(spec.m) + "x" + std::to_string(spec.n) + " grid");
  }
  return kind_from_code(spec.at(cell.i, cell.j));
}

NeighborSet neighbor_set(const GarageSpec& spec, CellRef cell) {
  if (!spec.contains(cell)) {
    throw IndexError("cell (" + std::to_string(cell.i) + "," + std::to_string(cell.j) + ") outside " +
                     std::to_string(spec.m) + "x" + std::to_string(spec.n) + " grid");
  }
  auto look = [&](Direction d) -> std::optional<CellKind> {
    CellRef other = step(cell, d);
    if (!spec.contains(other)) return std::nullopt;
    return kind_from_code(spec.at(other.i, other.j));
  };
  return {look(Direction::North), look(Direction::East), look(Direction::South), look(Direction::West)};
}

}  // namespace avpgarage

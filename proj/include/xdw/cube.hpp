#pragma once

// Data cubes over a warehouse and the nine XOLAP operators: cube (build_cube),
// rotate, switch, roll-up, drill-down, slice, dice, pull and push.
//
// Cubes are values: every operator takes a cube by const reference and
// returns a new one. Cells keep (sum, count, min, max) accumulators so any
// aggregate, AVG included, re-aggregates exactly after roll-up.

#include "xdw/exact_sum.hpp"
#include "xdw/warehouse.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xdw {

enum class Aggregate { Sum, Count, Avg, Min, Max };

std::string_view to_string(Aggregate a);
Aggregate parse_aggregate(std::string_view s); // case-insensitive

struct CellValue {
  double sum = 0; // correctly rounded, independent of addition order
  std::size_t count = 0;
  double min = 0;
  double max = 0;
  double value = 0; // aggregate-selected presentation value

  void add(double x);
  void merge(const CellValue &other);
  void finish(Aggregate a);
  bool operator==(const CellValue &o) const {
    return sum == o.sum && count == o.count && min == o.min && max == o.max && value == o.value;
  }

  ExactSum exact;
};

struct AxisSpec {
  std::string dim_id;
  std::string level_id;
};

struct Axis {
  std::string dim_id;
  std::string level_id;
  std::vector<std::string> members; // presentation order
  bool synthetic = false;           // created by pull from cell content
  bool operator==(const Axis &) const = default;
};

/// Member restriction recorded by slice and dice; reapplied by drill-down.
struct Predicate {
  std::string dim_id;
  std::string level_id;
  std::vector<std::string> members;
  bool operator==(const Predicate &) const = default;
};

struct LabeledValue {
  std::string label;
  CellValue value;
  bool operator==(const LabeledValue &) const = default;
};

struct PushedAxis {
  std::size_t position = 0;
  Axis axis;
  bool operator==(const PushedAxis &) const = default;
};

using Coordinate = std::vector<std::string>;

struct Cube {
  std::vector<Axis> axes;
  std::string measure_id;
  Aggregate aggregate = Aggregate::Sum;
  std::map<Coordinate, CellValue> cells; // absent coordinate = empty cell
  /// Cell content carried after push: (member, value) pairs per coordinate.
  std::map<Coordinate, std::vector<LabeledValue>> content;
  std::optional<PushedAxis> pushed;
  std::vector<Predicate> predicates;
  std::shared_ptr<const Warehouse> source;

  std::optional<std::size_t> axis_index(std::string_view dim_id) const;
  const CellValue *cell(const Coordinate &c) const;

  /// Non-empty cells in presentation order (row-major over member orders).
  std::vector<std::pair<const Coordinate *, const CellValue *>> ordered_cells() const;

  /// All cells merged into one, finished under the cube's aggregate.
  CellValue total() const;

  /// Same axes, aggregate and cells (provenance ignored).
  bool same_content(const Cube &other) const;
};

Cube build_cube(std::shared_ptr<const Warehouse> warehouse, const std::vector<AxisSpec> &axes,
                std::string_view measure_id, Aggregate aggregate);

Cube roll_up(const Cube &cube, std::string_view dim_id, std::string_view target_level);
Cube drill_down(const Cube &cube, std::string_view dim_id, std::string_view target_level);
Cube slice(const Cube &cube, std::string_view dim_id, std::string_view member);
Cube dice(const Cube &cube, const std::map<std::string, std::vector<std::string>> &selection);
Cube rotate(const Cube &cube, const std::vector<std::size_t> &permutation);
Cube switch_members(const Cube &cube, std::string_view dim_id, const std::vector<std::string> &order);
Cube push(const Cube &cube, std::string_view dim_id);

/// Restore the pushed axis from cell content.
Cube pull(const Cube &cube);

using Labeling = std::function<std::string(const CellValue &)>;

/// Label every content item (or plain cell) and turn the labels into a new
/// trailing axis `dim_id`. Fails with "labels-not-unique" when two items of
/// one coordinate receive the same label.
Cube pull(const Cube &cube, std::string_view dim_id, const Labeling &labeling);

/// Tab-separated export: a `#` header line, then one line per non-empty
/// cell: coordinate ids, sum, count, min, max, value[, content].
std::string export_cube_text(const Cube &cube);

} // namespace xdw

#pragma once

// Tabular loading: a comma-separated table plus a column mapping becomes a
// warehouse (model, one dimension document per dimension, facts). Also the
// seeded demo warehouses used by tests and the CLI.

#include "xdw/warehouse.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace xdw {

// --- delimited text --------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated, first row is the header, fields may be double-quoted with
/// "" as an escaped quote, LF or CRLF line ends, leading BOM ignored, blank
/// lines skipped. Throws bad-csv (line:col) on unterminated quotes, text after
/// a closing quote, ragged rows or duplicate header names.
CsvTable parse_csv(std::string_view text);
std::string write_csv(const CsvTable &table);

// --- mapping -----------------------------------------------------------------

struct AttributeBinding {
  std::string name;
  std::string column;
  AttributeType type = AttributeType::String;
};

struct LevelBinding {
  std::string level_id;
  std::string column; // member id; for coarser levels this is the parent column
  std::vector<AttributeBinding> attributes;
};

struct DimensionBinding {
  std::string dim_id;
  std::string path;
  std::vector<LevelBinding> levels; // finest first
};

struct MeasureBinding {
  std::string measure_id;
  std::string column;
  MeasureType type = MeasureType::Real;
};

struct IngestionMapping {
  std::string fact_id = "facts";
  std::string fact_path = "facts.xml";
  std::vector<DimensionBinding> dimensions;
  std::vector<MeasureBinding> measures;
};

/// JSON form:
///   {"facts": {"id", "path"}?,
///    "dimensions": [{"id", "path"?, "levels": [{"id", "column",
///                    "attributes": [{"name", "column"?, "type"?}]}]}],
///    "measures": [{"id", "column"?, "type"?}]}
/// Omitted columns default to the binding's own name; dimension paths
/// default to dim-<id>.xml. Throws bad-mapping.
IngestionMapping parse_mapping(std::string_view json);
std::string format_mapping(const IngestionMapping &mapping);

/// One fact per row. Members are deduplicated per level and written in
/// byte order; Roll-up/Drill-Down links come from the level columns.
/// Throws bad-mapping (duplicate bindings, empty lists), missing-column
/// (header lacks a bound column), missing-value (empty bound cell),
/// bad-number, bad-value (typed attribute), conflicting-parent (a member
/// with two parents), conflicting-attribute (a member with two values for
/// one attribute). Locations are "row N" or "row N, column C".
Warehouse ingest(const CsvTable &table, const IngestionMapping &mapping);

// --- fixtures ------------------------------------------------------------------

/// clapi-small: the three-dimension transcription schema (time-d, speaker-d,
/// transcription-d; measure frequency) with seeded facts.
/// mca-blocks: 10 tokens x 8 locations whose occupied cells form blocks
/// under a hidden permutation, so byte-ordered axes look scattered.
/// rules-demo: <= 100 facts where one token at one location comes mostly
/// from one sex; speaker-d has a sex level for rule mining.
/// Throws unknown-fixture.
Warehouse generate_fixture(std::string_view name, std::uint64_t seed);

/// The table and mapping a fixture is ingested from.
struct FixtureSource {
  CsvTable table;
  IngestionMapping mapping;
};
FixtureSource fixture_source(std::string_view name, std::uint64_t seed);

std::vector<std::string> fixture_names();

} // namespace xdw

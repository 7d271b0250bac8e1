#pragma once

// The three warehouse document kinds: dw-model.xml (schema), one dimension
// document per dimension (members and hierarchy links) and the fact document.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xdw {

enum class AttributeType { String, Boolean, Integer, Real };
enum class MeasureType { Integer, Real };

std::string_view to_string(AttributeType t);
std::string_view to_string(MeasureType t);
AttributeType parse_attribute_type(std::string_view s);
MeasureType parse_measure_type(std::string_view s);

struct AttributeSpec {
  std::string name;
  AttributeType type = AttributeType::String;
  bool operator==(const AttributeSpec &) const = default;
};

struct LevelSpec {
  std::string id;
  std::vector<AttributeSpec> attributes;

  const AttributeSpec *find_attribute(std::string_view name) const;
  bool operator==(const LevelSpec &) const = default;
};

/// Levels are stored finest first; level i rolls up to level i + 1.
struct DimensionSpec {
  std::string id;
  std::string path;
  std::vector<LevelSpec> levels;

  /// Position of `level_id` in roll-up order, or nullopt.
  std::optional<std::size_t> level_index(std::string_view level_id) const;
  bool operator==(const DimensionSpec &) const = default;
};

struct MeasureSpec {
  std::string id;
  MeasureType type = MeasureType::Real;
  bool operator==(const MeasureSpec &) const = default;
};

struct FactSpec {
  std::string id;
  std::string path;
  std::vector<MeasureSpec> measures;
  std::vector<std::string> dimension_refs;

  const MeasureSpec *find_measure(std::string_view id) const;
  bool operator==(const FactSpec &) const = default;
};

struct WarehouseModel {
  std::vector<DimensionSpec> dimensions;
  FactSpec facts;

  const DimensionSpec *find_dimension(std::string_view id) const;
  bool operator==(const WarehouseModel &) const = default;
};

struct Instance {
  std::string id;
  std::map<std::string, std::string> attributes;
  std::optional<std::string> roll_up;
  std::optional<std::vector<std::string>> drill_down;
  bool operator==(const Instance &) const = default;
};

struct LevelInstances {
  std::string level_id;
  std::vector<Instance> instances;

  const Instance *find(std::string_view id) const;
  bool operator==(const LevelInstances &) const = default;
};

struct DimensionData {
  std::string dim_id;
  std::vector<LevelInstances> levels; // same order as the DimensionSpec

  const LevelInstances *find_level(std::string_view level_id) const;
  bool operator==(const DimensionData &) const = default;
};

struct FactRow {
  std::map<std::string, double> measures;
  std::map<std::string, std::string> members; // dimension id -> finest-level instance id
  bool operator==(const FactRow &) const = default;
};

struct FactTable {
  std::string fact_spec_id;
  std::vector<FactRow> rows;
  bool operator==(const FactTable &) const = default;
};

/// A loaded warehouse: the model plus one DimensionData per declared
/// dimension (model order) and the fact table.
struct Warehouse {
  WarehouseModel model;
  std::vector<DimensionData> dimensions;
  FactTable facts;

  const DimensionData *find_dimension_data(std::string_view dim_id) const;
  bool operator==(const Warehouse &) const = default;
};

// --- parsing -------------------------------------------------------------

WarehouseModel parse_model(std::string_view doc);
DimensionData parse_dimension(std::string_view doc, const DimensionSpec &spec);
FactTable parse_facts(std::string_view doc, const FactSpec &spec);

// --- serialization -------------------------------------------------------

struct Document {
  std::string file_name;
  std::string text;
};

std::string serialize_model(const WarehouseModel &model);
std::string serialize_dimension(const DimensionData &data);
std::string serialize_facts(const FactTable &facts);

/// dw-model.xml first, then dimension documents in model order, then facts.
std::vector<Document> serialize_warehouse(const Warehouse &w);

/// Shortest decimal text that reparses to the same double.
std::string format_number(double v);

/// Whole-string decimal parse (from_chars grammar); nullopt on any junk.
std::optional<double> parse_number(std::string_view s);

// --- validation ----------------------------------------------------------

enum class Severity { Error, Warning };

struct Finding {
  Severity severity = Severity::Error;
  std::string kind;    // stable machine-readable code, e.g. "asymmetric-link"
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const; // no error-severity findings
  std::size_t count(std::string_view kind) const;
};

ValidationReport validate_warehouse(const Warehouse &w);

// --- files ---------------------------------------------------------------

inline constexpr std::string_view kModelFileName = "dw-model.xml";

/// Parse a warehouse from `dir`/dw-model.xml and the documents it names.
/// Errors carry the offending file name in their message.
Warehouse load_warehouse(const std::filesystem::path &dir);

/// Write every serialized document into `dir` (created if missing).
void write_warehouse(const Warehouse &w, const std::filesystem::path &dir);

std::string read_file(const std::filesystem::path &p);
void write_file(const std::filesystem::path &p, std::string_view text);

} // namespace xdw

#pragma once

// Rule-driven hierarchy evolution. A rule set is one structure rule
//
//   if ConditionOn(<source-level>, {<attr>, ...}) then Generate(<new-level>, {<attr>, ...})
//
// followed by data rules, one per instance of the new level:
//
//   (1) if location in {'begin', 'end'} then location-group={extreme}
//
// Applying a rule set inserts the new level directly above its source level
// and rewrites the model and that dimension's data document.

#include "xdw/warehouse.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xdw {

/// Condition attribute naming the instance id rather than an attribute value.
inline constexpr std::string_view kInstanceIdAttribute = "@id";

struct Clause {
  enum class Op { In, NotIn, Equals };
  std::string attribute;
  Op op = Op::In;
  std::vector<std::string> values;
  bool operator==(const Clause &) const = default;
};

/// Conjunction of clauses; string comparison is exact.
struct Condition {
  std::vector<Clause> clauses;

  bool matches(const Instance &instance) const;
  bool operator==(const Condition &) const = default;
};

struct StructureRule {
  std::string source_level;
  std::vector<std::string> condition_attributes;
  std::string target_level;
  std::vector<std::string> target_attributes;
  bool operator==(const StructureRule &) const = default;
};

struct DataRule {
  Condition condition;
  std::map<std::string, std::string> target; // target attribute -> value
  bool operator==(const DataRule &) const = default;
};

struct RuleSet {
  std::string dim_id; // empty: resolved from the source level
  StructureRule structure;
  std::vector<DataRule> data;
  bool operator==(const RuleSet &) const = default;
};

/// Throws Error("rule-syntax") with a "line:column" location.
RuleSet parse_rules(std::string_view text);

/// Canonical rule text; parse_rules(format_rules(r)) == r.
std::string format_rules(const RuleSet &rules);

/// Instance id created by a data rule: the value bound to the alphabetically
/// first target attribute, coerced to an XML name token.
std::string target_instance_id(const DataRule &rule);

/// Dimension owning the source level (explicit dim_id wins). Empty when
/// the level is missing or ambiguous.
std::string resolve_dimension(const RuleSet &rules, const WarehouseModel &model);

/// Findings: missing-source-level, target-level-exists, incomplete,
/// ambiguous, undeclared-attribute, plus rule-shape findings.
ValidationReport validate_ruleset(const RuleSet &rules, const Warehouse &w);

struct ChangeSummary {
  std::string dim_id;
  std::string source_level;
  std::string new_level;
  std::size_t position = 0; // index of the new level, finest first
  std::vector<std::pair<std::string, std::vector<std::string>>> groups; // new instance -> children
  std::string rules_text;
};

struct EvolutionResult {
  Warehouse warehouse;
  ChangeSummary summary;
};

/// Throws Error("invalid-rules") when validation reports errors and
/// Error("non-homogeneous-parent") when an inserted level would give one
/// new instance children with different parents.
EvolutionResult apply_ruleset(const Warehouse &w, const RuleSet &rules);

} // namespace xdw

#pragma once

// Association rules inside a cube context. A meta-rule names the
// (dimension, level) slots allowed on each side; frequent itemsets hold at
// most one member per slot and supports are SUM or COUNT aggregates of a
// measure relative to the whole context.

#include "xdw/cube.hpp"
#include "xdw/warehouse.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xdw {

struct MetaRule {
  std::vector<Predicate> context; // dice restriction; empty = all facts
  std::vector<AxisSpec> antecedent;
  std::vector<AxisSpec> consequent;
  std::string measure_id;
  Aggregate aggregate = Aggregate::Count; // Sum or Count
};

/// Throws empty-slots, intra-dimensional (a dimension used twice across
/// slots), bad-aggregate, unknown-dimension, unknown-level, unknown-measure.
void validate_meta_rule(const MetaRule &meta, const Warehouse &w);

struct Item {
  std::string dim_id;
  std::string level_id;
  std::string member;
  auto operator<=>(const Item &) const = default;
};

/// Items in slot order (antecedent slots, then consequent slots).
using Itemset = std::vector<Item>;

struct FrequentItemset {
  Itemset items;
  double weight = 0;  // aggregate over matching facts
  double support = 0; // weight / context total
};

struct FrequentResult {
  std::vector<FrequentItemset> itemsets; // by size, then slot/member order
  double total = 0;                      // aggregate over the context
  std::size_t context_facts = 0;
};

/// Levelwise search: frequent single items, then joins of frequent k-sets
/// that share their first k - 1 items, pruned when any k-subset is not
/// frequent. Throws bad-support (outside (0, 1]), negative-measure (SUM with
/// a negative value in context), empty-context (no facts or zero total).
FrequentResult mine_frequent(const Warehouse &w, const MetaRule &meta, double min_support);

struct AssociationRule {
  Itemset antecedent;
  Itemset consequent;
  double support = 0; // of antecedent + consequent
  double confidence = 0;
  double lift = 0;
  std::optional<double> loevinger; // absent when support(consequent) = 1
};

/// One rule per frequent itemset with items on both sides of the meta-rule.
std::vector<AssociationRule> derive_rules(const FrequentResult &frequent, const MetaRule &meta, double min_confidence);

enum class RuleFormat { Table, Json };

/// Loevinger descending (absent last), lift descending, then antecedent and
/// consequent text. The table is tab-separated with a header row.
std::string export_rules(std::vector<AssociationRule> rules, RuleFormat format);

std::string to_string(const Itemset &items);

} // namespace xdw

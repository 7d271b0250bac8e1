#pragma once

// Aggregation by clustering: members of one cube axis become feature vectors,
// agglomerative hierarchical clustering groups them, and a chosen cut becomes
// an evolution rule set that materializes the grouping as a new level.

#include "xdw/cube.hpp"
#include "xdw/evolution.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace xdw {

struct MemberVector {
  std::string member_id;
  std::vector<double> features;
  std::map<std::string, std::string> descriptors; // attribute -> value
  bool operator==(const MemberVector &) const = default;
};

struct FeatureSet {
  /// Column j is the coordinate of the other axes, in cube axis order,
  /// enumerated row-major over each axis' presentation order.
  std::vector<Coordinate> columns;
  std::vector<MemberVector> vectors; // axis presentation order
};

/// Empty cells contribute 0. A cube with no other axis yields one column.
/// Throws Error("not-an-axis").
FeatureSet extract_member_vectors(const Cube &cube, std::string_view dim_id);

/// Rescale each feature column to [0, 1]; constant columns become 0.
void normalize_min_max(std::vector<MemberVector> &vectors);

/// Append one column per (descriptor, value) pair, sorted, holding `weight`
/// when the member has that value and 0 otherwise.
void append_descriptor_columns(std::vector<MemberVector> &vectors, double weight);

enum class Linkage { Single, Complete, Average, Ward };

std::string_view to_string(Linkage l);
Linkage parse_linkage(std::string_view s);

/// Leaves are 0..n-1; merge i creates cluster n + i. `a` < `b`.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0;
  std::size_t size = 0;
  bool operator==(const Merge &) const = default;
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;

  /// Leaf indices under cluster `id`, ascending.
  std::vector<std::size_t> members(std::size_t id) const;
};

/// Euclidean distance. Ward heights follow the Lance-Williams recurrence on
/// unsquared distances. Among pairs whose linkage is within a relative 1e-12
/// of the minimum, the pair with the lowest (min member id, min member id)
/// key merges first. Throws Error("too-few-members") for n < 2.
Dendrogram ahc_cluster(const std::vector<MemberVector> &vectors, Linkage linkage);

struct Partition {
  std::vector<std::vector<std::string>> clusters; // ordered by first leaf
  std::size_t k() const { return clusters.size(); }
};

/// Undo the last k - 1 merges. Throws Error("k-out-of-range").
Partition cut_partition(const Dendrogram &d, std::size_t k);

struct PartitionQuality {
  std::size_t k = 0;
  double within = 0;  // sum of squared distances to cluster centroids
  double between = 0; // cluster-size-weighted squared centroid offsets
  double total = 0;   // sum of squared distances to the global centroid
  double ratio = 0;   // between / total, 0 when total is 0
};

/// Throws Error("partition-mismatch") if the partition does not cover the
/// vectors exactly.
PartitionQuality partition_quality(const Partition &p, const std::vector<MemberVector> &vectors);

/// Quality of every cut k = 1..n of the dendrogram.
std::vector<PartitionQuality> quality_table(const Dendrogram &d, const std::vector<MemberVector> &vectors);

/// Rule set creating `target_level` (one attribute `target_attribute`) over
/// the axis level of `dim_id`, one data rule per cluster named by
/// `cluster_names`. Conditions use the first level attribute whose values
/// identify instances, or the instance id when none does.
/// Throws Error("name-collision"), Error("partition-mismatch").
RuleSet partition_to_rules(const Partition &p, const Cube &cube, std::string_view dim_id,
                           std::string_view target_level, const std::vector<std::string> &cluster_names,
                           std::string_view target_attribute);

} // namespace xdw

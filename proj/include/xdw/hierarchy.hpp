#pragma once

#include "xdw/warehouse.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xdw {

/// Positional view of one dimension's hierarchy. Member positions follow
/// document order; ancestor lookups follow Roll-up chains.
class DimensionIndex {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  DimensionIndex(const DimensionSpec &spec, const DimensionData &data);

  const DimensionSpec &spec() const { return *spec_; }
  std::size_t level_count() const { return members_.size(); }
  std::size_t level_index(std::string_view level_id) const; // throws unknown-level
  const std::vector<std::string> &members(std::size_t level) const { return members_[level]; }
  const Instance &instance(std::size_t level, std::size_t pos) const { return *instances_[level][pos]; }
  std::size_t position(std::size_t level, std::string_view id) const; // npos when absent

  /// Position at `to` of the ancestor of member `pos` at level `from` (from <= to).
  std::size_t ancestor(std::size_t from, std::size_t pos, std::size_t to) const;

  /// Position at `level` of the ancestor of a finest-level instance id.
  std::size_t roll_up_finest(std::string_view finest_id, std::size_t level) const;

  /// True when member `pos` at `level` is related (same, ancestor or
  /// descendant) to some member of `selected` at `selected_level`.
  bool related(std::size_t level, std::size_t pos, std::size_t selected_level,
               const std::vector<std::size_t> &selected) const;

private:
  const DimensionSpec *spec_;
  std::vector<std::vector<std::string>> members_;
  std::vector<std::vector<const Instance *>> instances_;
  std::vector<std::unordered_map<std::string, std::size_t>> positions_;
  std::vector<std::vector<std::size_t>> parent_; // parent_[level][pos] at level + 1
};

/// Indexes for every dimension of a warehouse, keyed by dimension id.
class WarehouseIndex {
public:
  explicit WarehouseIndex(const Warehouse &w);
  const DimensionIndex &dimension(std::string_view dim_id) const; // throws unknown-dimension
  const Warehouse &warehouse() const { return *w_; }

private:
  const Warehouse *w_;
  std::unordered_map<std::string, DimensionIndex> dims_;
};

} // namespace xdw

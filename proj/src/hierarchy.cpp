#include "xdw/hierarchy.hpp"

#include "xdw/error.hpp"

#include <algorithm>

namespace xdw {

DimensionIndex::DimensionIndex(const DimensionSpec &spec, const DimensionData &data) : spec_(&spec) {
  const std::size_t L = spec.levels.size();
  members_.resize(L);
  instances_.resize(L);
  positions_.resize(L);
  parent_.resize(L);
  for (std::size_t li = 0; li < L; ++li) {
    const LevelInstances *lv = data.find_level(spec.levels[li].id);
    if (!lv) continue;
    for (const auto &inst : lv->instances) {
      if (!positions_[li].emplace(inst.id, members_[li].size()).second) continue;
      members_[li].push_back(inst.id);
      instances_[li].push_back(&inst);
    }
  }
  for (std::size_t li = 0; li < L; ++li) {
    parent_[li].assign(members_[li].size(), npos);
    if (li + 1 == L) continue;
    for (std::size_t p = 0; p < members_[li].size(); ++p)
      if (const auto &ru = instances_[li][p]->roll_up) parent_[li][p] = position(li + 1, *ru);
  }
}

std::size_t DimensionIndex::level_index(std::string_view level_id) const {
  auto idx = spec_->level_index(level_id);
  if (!idx)
    throw Error("unknown-level", "dimension '" + spec_->id + "' has no level '" + std::string(level_id) + "'");
  return *idx;
}

std::size_t DimensionIndex::position(std::size_t level, std::string_view id) const {
  auto it = positions_[level].find(std::string(id));
  return it == positions_[level].end() ? npos : it->second;
}

std::size_t DimensionIndex::ancestor(std::size_t from, std::size_t pos, std::size_t to) const {
  for (std::size_t l = from; l < to && pos != npos; ++l) pos = parent_[l][pos];
  return pos;
}

std::size_t DimensionIndex::roll_up_finest(std::string_view finest_id, std::size_t level) const {
  return ancestor(0, position(0, finest_id), level);
}

bool DimensionIndex::related(std::size_t level, std::size_t pos, std::size_t selected_level,
                             const std::vector<std::size_t> &selected) const {
  if (selected_level >= level) {
    std::size_t a = ancestor(level, pos, selected_level);
    return std::find(selected.begin(), selected.end(), a) != selected.end();
  }
  return std::any_of(selected.begin(), selected.end(),
                     [&](std::size_t s) { return ancestor(selected_level, s, level) == pos; });
}

WarehouseIndex::WarehouseIndex(const Warehouse &w) : w_(&w) {
  for (const auto &spec : w.model.dimensions)
    if (const DimensionData *data = w.find_dimension_data(spec.id)) dims_.emplace(spec.id, DimensionIndex(spec, *data));
}

const DimensionIndex &WarehouseIndex::dimension(std::string_view dim_id) const {
  auto it = dims_.find(std::string(dim_id));
  if (it == dims_.end()) throw Error("unknown-dimension", "unknown dimension '" + std::string(dim_id) + "'");
  return it->second;
}

} // namespace xdw

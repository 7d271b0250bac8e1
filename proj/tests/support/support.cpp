#include "fixtures.hpp"
#include "random_warehouse.hpp"

#include <cmath>
#include <random>
#include <unistd.h>

namespace xdw::test {

TempDir::TempDir(const std::string &tag) {
  static std::mt19937_64 rng(static_cast<std::uint64_t>(::getpid()) * 7919u + 17u);
  for (;;) {
    path_ = std::filesystem::temp_directory_path() / ("xdw-" + tag + "-" + std::to_string(rng() % 1000000007u));
    if (std::filesystem::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Warehouse random_warehouse(std::uint64_t seed, const RandomWarehouseOptions &opt) {
  std::mt19937_64 rng(seed);
  Warehouse w;
  const bool integer = rng() % 2 == 0;
  w.model.facts = {"facts", "facts.xml", {{"m", integer ? MeasureType::Integer : MeasureType::Real}}, {}};
  w.facts.fact_spec_id = "facts";
  const std::size_t ndims = 1 + pick(rng, opt.max_dimensions);
  for (std::size_t d = 0; d < ndims; ++d) {
    const std::string did = "d" + std::to_string(d);
    const std::size_t nlev = 1 + pick(rng, opt.max_levels);
    DimensionSpec spec{did, "dim-" + did + ".xml", {}};
    for (std::size_t l = 0; l < nlev; ++l)
      spec.levels.push_back({did + "-l" + std::to_string(l), {{"name", AttributeType::String}}});
    // Build top-down: coarsest members first, then children for each.
    std::vector<std::vector<Instance>> levels(nlev);
    const std::size_t top = 1 + pick(rng, 3);
    for (std::size_t m = 0; m < top; ++m) {
      std::string id = spec.levels[nlev - 1].id + "-m" + std::to_string(m);
      levels[nlev - 1].push_back({id, {{"name", "v" + std::to_string(pick(rng, 4))}}, std::nullopt, std::nullopt});
    }
    for (std::size_t l = nlev - 1; l-- > 0;) {
      for (auto &parent : levels[l + 1]) {
        const std::size_t kids = 1 + pick(rng, 3);
        parent.drill_down.emplace();
        for (std::size_t k = 0; k < kids; ++k) {
          std::string id = spec.levels[l].id + "-m" + std::to_string(levels[l].size());
          parent.drill_down->push_back(id);
          levels[l].push_back({id, {{"name", "v" + std::to_string(pick(rng, 4))}}, parent.id, std::nullopt});
        }
      }
    }
    DimensionData data{did, {}};
    for (std::size_t l = 0; l < nlev; ++l) data.levels.push_back({spec.levels[l].id, std::move(levels[l])});
    w.model.facts.dimension_refs.push_back(did);
    w.model.dimensions.push_back(std::move(spec));
    w.dimensions.push_back(std::move(data));
  }
  const std::size_t nfacts = pick(rng, opt.max_facts + 1);
  for (std::size_t i = 0; i < nfacts; ++i) {
    FactRow row;
    double v;
    if (integer) {
      long lo = opt.allow_negative ? -20 : 0;
      v = static_cast<double>(lo + static_cast<long>(pick(rng, 71)));
    } else {
      v = (opt.allow_negative ? -10.0 : 0.0) + 110.0 * unit(rng);
      if (pick(rng, 10) == 0) v = 0.0;
    }
    row.measures["m"] = v;
    for (const auto &data : w.dimensions) {
      const auto &finest = data.levels.front().instances;
      row.members[data.dim_id] = finest[pick(rng, finest.size())].id;
    }
    w.facts.rows.push_back(std::move(row));
  }
  return w;
}

} // namespace xdw::test

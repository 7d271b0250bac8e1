#include "xdw/cube.hpp"

#include "xdw/error.hpp"
#include "xdw/hierarchy.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

namespace xdw {

std::string_view to_string(Aggregate a) {
  switch (a) {
  case Aggregate::Sum: return "SUM";
  case Aggregate::Count: return "COUNT";
  case Aggregate::Avg: return "AVG";
  case Aggregate::Min: return "MIN";
  case Aggregate::Max: return "MAX";
  }
  return "SUM";
}

Aggregate parse_aggregate(std::string_view s) {
  std::string up(s);
  for (auto &c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "SUM") return Aggregate::Sum;
  if (up == "COUNT") return Aggregate::Count;
  if (up == "AVG") return Aggregate::Avg;
  if (up == "MIN") return Aggregate::Min;
  if (up == "MAX") return Aggregate::Max;
  throw Error("unknown-aggregate", "unknown aggregate '" + std::string(s) + "'");
}

void CellValue::add(double x) {
  if (count == 0) {
    min = max = x;
  } else {
    min = std::min(min, x);
    max = std::max(max, x);
  }
  exact.add(x);
  sum = exact.value();
  ++count;
}

void CellValue::merge(const CellValue &o) {
  if (o.count == 0) return;
  if (count == 0) {
    min = o.min;
    max = o.max;
  } else {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
  exact.merge(o.exact);
  sum = exact.value();
  count += o.count;
}

void CellValue::finish(Aggregate a) {
  switch (a) {
  case Aggregate::Sum: value = sum; break;
  case Aggregate::Count: value = static_cast<double>(count); break;
  case Aggregate::Avg: value = sum / static_cast<double>(count); break;
  case Aggregate::Min: value = min; break;
  case Aggregate::Max: value = max; break;
  }
}

std::optional<std::size_t> Cube::axis_index(std::string_view dim_id) const {
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (axes[i].dim_id == dim_id) return i;
  return std::nullopt;
}

const CellValue *Cube::cell(const Coordinate &c) const {
  auto it = cells.find(c);
  return it == cells.end() ? nullptr : &it->second;
}

std::vector<std::pair<const Coordinate *, const CellValue *>> Cube::ordered_cells() const {
  std::vector<std::unordered_map<std::string, std::size_t>> pos(axes.size());
  for (std::size_t a = 0; a < axes.size(); ++a)
    for (std::size_t m = 0; m < axes[a].members.size(); ++m) pos[a].emplace(axes[a].members[m], m);
  std::vector<std::pair<std::vector<std::size_t>, std::pair<const Coordinate *, const CellValue *>>> keyed;
  keyed.reserve(cells.size());
  for (const auto &[coord, value] : cells) {
    std::vector<std::size_t> key(coord.size());
    for (std::size_t a = 0; a < coord.size(); ++a) key[a] = pos[a].at(coord[a]);
    keyed.push_back({std::move(key), {&coord, &value}});
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
  std::vector<std::pair<const Coordinate *, const CellValue *>> out;
  out.reserve(keyed.size());
  for (auto &k : keyed) out.push_back(k.second);
  return out;
}

CellValue Cube::total() const {
  CellValue t;
  for (const auto &[c, v] : cells) t.merge(v);
  if (t.count) t.finish(aggregate);
  return t;
}

bool Cube::same_content(const Cube &o) const {
  return axes == o.axes && measure_id == o.measure_id && aggregate == o.aggregate && cells == o.cells &&
         content == o.content && pushed == o.pushed;
}

namespace {

std::size_t require_axis(const Cube &cube, std::string_view dim_id) {
  auto i = cube.axis_index(dim_id);
  if (!i) throw Error("not-an-axis", "dimension '" + std::string(dim_id) + "' is not an axis of the cube");
  return *i;
}

void require_plain(const Cube &cube, std::string_view op) {
  if (cube.pushed)
    throw Error("pushed-content", std::string(op) + " is not available while the cube carries pushed content; pull first");
}

void require_provenance(const Cube &cube, std::string_view op) {
  if (!cube.source) throw Error("no-provenance", std::string(op) + " needs the cube's source warehouse");
  for (const auto &a : cube.axes)
    if (a.synthetic)
      throw Error("synthetic-axis", std::string(op) + " cannot recompute a cube with pulled axis '" + a.dim_id + "'");
}

Coordinate erase_at(const Coordinate &c, std::size_t i) {
  Coordinate out;
  out.reserve(c.size() - 1);
  for (std::size_t k = 0; k < c.size(); ++k)
    if (k != i) out.push_back(c[k]);
  return out;
}

struct ResolvedPredicate {
  const DimensionIndex *dim;
  std::size_t level;
  std::vector<std::size_t> selected;
};

Cube build_with_predicates(std::shared_ptr<const Warehouse> w, const std::vector<AxisSpec> &specs,
                           std::string_view measure_id, Aggregate aggregate, const std::vector<Predicate> &predicates) {
  if (!w) throw Error("no-provenance", "no warehouse given");
  const WarehouseModel &model = w->model;
  if (!model.facts.find_measure(measure_id))
    throw Error("unknown-measure", "unknown measure '" + std::string(measure_id) + "'");
  const WarehouseIndex index(*w);
  auto referenced = [&](const std::string &d) {
    return std::find(model.facts.dimension_refs.begin(), model.facts.dimension_refs.end(), d) !=
           model.facts.dimension_refs.end();
  };

  Cube cube;
  cube.measure_id = std::string(measure_id);
  cube.aggregate = aggregate;
  cube.predicates = predicates;
  cube.source = w;

  std::vector<ResolvedPredicate> preds;
  for (const auto &p : predicates) {
    const DimensionIndex &di = index.dimension(p.dim_id);
    ResolvedPredicate rp{&di, di.level_index(p.level_id), {}};
    for (const auto &m : p.members) {
      std::size_t pos = di.position(rp.level, m);
      if (pos == DimensionIndex::npos)
        throw Error("unknown-member", "level '" + p.level_id + "' has no member '" + m + "'");
      rp.selected.push_back(pos);
    }
    preds.push_back(std::move(rp));
  }

  std::vector<const DimensionIndex *> dims;
  std::vector<std::size_t> levels;
  std::set<std::string> seen;
  for (const auto &s : specs) {
    if (!model.find_dimension(s.dim_id))
      throw Error("unknown-dimension", "unknown dimension '" + s.dim_id + "'");
    if (!referenced(s.dim_id))
      throw Error("unknown-dimension", "dimension '" + s.dim_id + "' is not referenced by the facts");
    if (!seen.insert(s.dim_id).second)
      throw Error("duplicate-axis", "dimension '" + s.dim_id + "' appears twice among the axes");
    const DimensionIndex &di = index.dimension(s.dim_id);
    const std::size_t li = di.level_index(s.level_id);
    Axis axis{s.dim_id, s.level_id, {}, false};
    for (std::size_t p = 0; p < di.members(li).size(); ++p) {
      bool keep = true;
      for (const auto &rp : preds)
        if (rp.dim == &di && !di.related(li, p, rp.level, rp.selected)) keep = false;
      if (keep) axis.members.push_back(di.members(li)[p]);
    }
    cube.axes.push_back(std::move(axis));
    dims.push_back(&di);
    levels.push_back(li);
  }

  const std::string measure(measure_id);
  Coordinate coord(specs.size());
  for (const auto &row : w->facts.rows) {
    bool keep = true;
    for (const auto &rp : preds) {
      auto it = row.members.find(rp.dim->spec().id);
      if (it == row.members.end()) {
        keep = false;
        break;
      }
      std::size_t a = rp.dim->roll_up_finest(it->second, rp.level);
      if (std::find(rp.selected.begin(), rp.selected.end(), a) == rp.selected.end()) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    for (std::size_t k = 0; k < specs.size() && keep; ++k) {
      auto it = row.members.find(specs[k].dim_id);
      std::size_t a = it == row.members.end() ? DimensionIndex::npos : dims[k]->roll_up_finest(it->second, levels[k]);
      if (a == DimensionIndex::npos) keep = false;
      else coord[k] = dims[k]->members(levels[k])[a];
    }
    auto mv = row.measures.find(measure);
    if (!keep || mv == row.measures.end()) continue;
    cube.cells[coord].add(mv->second);
  }
  for (auto &[c, v] : cube.cells) v.finish(aggregate);
  return cube;
}

} // namespace

Cube build_cube(std::shared_ptr<const Warehouse> warehouse, const std::vector<AxisSpec> &axes,
                std::string_view measure_id, Aggregate aggregate) {
  return build_with_predicates(std::move(warehouse), axes, measure_id, aggregate, {});
}

Cube roll_up(const Cube &cube, std::string_view dim_id, std::string_view target_level) {
  require_plain(cube, "roll-up");
  const std::size_t ai = require_axis(cube, dim_id);
  const Axis &axis = cube.axes[ai];
  if (axis.synthetic) throw Error("synthetic-axis", "cannot roll up pulled axis '" + axis.dim_id + "'");
  if (!cube.source) throw Error("no-provenance", "roll-up needs the cube's source warehouse");
  const WarehouseIndex index(*cube.source);
  const DimensionIndex &di = index.dimension(dim_id);
  const std::size_t from = di.level_index(axis.level_id);
  const std::size_t to = di.level_index(target_level);
  if (to <= from)
    throw Error("target-not-coarser", "level '" + std::string(target_level) + "' is not coarser than '" +
                                          axis.level_id + "' in dimension '" + std::string(dim_id) + "'");

  std::unordered_map<std::string, std::string> parent;
  std::vector<bool> used(di.members(to).size(), false);
  for (const auto &m : axis.members) {
    std::size_t a = di.ancestor(from, di.position(from, m), to);
    if (a == DimensionIndex::npos)
      throw Error("broken-hierarchy", "member '" + m + "' has no ancestor at level '" + std::string(target_level) + "'");
    parent.emplace(m, di.members(to)[a]);
    used[a] = true;
  }

  Cube out = cube;
  out.cells.clear();
  out.axes[ai].level_id = std::string(target_level);
  out.axes[ai].members.clear();
  for (std::size_t p = 0; p < used.size(); ++p)
    if (used[p]) out.axes[ai].members.push_back(di.members(to)[p]);
  for (const auto &[coord, value] : cube.cells) {
    Coordinate c = coord;
    c[ai] = parent.at(coord[ai]);
    out.cells[c].merge(value);
  }
  for (auto &[c, v] : out.cells) v.finish(out.aggregate);
  return out;
}

Cube drill_down(const Cube &cube, std::string_view dim_id, std::string_view target_level) {
  require_plain(cube, "drill-down");
  const std::size_t ai = require_axis(cube, dim_id);
  require_provenance(cube, "drill-down");
  const WarehouseIndex index(*cube.source);
  const DimensionIndex &di = index.dimension(dim_id);
  const std::size_t from = di.level_index(cube.axes[ai].level_id);
  const std::size_t to = di.level_index(target_level);
  if (to >= from)
    throw Error("target-not-finer", "level '" + std::string(target_level) + "' is not finer than '" +
                                        cube.axes[ai].level_id + "' in dimension '" + std::string(dim_id) + "'");
  std::vector<AxisSpec> specs;
  for (const auto &a : cube.axes) specs.push_back({a.dim_id, a.level_id});
  specs[ai].level_id = std::string(target_level);
  Cube out = build_with_predicates(cube.source, specs, cube.measure_id, cube.aggregate, cube.predicates);
  for (std::size_t k = 0; k < cube.axes.size(); ++k)
    if (k != ai) out.axes[k].members = cube.axes[k].members;
  return out;
}

Cube slice(const Cube &cube, std::string_view dim_id, std::string_view member) {
  const std::size_t ai = require_axis(cube, dim_id);
  const Axis &axis = cube.axes[ai];
  if (std::find(axis.members.begin(), axis.members.end(), member) == axis.members.end())
    throw Error("unknown-member", "axis '" + axis.dim_id + "' has no member '" + std::string(member) + "'");
  Cube out = cube;
  out.axes.erase(out.axes.begin() + static_cast<std::ptrdiff_t>(ai));
  out.cells.clear();
  out.content.clear();
  for (const auto &[coord, value] : cube.cells)
    if (coord[ai] == member) out.cells.emplace(erase_at(coord, ai), value);
  for (const auto &[coord, items] : cube.content)
    if (coord[ai] == member) out.content.emplace(erase_at(coord, ai), items);
  if (out.pushed && out.pushed->position > ai) --out.pushed->position;
  if (!axis.synthetic) out.predicates.push_back({axis.dim_id, axis.level_id, {std::string(member)}});
  return out;
}

Cube dice(const Cube &cube, const std::map<std::string, std::vector<std::string>> &selection) {
  Cube out = cube;
  std::vector<std::pair<std::size_t, std::set<std::string>>> keep;
  for (const auto &[dim, members] : selection) {
    const std::size_t ai = require_axis(cube, dim);
    if (members.empty()) throw Error("empty-selection", "dice selection for '" + dim + "' is empty");
    const Axis &axis = cube.axes[ai];
    std::set<std::string> chosen;
    for (const auto &m : members) {
      if (std::find(axis.members.begin(), axis.members.end(), m) == axis.members.end())
        throw Error("unknown-member", "axis '" + dim + "' has no member '" + m + "'");
      chosen.insert(m);
    }
    std::vector<std::string> order;
    for (const auto &m : axis.members)
      if (chosen.count(m)) order.push_back(m);
    out.axes[ai].members = std::move(order);
    if (!axis.synthetic) out.predicates.push_back({dim, axis.level_id, {chosen.begin(), chosen.end()}});
    keep.emplace_back(ai, std::move(chosen));
  }
  auto inside = [&](const Coordinate &c) {
    return std::all_of(keep.begin(), keep.end(), [&](const auto &k) { return k.second.count(c[k.first]) > 0; });
  };
  std::erase_if(out.cells, [&](const auto &kv) { return !inside(kv.first); });
  std::erase_if(out.content, [&](const auto &kv) { return !inside(kv.first); });
  return out;
}

Cube rotate(const Cube &cube, const std::vector<std::size_t> &perm) {
  const std::size_t n = cube.axes.size();
  std::vector<bool> hit(n, false);
  bool ok = perm.size() == n;
  for (std::size_t p : perm) {
    if (!ok || p >= n || hit[p]) {
      ok = false;
      break;
    }
    hit[p] = true;
  }
  if (!ok) throw Error("not-a-permutation", "rotate expects a permutation of the " + std::to_string(n) + " axis indices");
  auto permute = [&](const Coordinate &c) {
    Coordinate out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c[perm[i]];
    return out;
  };
  Cube out = cube;
  out.cells.clear();
  out.content.clear();
  for (std::size_t i = 0; i < n; ++i) out.axes[i] = cube.axes[perm[i]];
  for (const auto &[coord, value] : cube.cells) out.cells.emplace(permute(coord), value);
  for (const auto &[coord, items] : cube.content) out.content.emplace(permute(coord), items);
  return out;
}

Cube switch_members(const Cube &cube, std::string_view dim_id, const std::vector<std::string> &order) {
  const std::size_t ai = require_axis(cube, dim_id);
  std::vector<std::string> a = cube.axes[ai].members, b = order;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b)
    throw Error("not-a-permutation", "new member order is not a permutation of axis '" + std::string(dim_id) + "'");
  Cube out = cube;
  out.axes[ai].members = order;
  return out;
}

Cube push(const Cube &cube, std::string_view dim_id) {
  if (cube.pushed) throw Error("already-pushed", "cube already carries pushed content; pull it first");
  const std::size_t ai = require_axis(cube, dim_id);
  Cube out = cube;
  out.pushed = PushedAxis{ai, cube.axes[ai]};
  out.axes.erase(out.axes.begin() + static_cast<std::ptrdiff_t>(ai));
  out.cells.clear();
  out.content.clear();
  std::unordered_map<std::string, std::size_t> rank;
  for (std::size_t m = 0; m < cube.axes[ai].members.size(); ++m) rank.emplace(cube.axes[ai].members[m], m);
  std::vector<std::pair<std::size_t, const std::pair<const Coordinate, CellValue> *>> ordered;
  for (const auto &kv : cube.cells) ordered.emplace_back(rank.at(kv.first[ai]), &kv);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
  for (const auto &[r, kv] : ordered) {
    Coordinate c = erase_at(kv->first, ai);
    out.content[c].push_back({kv->first[ai], kv->second});
    out.cells[c].merge(kv->second);
  }
  for (auto &[c, v] : out.cells) v.finish(out.aggregate);
  return out;
}

Cube pull(const Cube &cube) {
  if (!cube.pushed) throw Error("nothing-to-pull", "cube carries no pushed content and no labeling was given");
  const PushedAxis &pa = *cube.pushed;
  Cube out = cube;
  out.pushed.reset();
  out.content.clear();
  out.cells.clear();
  out.axes.insert(out.axes.begin() + static_cast<std::ptrdiff_t>(pa.position), pa.axis);
  for (const auto &[coord, items] : cube.content) {
    for (const auto &item : items) {
      Coordinate c = coord;
      c.insert(c.begin() + static_cast<std::ptrdiff_t>(pa.position), item.label);
      if (!out.cells.emplace(c, item.value).second)
        throw Error("labels-not-unique", "label '" + item.label + "' occurs twice in one coordinate");
    }
  }
  return out;
}

Cube pull(const Cube &cube, std::string_view dim_id, const Labeling &labeling) {
  if (!labeling) return pull(cube);
  if (cube.axis_index(dim_id) || (cube.pushed && cube.pushed->axis.dim_id == dim_id))
    throw Error("duplicate-axis", "an axis named '" + std::string(dim_id) + "' already exists");
  Cube out = cube;
  out.pushed.reset();
  out.content.clear();
  out.cells.clear();
  std::set<std::string> labels;
  auto place = [&](const Coordinate &coord, const CellValue &v) {
    std::string label = labeling(v);
    Coordinate c = coord;
    c.push_back(label);
    if (!out.cells.emplace(std::move(c), v).second)
      throw Error("labels-not-unique",
                  "label '" + label + "' is produced twice for one coordinate; add an axis to disambiguate");
    labels.insert(std::move(label));
  };
  if (cube.pushed) {
    for (const auto &[coord, items] : cube.content)
      for (const auto &item : items) place(coord, item.value);
  } else {
    for (const auto &[coord, v] : cube.cells) place(coord, v);
  }
  out.axes.push_back(Axis{std::string(dim_id), std::string(dim_id), {labels.begin(), labels.end()}, true});
  return out;
}

std::string export_cube_text(const Cube &cube) {
  std::string out = "# axes:";
  for (const auto &a : cube.axes) out += " " + a.dim_id + "/" + a.level_id;
  out += "; measure: " + cube.measure_id + "; aggregate: " + std::string(to_string(cube.aggregate));
  if (cube.pushed) out += "; pushed: " + cube.pushed->axis.dim_id;
  out += '\n';
  for (const auto &[coord, v] : cube.ordered_cells()) {
    for (const auto &id : *coord) out += id + '\t';
    out += format_number(v->sum) + '\t' + std::to_string(v->count) + '\t' + format_number(v->min) + '\t' +
           format_number(v->max) + '\t' + format_number(v->value);
    if (auto it = cube.content.find(*coord); it != cube.content.end()) {
      out += '\t';
      bool first = true;
      for (const auto &item : it->second) {
        if (!first) out += ',';
        first = false;
        out += item.label + ':' + format_number(item.value.value);
      }
    }
    out += '\n';
  }
  return out;
}

} // namespace xdw

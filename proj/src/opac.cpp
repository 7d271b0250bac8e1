#include "xdw/opac.hpp"

#include "xdw/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace xdw {

FeatureSet extract_member_vectors(const Cube &cube, std::string_view dim_id) {
  auto axis_pos = cube.axis_index(dim_id);
  if (!axis_pos) throw Error("not-an-axis", "dimension '" + std::string(dim_id) + "' is not an axis of the cube");
  const Axis &axis = cube.axes[*axis_pos];

  FeatureSet out;
  // Row-major enumeration of the other axes.
  std::vector<const Axis *> others;
  for (std::size_t a = 0; a < cube.axes.size(); ++a)
    if (a != *axis_pos) others.push_back(&cube.axes[a]);
  std::vector<std::size_t> idx(others.size(), 0);
  bool empty_axis = std::any_of(others.begin(), others.end(), [](const Axis *a) { return a->members.empty(); });
  while (!empty_axis) {
    Coordinate c;
    for (std::size_t i = 0; i < others.size(); ++i) c.push_back(others[i]->members[idx[i]]);
    out.columns.push_back(std::move(c));
    std::size_t i = others.size();
    while (i > 0 && ++idx[i - 1] == others[i - 1]->members.size()) idx[--i] = 0;
    if (i == 0) break;
  }

  const LevelInstances *level = nullptr;
  if (cube.source && !axis.synthetic)
    if (const auto *data = cube.source->find_dimension_data(axis.dim_id)) level = data->find_level(axis.level_id);

  for (const auto &m : axis.members) {
    MemberVector v{m, {}, {}};
    v.features.reserve(out.columns.size());
    for (const auto &col : out.columns) {
      Coordinate c = col;
      c.insert(c.begin() + static_cast<std::ptrdiff_t>(*axis_pos), m);
      const CellValue *cell = cube.cell(c);
      v.features.push_back(cell ? cell->value : 0.0);
    }
    if (level)
      if (const Instance *inst = level->find(m)) v.descriptors = inst->attributes;
    out.vectors.push_back(std::move(v));
  }
  return out;
}

void normalize_min_max(std::vector<MemberVector> &vectors) {
  if (vectors.empty()) return;
  const std::size_t dims = vectors[0].features.size();
  for (std::size_t j = 0; j < dims; ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &v : vectors) {
      lo = std::min(lo, v.features[j]);
      hi = std::max(hi, v.features[j]);
    }
    for (auto &v : vectors) v.features[j] = hi > lo ? (v.features[j] - lo) / (hi - lo) : 0.0;
  }
}

void append_descriptor_columns(std::vector<MemberVector> &vectors, double weight) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto &v : vectors)
    for (const auto &kv : v.descriptors) pairs.insert(kv);
  for (auto &v : vectors)
    for (const auto &[attr, value] : pairs) {
      auto it = v.descriptors.find(attr);
      v.features.push_back(it != v.descriptors.end() && it->second == value ? weight : 0.0);
    }
}

std::string_view to_string(Linkage l) {
  switch (l) {
  case Linkage::Single: return "single";
  case Linkage::Complete: return "complete";
  case Linkage::Average: return "average";
  case Linkage::Ward: return "ward";
  }
  return "?";
}

Linkage parse_linkage(std::string_view s) {
  for (auto l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward})
    if (to_string(l) == s) return l;
  throw Error("bad-linkage", "unknown linkage '" + std::string(s) + "' (single, complete, average, ward)");
}

std::vector<std::size_t> Dendrogram::members(std::size_t id) const {
  const std::size_t n = leaves.size();
  std::vector<std::size_t> out, stack{id};
  while (!stack.empty()) {
    std::size_t c = stack.back();
    stack.pop_back();
    if (c < n) {
      out.push_back(c);
    } else {
      stack.push_back(merges.at(c - n).a);
      stack.push_back(merges.at(c - n).b);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double euclid(const std::vector<double> &x, const std::vector<double> &y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

} // namespace

Dendrogram ahc_cluster(const std::vector<MemberVector> &vectors, Linkage linkage) {
  const std::size_t n = vectors.size();
  if (n < 2) throw Error("too-few-members", "clustering needs at least 2 members, got " + std::to_string(n));
  for (const auto &v : vectors)
    if (v.features.size() != vectors[0].features.size())
      throw Error("feature-length-mismatch", "member '" + v.member_id + "' has a different feature count");

  Dendrogram d;
  for (const auto &v : vectors) d.leaves.push_back(v.member_id);

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i][j] = dist[j][i] = euclid(vectors[i].features, vectors[j].features);
      scale = std::max(scale, dist[i][j]);
    }

  // Slot i holds one active cluster; the merged cluster reuses the lower slot.
  std::vector<std::size_t> id(n), size(n, 1);
  std::vector<std::string> key(n);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    id[i] = i;
    key[i] = vectors[i].member_id;
  }

  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (active[i])
        for (std::size_t j = i + 1; j < n; ++j)
          if (active[j]) best = std::min(best, dist[i][j]);
    const double tol = 1e-12 * std::max(best, scale);
    std::size_t bi = n, bj = n;
    std::pair<std::string, std::string> best_key;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j] || dist[i][j] > best + tol) continue;
        auto k = std::minmax(key[i], key[j]);
        std::pair<std::string, std::string> pk{k.first, k.second};
        if (bi == n || pk < best_key) {
          bi = i;
          bj = j;
          best_key = std::move(pk);
        }
      }
    }

    const double h = dist[bi][bj];
    const double na = static_cast<double>(size[bi]), nb = static_cast<double>(size[bj]);
    d.merges.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), h, size[bi] + size[bj]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double da = dist[bi][k], db = dist[bj][k], nk = static_cast<double>(size[k]);
      double nd = 0;
      switch (linkage) {
      case Linkage::Single: nd = std::min(da, db); break;
      case Linkage::Complete: nd = std::max(da, db); break;
      case Linkage::Average: nd = (na * da + nb * db) / (na + nb); break;
      case Linkage::Ward:
        nd = std::sqrt(std::max(0.0, ((na + nk) * da * da + (nb + nk) * db * db - nk * h * h) / (na + nb + nk)));
        break;
      }
      dist[bi][k] = dist[k][bi] = nd;
    }
    active[bj] = false;
    id[bi] = n + step;
    size[bi] += size[bj];
    key[bi] = std::min(key[bi], key[bj]);
  }
  return d;
}

Partition cut_partition(const Dendrogram &d, std::size_t k) {
  const std::size_t n = d.leaves.size();
  if (k < 1 || k > n)
    throw Error("k-out-of-range", "k must be between 1 and " + std::to_string(n) + ", got " + std::to_string(k));
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) roots.insert(i);
  for (std::size_t m = 0; m < n - k; ++m) {
    roots.erase(d.merges[m].a);
    roots.erase(d.merges[m].b);
    roots.insert(n + m);
  }
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t r : roots) groups.push_back(d.members(r));
  std::sort(groups.begin(), groups.end());
  Partition p;
  for (const auto &g : groups) {
    std::vector<std::string> names;
    for (std::size_t leaf : g) names.push_back(d.leaves[leaf]);
    p.clusters.push_back(std::move(names));
  }
  return p;
}

PartitionQuality partition_quality(const Partition &p, const std::vector<MemberVector> &vectors) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vectors.size(); ++i) index.emplace(vectors[i].member_id, i);
  std::vector<bool> seen(vectors.size(), false);
  std::size_t covered = 0;
  for (const auto &c : p.clusters)
    for (const auto &m : c) {
      auto it = index.find(m);
      if (it == index.end() || seen[it->second])
        throw Error("partition-mismatch", "member '" + m + "' is unknown or appears twice in the partition");
      seen[it->second] = true;
      ++covered;
    }
  if (covered != vectors.size()) throw Error("partition-mismatch", "partition does not cover every member");

  PartitionQuality q;
  q.k = p.k();
  if (vectors.empty()) return q;
  const std::size_t dims = vectors[0].features.size();
  auto centroid = [&](const std::vector<std::size_t> &rows) {
    std::vector<double> c(dims, 0.0);
    for (std::size_t r : rows)
      for (std::size_t j = 0; j < dims; ++j) c[j] += vectors[r].features[j];
    for (auto &x : c) x /= static_cast<double>(rows.size());
    return c;
  };
  auto sq = [](const std::vector<double> &x, const std::vector<double> &y) {
    double s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
    return s;
  };
  std::vector<std::size_t> all(vectors.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto g = centroid(all);
  for (std::size_t r : all) q.total += sq(vectors[r].features, g);
  for (const auto &c : p.clusters) {
    if (c.empty()) continue;
    std::vector<std::size_t> rows;
    for (const auto &m : c) rows.push_back(index.at(m));
    const auto ck = centroid(rows);
    for (std::size_t r : rows) q.within += sq(vectors[r].features, ck);
    q.between += static_cast<double>(rows.size()) * sq(ck, g);
  }
  q.ratio = q.total > 0 ? q.between / q.total : 0.0;
  return q;
}

std::vector<PartitionQuality> quality_table(const Dendrogram &d, const std::vector<MemberVector> &vectors) {
  std::vector<PartitionQuality> out;
  for (std::size_t k = 1; k <= d.leaves.size(); ++k) out.push_back(partition_quality(cut_partition(d, k), vectors));
  return out;
}

RuleSet partition_to_rules(const Partition &p, const Cube &cube, std::string_view dim_id,
                           std::string_view target_level, const std::vector<std::string> &cluster_names,
                           std::string_view target_attribute) {
  auto axis_pos = cube.axis_index(dim_id);
  if (!axis_pos) throw Error("not-an-axis", "dimension '" + std::string(dim_id) + "' is not an axis of the cube");
  const Axis &axis = cube.axes[*axis_pos];
  if (axis.synthetic) throw Error("synthetic-axis", "axis '" + axis.dim_id + "' was pulled from cell content");
  if (!cube.source) throw Error("no-provenance", "the cube has no source warehouse");
  const DimensionSpec *spec = cube.source->model.find_dimension(dim_id);
  const DimensionData *data = cube.source->find_dimension_data(dim_id);
  const LevelInstances *level = data ? data->find_level(axis.level_id) : nullptr;
  if (!spec || !level) throw Error("no-provenance", "level '" + axis.level_id + "' is missing from the source warehouse");

  const std::set<std::string> axis_members(axis.members.begin(), axis.members.end());
  std::set<std::string> in_partition;
  for (const auto &c : p.clusters)
    for (const auto &m : c)
      if (!axis_members.count(m) || !in_partition.insert(m).second)
        throw Error("partition-mismatch", "member '" + m + "' is not on the axis or appears twice");
  if (in_partition.size() != axis_members.size())
    throw Error("partition-mismatch", "partition does not cover every member of axis '" + axis.dim_id + "'");
  if (cluster_names.size() != p.k())
    throw Error("partition-mismatch", std::to_string(cluster_names.size()) + " names for " + std::to_string(p.k()) +
                                          " clusters");

  // Identifying attribute: present on every instance with distinct values.
  std::string id_attr(kInstanceIdAttribute);
  const LevelSpec &level_spec = spec->levels[*spec->level_index(axis.level_id)];
  for (const auto &a : level_spec.attributes) {
    std::set<std::string> values;
    bool ok = true;
    for (const auto &inst : level->instances) {
      auto it = inst.attributes.find(a.name);
      if (it == inst.attributes.end() || !values.insert(it->second).second) {
        ok = false;
        break;
      }
    }
    if (ok) {
      id_attr = a.name;
      break;
    }
  }

  RuleSet rules;
  rules.dim_id = std::string(dim_id);
  rules.structure = {axis.level_id, {id_attr}, std::string(target_level), {std::string(target_attribute)}};
  std::set<std::string> names, ids;
  for (std::size_t c = 0; c < p.k(); ++c) {
    DataRule rule;
    rule.target[std::string(target_attribute)] = cluster_names[c];
    if (!names.insert(cluster_names[c]).second || !ids.insert(target_instance_id(rule)).second)
      throw Error("name-collision", "cluster name '" + cluster_names[c] + "' is used twice");
    Clause clause{id_attr, Clause::Op::In, {}};
    for (const auto &m : p.clusters[c]) {
      const Instance *inst = level->find(m);
      clause.values.push_back(id_attr == kInstanceIdAttribute ? m : inst->attributes.at(id_attr));
    }
    rule.condition.clauses.push_back(std::move(clause));
    rules.data.push_back(std::move(rule));
  }
  return rules;
}

} // namespace xdw

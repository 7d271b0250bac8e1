#include "xdw/assoc.hpp"

#include "xdw/error.hpp"
#include "xdw/exact_sum.hpp"
#include "xdw/hierarchy.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace xdw {

void validate_meta_rule(const MetaRule &meta, const Warehouse &w) {
  if (meta.antecedent.empty() || meta.consequent.empty())
    throw Error("empty-slots", "a meta-rule needs at least one antecedent and one consequent slot");
  if (meta.aggregate != Aggregate::Sum && meta.aggregate != Aggregate::Count)
    throw Error("bad-aggregate", "support aggregate must be SUM or COUNT, got " + std::string(to_string(meta.aggregate)));
  if (!w.model.facts.find_measure(meta.measure_id))
    throw Error("unknown-measure", "unknown measure '" + meta.measure_id + "'");
  std::set<std::string> dims;
  for (const auto *side : {&meta.antecedent, &meta.consequent})
    for (const auto &slot : *side) {
      const DimensionSpec *d = w.model.find_dimension(slot.dim_id);
      if (!d) throw Error("unknown-dimension", "unknown dimension '" + slot.dim_id + "'");
      if (!d->level_index(slot.level_id))
        throw Error("unknown-level", "dimension '" + slot.dim_id + "' has no level '" + slot.level_id + "'");
      if (!dims.insert(slot.dim_id).second)
        throw Error("intra-dimensional", "dimension '" + slot.dim_id + "' appears in more than one slot");
    }
}

namespace {

// Internal itemset: (slot, member position) pairs with increasing slot.
using Key = std::vector<std::pair<std::size_t, std::size_t>>;

struct Context {
  std::vector<std::vector<std::size_t>> members; // per fact, member position per slot
  std::vector<double> weights;
  ExactSum total;
};

Context gather(const Warehouse &w, const MetaRule &meta, const std::vector<AxisSpec> &slots) {
  const WarehouseIndex index(w);
  struct Resolved {
    const DimensionIndex *dim;
    std::size_t level;
    std::vector<std::size_t> selected;
  };
  std::vector<Resolved> preds;
  for (const auto &p : meta.context) {
    const DimensionIndex &di = index.dimension(p.dim_id);
    Resolved r{&di, di.level_index(p.level_id), {}};
    for (const auto &m : p.members) {
      const std::size_t pos = di.position(r.level, m);
      if (pos == DimensionIndex::npos)
        throw Error("unknown-member", "level '" + p.level_id + "' has no member '" + m + "'");
      r.selected.push_back(pos);
    }
    preds.push_back(std::move(r));
  }
  std::vector<const DimensionIndex *> dims;
  std::vector<std::size_t> levels;
  for (const auto &s : slots) {
    dims.push_back(&index.dimension(s.dim_id));
    levels.push_back(dims.back()->level_index(s.level_id));
  }

  Context ctx;
  for (std::size_t r = 0; r < w.facts.rows.size(); ++r) {
    const FactRow &row = w.facts.rows[r];
    auto mv = row.measures.find(meta.measure_id);
    if (mv == row.measures.end()) continue;
    bool keep = true;
    for (const auto &p : preds) {
      auto it = row.members.find(p.dim->spec().id);
      const std::size_t a = it == row.members.end() ? DimensionIndex::npos : p.dim->roll_up_finest(it->second, p.level);
      if (std::find(p.selected.begin(), p.selected.end(), a) == p.selected.end()) keep = false;
    }
    if (!keep) continue;
    std::vector<std::size_t> pos;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto it = row.members.find(slots[s].dim_id);
      const std::size_t a = it == row.members.end() ? DimensionIndex::npos : dims[s]->roll_up_finest(it->second, levels[s]);
      if (a == DimensionIndex::npos)
        throw Error("broken-hierarchy", "fact " + std::to_string(r + 1) + " does not reach level '" + slots[s].level_id + "'");
      pos.push_back(a);
    }
    const double weight = meta.aggregate == Aggregate::Count ? 1.0 : mv->second;
    if (weight < 0)
      throw Error("negative-measure", "SUM support needs nonnegative measures; fact " + std::to_string(r + 1) + " has " +
                                          format_number(mv->second));
    ctx.members.push_back(std::move(pos));
    ctx.weights.push_back(weight);
    ctx.total.add(weight);
  }
  return ctx;
}

} // namespace

FrequentResult mine_frequent(const Warehouse &w, const MetaRule &meta, double min_support) {
  validate_meta_rule(meta, w);
  if (!(min_support > 0 && min_support <= 1))
    throw Error("bad-support", "minimum support must be in (0, 1], got " + format_number(min_support));

  std::vector<AxisSpec> slots = meta.antecedent;
  slots.insert(slots.end(), meta.consequent.begin(), meta.consequent.end());
  const Context ctx = gather(w, meta, slots);
  const double total = ctx.total.value();
  if (ctx.members.empty() || total <= 0)
    throw Error("empty-context", "the meta-rule context holds no facts with a positive " +
                                     std::string(to_string(meta.aggregate)) + " of '" + meta.measure_id + "'");

  const WarehouseIndex index(w);
  auto to_items = [&](const Key &k) {
    Itemset out;
    for (auto [s, p] : k) {
      const DimensionIndex &di = index.dimension(slots[s].dim_id);
      out.push_back({slots[s].dim_id, slots[s].level_id, di.members(di.level_index(slots[s].level_id))[p]});
    }
    return out;
  };
  auto weigh = [&](const std::vector<Key> &candidates) {
    std::vector<ExactSum> sums(candidates.size());
    for (std::size_t f = 0; f < ctx.members.size(); ++f)
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        bool match = true;
        for (auto [s, p] : candidates[c])
          if (ctx.members[f][s] != p) {
            match = false;
            break;
          }
        if (match) sums[c].add(ctx.weights[f]);
      }
    std::vector<double> out;
    for (const auto &s : sums) out.push_back(s.value());
    return out;
  };

  FrequentResult result;
  result.total = total;
  result.context_facts = ctx.members.size();

  // Level 1: every occupied member of every slot.
  std::vector<Key> level;
  {
    std::set<Key> seen;
    for (const auto &m : ctx.members)
      for (std::size_t s = 0; s < slots.size(); ++s) seen.insert({{s, m[s]}});
    level.assign(seen.begin(), seen.end());
  }
  std::set<Key> frequent_keys;
  while (!level.empty()) {
    const auto weights = weigh(level);
    std::vector<Key> kept;
    for (std::size_t c = 0; c < level.size(); ++c) {
      const double support = weights[c] / total;
      if (support < min_support) continue;
      result.itemsets.push_back({to_items(level[c]), weights[c], support});
      frequent_keys.insert(level[c]);
      kept.push_back(level[c]);
    }
    // Join sets agreeing on all but the last item, with the last items in
    // increasing slots, then prune by the k-subsets.
    std::vector<Key> next;
    for (std::size_t a = 0; a < kept.size(); ++a)
      for (std::size_t b = a + 1; b < kept.size(); ++b) {
        const Key &x = kept[a], &y = kept[b];
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) continue;
        if (x.back().first >= y.back().first) continue;
        Key cand = x;
        cand.push_back(y.back());
        bool pruned = false;
        for (std::size_t drop = 0; drop + 2 < cand.size() && !pruned; ++drop) {
          Key sub = cand;
          sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
          if (!frequent_keys.count(sub)) pruned = true;
        }
        if (!pruned) next.push_back(std::move(cand));
      }
    std::sort(next.begin(), next.end());
    level = std::move(next);
  }
  return result;
}

std::vector<AssociationRule> derive_rules(const FrequentResult &frequent, const MetaRule &meta, double min_confidence) {
  auto in_slots = [](const std::vector<AxisSpec> &slots, const Item &i) {
    return std::any_of(slots.begin(), slots.end(),
                       [&](const AxisSpec &s) { return s.dim_id == i.dim_id && s.level_id == i.level_id; });
  };
  std::map<Itemset, const FrequentItemset *> by_items;
  for (const auto &f : frequent.itemsets) by_items.emplace(f.items, &f);

  std::vector<AssociationRule> out;
  for (const auto &z : frequent.itemsets) {
    Itemset x, y;
    for (const auto &i : z.items) (in_slots(meta.antecedent, i) ? x : y).push_back(i);
    if (x.empty() || y.empty()) continue;
    auto fx = by_items.find(x), fy = by_items.find(y);
    if (fx == by_items.end() || fy == by_items.end())
      throw Error("not-anti-monotone", "subset of a frequent itemset is missing; frequent sets from another meta-rule?");
    AssociationRule r;
    r.antecedent = x;
    r.consequent = y;
    r.support = z.support;
    r.confidence = z.support / fx->second->support;
    if (r.confidence < min_confidence) continue;
    const double sy = fy->second->support;
    r.lift = r.confidence / sy;
    if (fy->second->weight != frequent.total) r.loevinger = (r.confidence - sy) / (1 - sy);
    out.push_back(std::move(r));
  }
  return out;
}

std::string to_string(const Itemset &items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out += (i ? ", " : "") + items[i].dim_id + "/" + items[i].level_id + "=" + items[i].member;
  return out;
}

std::string export_rules(std::vector<AssociationRule> rules, RuleFormat format) {
  std::stable_sort(rules.begin(), rules.end(), [](const AssociationRule &a, const AssociationRule &b) {
    if (a.loevinger.has_value() != b.loevinger.has_value()) return a.loevinger.has_value();
    if (a.loevinger && *a.loevinger != *b.loevinger) return *a.loevinger > *b.loevinger;
    if (a.lift != b.lift) return a.lift > b.lift;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });
  if (format == RuleFormat::Json) {
    auto items = [](const Itemset &s) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto &i : s) arr.push_back({{"dim", i.dim_id}, {"level", i.level_id}, {"member", i.member}});
      return arr;
    };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &r : rules)
      arr.push_back({{"antecedent", items(r.antecedent)},
                     {"consequent", items(r.consequent)},
                     {"support", r.support},
                     {"confidence", r.confidence},
                     {"lift", r.lift},
                     {"loevinger", r.loevinger ? nlohmann::json(*r.loevinger) : nlohmann::json(nullptr)}});
    return arr.dump(2) + "\n";
  }
  std::string out = "antecedent\tconsequent\tsupport\tconfidence\tlift\tloevinger\n";
  for (const auto &r : rules)
    out += to_string(r.antecedent) + "\t" + to_string(r.consequent) + "\t" + format_number(r.support) + "\t" +
           format_number(r.confidence) + "\t" + format_number(r.lift) + "\t" +
           (r.loevinger ? format_number(*r.loevinger) : std::string("-")) + "\n";
  return out;
}

} // namespace xdw

// Acceptance suite: one PASS/FAIL line per headline criterion. Exit status is
// the number of failures, so ctest fails when any line is FAIL.

#include "oracles/ahc_check.hpp"
#include "oracles/assoc_check.hpp"
#include "oracles/cube_oracle.hpp"
#include "oracles/mca_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_indicator.hpp"
#include "support/random_rules.hpp"
#include "support/random_warehouse.hpp"

#include "xdw/cube.hpp"
#include "xdw/evolution.hpp"
#include "xdw/ingest.hpp"
#include "xdw/mca.hpp"
#include "xdw/opac.hpp"
#include "xdw/service.hpp"
#include "xdw/xml.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace xdw;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure; later checks still run so the detail stays useful.
class Check {
public:
  bool require(bool ok, const std::string &why) {
    if (!ok && first_.empty()) first_ = why;
    return ok;
  }
  void note(const std::string &s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  Outcome done() const { return {first_.empty(), first_.empty() ? notes_ : first_}; }
  bool failed() const { return !first_.empty(); }

private:
  std::string first_, notes_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

bool same_tree(const xml::Element &a, const xml::Element &b) {
  if (a.name != b.name || a.attributes != b.attributes || a.text != b.text || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_tree(a.children[i], b.children[i])) return false;
  return true;
}

// --- criteria ----------------------------------------------------------------

Outcome model_round_trip() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string doc = read_file(test::data_dir() / "clapi" / "dw-model.xml");
  const WarehouseModel model = parse_model(doc);
  const std::string written = serialize_model(model);
  c.require(parse_model(written) == model, "reparsed model differs");
  c.require(same_tree(xml::parse(doc), xml::parse(written)), "element tree differs from the source document");
  c.require(serialize_model(parse_model(written)) == written, "second serialization differs");
  c.require(model.dimensions.size() == 3, "expected 3 dimensions");
  const double s = seconds_since(t0);
  c.require(s < 1.0, "took " + fmt(s) + " s");
  c.note(std::to_string(model.dimensions.size()) + " dimensions, " + fmt(s * 1000) + " ms");
  return c.done();
}

Outcome evolution_golden() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto base = test::clapi_warehouse();
  const RuleSet rules = parse_rules(read_file(test::data_dir() / "clapi_grouped" / "rules.txt"));
  const EvolutionResult out = apply_ruleset(*base, rules);
  const Warehouse expected = *test::grouped_warehouse();
  c.require(out.warehouse.model == expected.model, "model differs from the grouped model");
  c.require(out.warehouse.dimensions[0] == expected.dimensions[0], "time dimension differs from the grouped data");
  for (std::size_t d = 1; d < base->dimensions.size(); ++d)
    c.require(out.warehouse.dimensions[d] == base->dimensions[d], "untouched dimension changed");
  c.require(out.warehouse.facts == base->facts, "facts changed");
  c.require(validate_warehouse(out.warehouse).findings.empty(), "evolved warehouse has findings");

  // Links, spelled out.
  const auto &coarse = out.warehouse.dimensions[0].levels.at(1).instances;
  const auto &fine = out.warehouse.dimensions[0].levels.at(0).instances;
  c.require(coarse.size() == 2 && coarse[0].id == "extreme" && coarse[1].id == "middle", "new level members");
  c.require(coarse[0].drill_down == std::vector<std::string>{"begin", "end"}, "extreme drill-down");
  c.require(coarse[1].drill_down == std::vector<std::string>{"middle"}, "middle drill-down");
  c.require(fine[0].roll_up == "extreme" && fine[1].roll_up == "middle" && fine[2].roll_up == "extreme", "roll-up links");

  const auto a = serialize_warehouse(out.warehouse);
  const auto b = serialize_warehouse(apply_ruleset(*base, rules).warehouse);
  bool stable = a.size() == b.size();
  for (std::size_t i = 0; stable && i < a.size(); ++i) stable = a[i].file_name == b[i].file_name && a[i].text == b[i].text;
  c.require(stable, "documents differ between runs");
  c.require(serialize_model(out.warehouse.model) == serialize_model(expected.model), "model bytes differ");

  // Rolling up to the new level adds begin and end.
  const auto evolved = std::make_shared<const Warehouse>(out.warehouse);
  const Cube loc = build_cube(evolved, {{"time-d", "location-in-transcription"}}, "frequency", Aggregate::Sum);
  const Cube up = roll_up(loc, "time-d", rules.structure.target_level);
  const double extreme = up.cell({"extreme"}) ? up.cell({"extreme"})->value : -1;
  c.require(extreme == loc.cell({"begin"})->value + loc.cell({"end"})->value, "extreme != begin + end");

  const double s = seconds_since(t0);
  c.require(s < 1.0, "took " + fmt(s) + " s");
  c.note("extreme=" + fmt(extreme) + ", " + fmt(s * 1000) + " ms");
  return c.done();
}

Outcome aggregation_oracle() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t warehouses = 0, cubes = 0;
  for (std::uint64_t seed = 1000; warehouses < 100; ++seed) {
    auto w = std::make_shared<const Warehouse>(test::random_warehouse(seed, {.max_facts = 500}));
    ++warehouses;
    const bool exact = w->model.facts.measures[0].type == MeasureType::Integer;
    for (auto agg : {Aggregate::Sum, Aggregate::Count, Aggregate::Avg, Aggregate::Min, Aggregate::Max}) {
      std::vector<AxisSpec> finest;
      for (const auto &d : w->model.dimensions) finest.push_back({d.id, d.levels[0].id});
      const Cube base = build_cube(w, finest, "m", agg);
      std::string diff = test::cube_mismatch(*w, base, exact);
      c.require(diff.empty(), "seed " + std::to_string(seed) + " build_cube: " + diff);
      ++cubes;
      for (const auto &dim : w->model.dimensions)
        for (std::size_t l = 1; l < dim.levels.size(); ++l) {
          const Cube up = roll_up(base, dim.id, dim.levels[l].id);
          diff = test::cube_mismatch(*w, up, exact);
          c.require(diff.empty(), "seed " + std::to_string(seed) + " roll_up " + dim.levels[l].id + ": " + diff);
          ++cubes;
        }
    }
    if (c.failed()) break;
  }
  const double s = seconds_since(t0);
  c.require(s < 60.0, "took " + fmt(s) + " s");
  c.note(std::to_string(warehouses) + " warehouses, " + std::to_string(cubes) + " cubes, " + fmt(s) + " s");
  return c.done();
}

Outcome conservation() {
  Check c;
  std::size_t cases = 0;
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    const Warehouse w = test::random_warehouse(seed);
    std::string dim, level;
    const RuleSet rules = test::random_rules(w, rng, dim, level);
    if (!c.require(validate_ruleset(rules, w).ok(), "seed " + std::to_string(seed) + ": generated rules invalid")) break;
    auto evolved = std::make_shared<const Warehouse>(apply_ruleset(w, rules).warehouse);
    c.require(validate_warehouse(*evolved).ok(), "seed " + std::to_string(seed) + ": evolved warehouse invalid");
    for (auto agg : {Aggregate::Sum, Aggregate::Count}) {
      const Cube before = build_cube(evolved, {{dim, level}}, "m", agg);
      const Cube after = roll_up(before, dim, rules.structure.target_level);
      c.require(before.total().value == after.total().value,
                "seed " + std::to_string(seed) + ": total " + fmt(before.total().value, 17) + " became " +
                    fmt(after.total().value, 17));
      if (agg == Aggregate::Count)
        c.require(after.total().value == static_cast<double>(w.facts.rows.size()), "count total differs from fact count");
    }
    ++cases;
  }
  c.note(std::to_string(cases) + " random rule sets, SUM and COUNT totals exact");
  return c.done();
}

Outcome ahc_oracle() {
  Check c;
  std::size_t cases = 0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto members = test::random_members(seed);
    c.require(members.size() <= 12, "fixture larger than 12 members");
    for (auto l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
      const std::string diff = test::compare_with_oracle(members, l);
      c.require(diff.empty(), "seed " + std::to_string(seed) + " " + std::string(to_string(l)) + ": " + diff);
      const Dendrogram d = ahc_cluster(members, l);
      for (const auto &q : quality_table(d, members)) worst = std::max(worst, std::abs(q.within + q.between - q.total));
      ++cases;
    }
  }
  c.require(worst <= 1e-9, "Huygens residual " + fmt(worst));
  c.note(std::to_string(cases) + " dendrograms, max Huygens residual " + fmt(worst));
  return c.done();
}

Outcome mca_identities() {
  Check c;
  double worst_sum = 0, worst_center = 0, worst_tv = 0;
  std::size_t cases = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const IndicatorMatrix m = test::random_indicator(seed);
    const FactorialResult r = mca_axes(m);
    std::size_t occupied = 0;
    for (auto f : m.frequency) occupied += f > 0;
    const double q = static_cast<double>(m.variable_count());
    const double sum = std::accumulate(r.eigenvalues.begin(), r.eigenvalues.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(sum - (static_cast<double>(occupied) - q) / q));
    for (std::size_t a = 0; a < r.eigenvalues.size(); ++a) {
      double mean = 0;
      for (const auto &f : r.fact_coordinates) mean += f[a];
      worst_center = std::max(worst_center, std::abs(mean / static_cast<double>(m.rows())));
    }
    const auto tv = test_values(r, m);
    const auto expected = test::oracle_test_values(m.dense(), r.fact_coordinates, r.eigenvalues);
    for (std::size_t j = 0; j < m.columns(); ++j) {
      c.require(tv[j].testable == !expected[j].empty(), "seed " + std::to_string(seed) + ": testability differs");
      for (std::size_t a = 0; a < tv[j].values.size() && a < expected[j].size(); ++a)
        worst_tv = std::max(worst_tv, std::abs(tv[j].values[a] - expected[j][a]) / std::max(1.0, std::abs(expected[j][a])));
    }
    const auto oracle = test::oracle_mca(m.dense(), m.variable_count());
    c.require(oracle.eigenvalues.size() == r.eigenvalues.size(), "seed " + std::to_string(seed) + ": eigenvalue count");
    for (std::size_t a = 0; a < r.eigenvalues.size() && a < oracle.eigenvalues.size(); ++a)
      c.require(std::abs(oracle.eigenvalues[a] - r.eigenvalues[a]) <= 1e-9, "seed " + std::to_string(seed) + ": eigenvalue");
    ++cases;
  }
  c.require(worst_sum <= 1e-9, "eigenvalue sum residual " + fmt(worst_sum));
  c.require(worst_center <= 1e-9, "centering residual " + fmt(worst_center));
  c.require(worst_tv <= 1e-9, "test-value residual " + fmt(worst_tv));
  c.note(std::to_string(cases) + " instances; residuals: sum " + fmt(worst_sum) + ", centering " + fmt(worst_center) +
         ", test-values " + fmt(worst_tv));
  return c.done();
}

Outcome block_arrangement() {
  Check c;
  double min_gain = INFINITY;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto w = std::make_shared<const Warehouse>(generate_fixture("mca-blocks", seed));
    const Cube initial = build_cube(w, {{"transcription-d", "token"}, {"time-d", "location-in-transcription"}},
                                    "frequency", Aggregate::Sum);
    const IndicatorMatrix m = build_indicator_matrix(initial);
    const Cube arranged = arrange_cube(initial, m, test_values(mca_axes(m), m));
    const double before = homogeneity(initial).value, after = homogeneity(arranged).value;
    c.require(after > before, "seed " + std::to_string(seed) + ": " + fmt(after) + " <= " + fmt(before));
    c.require(arranged.cells == initial.cells, "seed " + std::to_string(seed) + ": cell multiset changed");
    min_gain = std::min(min_gain, after - before);
  }
  c.note("30 seeds, smallest homogeneity gain " + fmt(min_gain));
  return c.done();
}

Outcome apriori_oracle() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t fixtures = 0, three_slot = 0, itemsets = 0, rules_seen = 0, classical = 0;

  auto compare = [&](const Warehouse &w, const MetaRule &meta, double minsup, double minconf, const std::string &tag) {
    const FrequentResult mined = mine_frequent(w, meta, minsup);
    std::map<Itemset, double> got;
    for (const auto &f : mined.itemsets) got[f.items] = f.support;
    const auto expected = test::brute_force_frequent(w, meta, minsup);
    c.require(got == expected, tag + ": frequent itemsets differ");
    itemsets += got.size();

    const auto all = test::brute_force_frequent(w, meta, 1e-300);
    for (const auto &[z, s] : all)
      for (std::size_t drop = 0; z.size() > 1 && drop < z.size(); ++drop) {
        Itemset sub = z;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
        c.require(all.at(sub) >= s, tag + ": anti-monotonicity violated");
      }

    const auto rules = derive_rules(mined, meta, minconf);
    const auto expected_rules = test::brute_force_rules(expected, meta, minconf);
    c.require(rules.size() == expected_rules.size(), tag + ": rule count differs");
    for (const auto &r : rules) {
      auto it = expected_rules.find({r.antecedent, r.consequent});
      if (!c.require(it != expected_rules.end(), tag + ": unexpected rule " + to_string(r.antecedent))) continue;
      c.require(r.support == it->second[0] && r.confidence == it->second[1] && r.lift == it->second[2],
                tag + ": rule measures differ");
    }
    rules_seen += rules.size();

    if (meta.aggregate != Aggregate::Count) return;
    const auto facts = test::oracle_facts(w, meta);
    std::vector<AxisSpec> slots = meta.antecedent;
    slots.insert(slots.end(), meta.consequent.begin(), meta.consequent.end());
    std::vector<std::set<std::string>> transactions;
    for (const auto &members : facts.slot_members) {
      std::set<std::string> t;
      for (std::size_t s = 0; s < slots.size(); ++s) t.insert(slots[s].dim_id + "/" + slots[s].level_id + "=" + members[s]);
      transactions.push_back(t);
    }
    std::size_t min_count = 1;
    while (static_cast<double>(min_count) / static_cast<double>(transactions.size()) < minsup) ++min_count;
    std::map<std::set<std::string>, std::size_t> engine;
    for (const auto &f : mined.itemsets) {
      std::set<std::string> key;
      for (const auto &i : f.items) key.insert(i.dim_id + "/" + i.level_id + "=" + i.member);
      engine[key] = static_cast<std::size_t>(f.weight);
    }
    c.require(engine == test::classical_apriori(transactions, min_count), tag + ": COUNT mode differs from classical Apriori");
    ++classical;
  };

  MetaRule demo;
  demo.antecedent = {{"transcription-d", "token"}, {"time-d", "location-in-transcription"}};
  demo.consequent = {{"speaker-d", "sex"}};
  demo.measure_id = "frequency";
  for (std::uint64_t seed : {1u, 2u, 3u})
    for (Aggregate agg : {Aggregate::Count, Aggregate::Sum}) {
      demo.aggregate = agg;
      compare(generate_fixture("rules-demo", seed), demo, 0.2, 0.6, "rules-demo seed " + std::to_string(seed));
      ++fixtures;
      ++three_slot;
    }

  for (std::uint64_t seed = 0; fixtures < 126; ++seed) {
    auto fx = test::random_assoc_fixture(seed);
    if (!fx) continue;
    if (test::oracle_facts(fx->w, fx->meta).total == 0) continue; // empty context: nothing to mine
    c.require(fx->w.facts.rows.size() <= 100, "fixture above 100 facts");
    compare(fx->w, fx->meta, fx->min_support, fx->min_confidence, "seed " + std::to_string(seed));
    ++fixtures;
    three_slot += fx->meta.antecedent.size() + fx->meta.consequent.size() == 3;
    if (c.failed()) break;
  }
  c.require(three_slot >= 30, "too few three-slot fixtures");
  const double s = seconds_since(t0);
  c.require(s < 60.0, "took " + fmt(s) + " s");
  c.note(std::to_string(fixtures) + " fixtures (" + std::to_string(three_slot) + " with 3 slots), " +
         std::to_string(itemsets) + " itemsets, " + std::to_string(rules_seen) + " rules, " + std::to_string(classical) +
         " classical comparisons, " + fmt(s) + " s");
  return c.done();
}

std::map<std::string, std::string> files(const fs::path &dir) {
  std::map<std::string, std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto &e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path());
  return out;
}

Outcome service_atomicity() {
  Check c;
  test::TempDir tmp("acceptance");
  const std::string rules = read_file(test::data_dir() / "clapi_grouped" / "rules.txt");
  auto fresh = [&](const std::string &name) {
    const fs::path dir = tmp.path() / name;
    fs::remove_all(dir);
    fs::remove_all(staging_path(dir));
    fs::copy(test::data_dir() / "clapi", dir, fs::copy_options::recursive);
    return dir;
  };

  // Reference old/new document sets and the hook points of a clean apply.
  const fs::path ref = fresh("ref");
  const auto old_files = files(ref);
  std::vector<std::string> points;
  {
    Service svc(ref);
    svc.set_fault_hook([&](std::string_view p) { points.emplace_back(p); });
    if (!c.require(svc.handle("POST", "/rules/apply", {{"rules", rules}}).status == 200, "reference apply failed"))
      return c.done();
  }
  const auto new_files = files(ref);

  std::size_t ok = 0, as_old = 0, as_new = 0;
  const std::size_t trials = 100;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::string point = points[trial % points.size()];
    const fs::path dir = fresh("wh");
    const pid_t pid = ::fork();
    if (pid == 0) {
      try {
        Service svc(dir);
        svc.set_fault_hook([&](std::string_view p) {
          if (p == point) ::_exit(42);
        });
        svc.handle("POST", "/rules/apply", {{"rules", rules}});
      } catch (...) {
      }
      ::_exit(0);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    const bool crashed = WIFEXITED(status) && WEXITSTATUS(status) == 42;
    const auto got = files(dir);
    bool valid = false;
    try {
      valid = validate_warehouse(load_warehouse(dir)).ok();
    } catch (const Error &) {
    }
    const bool consistent = got == old_files || got == new_files;
    c.require(crashed, "trial " + std::to_string(trial) + ": child did not stop at " + point);
    c.require(consistent && valid, "trial " + std::to_string(trial) + " at " + point + ": mixed or invalid documents");
    if (crashed && consistent && valid) ++ok;
    (got == new_files ? as_new : as_old)++;
  }
  c.note(std::to_string(ok) + "/" + std::to_string(trials) + " trials over " + std::to_string(points.size()) +
         " crash points (" + std::to_string(as_old) + " old, " + std::to_string(as_new) + " new)");
  return c.done();
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"model-round-trip", model_round_trip},       {"evolution-golden", evolution_golden},
      {"aggregation-oracle", aggregation_oracle},   {"conservation-under-evolution", conservation},
      {"ahc-oracle", ahc_oracle},                   {"mca-identities", mca_identities},
      {"block-arrangement", block_arrangement},     {"apriori-oracle", apriori_oracle},
      {"service-atomicity", service_atomicity},
  };
  int failures = 0;
  for (const auto &[name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures;
}

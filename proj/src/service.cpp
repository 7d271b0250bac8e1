#include "xdw/service.hpp"

#include "xdw/assoc.hpp"
#include "xdw/error.hpp"
#include "xdw/mca.hpp"
#include "xdw/opac.hpp"

#include <charconv>

namespace fs = std::filesystem;

namespace xdw {

namespace {

// An error whose envelope carries extra fields (validation findings).
struct DetailedError : Error {
  DetailedError(std::string code, const std::string &message, Json details)
      : Error(std::move(code), message), details(std::move(details)) {}
  Json details;
};

[[noreturn]] void bad_request(const std::string &message, std::string location = {}) {
  throw Error("bad-request", message, std::move(location));
}

const Json &field(const Json &body, const char *key) {
  if (!body.is_object()) bad_request("request body must be a JSON object");
  auto it = body.find(key);
  if (it == body.end()) bad_request(std::string("missing field \"") + key + "\"", key);
  return *it;
}

std::string string_field(const Json &body, const char *key) {
  const Json &v = field(body, key);
  if (!v.is_string()) bad_request(std::string("field \"") + key + "\" must be a string", key);
  return v.get<std::string>();
}

std::string string_or(const Json &body, const char *key, std::string fallback) {
  if (!body.is_object() || !body.contains(key)) return fallback;
  return string_field(body, key);
}

double number_or(const Json &body, const char *key, double fallback) {
  if (!body.is_object() || !body.contains(key)) return fallback;
  const Json &v = body.at(key);
  if (!v.is_number()) bad_request(std::string("field \"") + key + "\" must be a number", key);
  return v.get<double>();
}

bool bool_or(const Json &body, const char *key, bool fallback) {
  if (!body.is_object() || !body.contains(key)) return fallback;
  const Json &v = body.at(key);
  if (!v.is_boolean()) bad_request(std::string("field \"") + key + "\" must be a boolean", key);
  return v.get<bool>();
}

std::vector<std::string> strings(const Json &v, const char *key) {
  if (!v.is_array()) bad_request(std::string("field \"") + key + "\" must be an array of strings", key);
  std::vector<std::string> out;
  for (const auto &s : v) {
    if (!s.is_string()) bad_request(std::string("field \"") + key + "\" must be an array of strings", key);
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<AxisSpec> axis_specs(const Json &v, const char *key) {
  if (!v.is_array()) bad_request(std::string("field \"") + key + "\" must be an array of {dim, level}", key);
  std::vector<AxisSpec> out;
  for (const auto &a : v) out.push_back({string_field(a, "dim"), string_field(a, "level")});
  return out;
}

std::vector<Predicate> predicates(const Json &v) {
  if (!v.is_array()) bad_request("field \"context\" must be an array of {dim, level, members}", "context");
  std::vector<Predicate> out;
  for (const auto &p : v) out.push_back({string_field(p, "dim"), string_field(p, "level"), strings(field(p, "members"), "members")});
  return out;
}

Json findings_json(const ValidationReport &r) {
  Json out = Json::array();
  for (const auto &f : r.findings)
    out.push_back({{"severity", f.severity == Severity::Error ? "error" : "warning"}, {"kind", f.kind}, {"message", f.message}});
  return out;
}

Json cell_json(const CellValue &v) {
  return {{"value", v.value}, {"sum", v.sum}, {"count", v.count}, {"min", v.min}, {"max", v.max}};
}

Json axis_json(const Axis &a) {
  return {{"dim", a.dim_id}, {"level", a.level_id}, {"members", a.members}, {"synthetic", a.synthetic}};
}

Json items_json(const Itemset &items) {
  Json out = Json::array();
  for (const auto &i : items) out.push_back({{"dim", i.dim_id}, {"level", i.level_id}, {"member", i.member}});
  return out;
}

Json dendrogram_node(const Dendrogram &d, std::size_t id) {
  const std::size_t n = d.leaves.size();
  if (id < n) return {{"id", id}, {"member", d.leaves[id]}};
  const Merge &m = d.merges[id - n];
  return {{"id", id},
          {"height", m.height},
          {"size", m.size},
          {"children", Json::array({dendrogram_node(d, m.a), dendrogram_node(d, m.b)})}};
}

Json quality_json(const PartitionQuality &q) {
  return {{"k", q.k}, {"within", q.within}, {"between", q.between}, {"total", q.total}, {"ratio", q.ratio}};
}

std::size_t parse_size(std::string_view text, const char *name) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    bad_request(std::string("query parameter ") + name + " must be a nonnegative integer", name);
  return v;
}

Cube apply_op(const Cube &cube, const Json &body) {
  const std::string op = string_field(body, "op");
  if (op == "roll_up") return roll_up(cube, string_field(body, "dim"), string_field(body, "level"));
  if (op == "drill_down") return drill_down(cube, string_field(body, "dim"), string_field(body, "level"));
  if (op == "slice") return slice(cube, string_field(body, "dim"), string_field(body, "member"));
  if (op == "dice") {
    const Json &sel = field(body, "selection");
    if (!sel.is_object()) bad_request("field \"selection\" must map dimension ids to member lists", "selection");
    std::map<std::string, std::vector<std::string>> selection;
    for (auto it = sel.begin(); it != sel.end(); ++it) selection[it.key()] = strings(it.value(), "selection");
    return dice(cube, selection);
  }
  if (op == "rotate") {
    const Json &perm = field(body, "permutation");
    if (!perm.is_array()) bad_request("field \"permutation\" must be an array of axis positions", "permutation");
    std::vector<std::size_t> p;
    for (const auto &x : perm) {
      if (!x.is_number_integer() || x.get<std::int64_t>() < 0) bad_request("field \"permutation\" must be an array of axis positions", "permutation");
      p.push_back(x.get<std::size_t>());
    }
    return rotate(cube, p);
  }
  if (op == "switch") return switch_members(cube, string_field(body, "dim"), strings(field(body, "order"), "order"));
  if (op == "push") return push(cube, string_field(body, "dim"));
  if (op == "pull") {
    if (!body.contains("dim")) return pull(cube);
    const std::string labeling = string_or(body, "labeling", "value");
    if (labeling != "value") bad_request("unknown labeling '" + labeling + "' (expected value)", "labeling");
    return pull(cube, string_field(body, "dim"), [](const CellValue &v) { return format_number(v.value); });
  }
  throw Error("unknown-op", "unknown operator '" + op +
                                "' (expected roll_up, drill_down, slice, dice, rotate, switch, push or pull)",
              "op");
}

RuleSet rules_from_body(const Json &body) {
  if (body.is_object() && body.contains("rules")) return parse_rules(string_field(body, "rules"));
  if (body.is_object() && body.contains("ruleset")) return ruleset_from_json(body.at("ruleset"));
  bad_request("body needs \"rules\" (text) or \"ruleset\" (structured)");
}

Json summary_entry(const ChangeSummary &s, std::size_t sequence) {
  Json j = summary_to_json(s);
  Json out = {{"sequence", sequence}};
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value();
  return out;
}

} // namespace

// --- JSON forms --------------------------------------------------------------

RuleSet ruleset_from_json(const Json &j) {
  RuleSet r;
  r.dim_id = string_or(j, "dimension", "");
  const Json &s = field(j, "structure");
  r.structure.source_level = string_field(s, "source_level");
  r.structure.condition_attributes = strings(field(s, "condition_attributes"), "condition_attributes");
  r.structure.target_level = string_field(s, "target_level");
  r.structure.target_attributes = strings(field(s, "target_attributes"), "target_attributes");
  const Json &data = field(j, "data");
  if (!data.is_array()) bad_request("field \"data\" must be an array of rules", "data");
  for (const auto &d : data) {
    DataRule rule;
    const Json &cond = field(d, "condition");
    if (!cond.is_array()) bad_request("field \"condition\" must be an array of clauses", "condition");
    for (const auto &c : cond) {
      Clause clause;
      clause.attribute = string_field(c, "attribute");
      const std::string op = string_field(c, "op");
      if (op == "in") clause.op = Clause::Op::In;
      else if (op == "not in") clause.op = Clause::Op::NotIn;
      else if (op == "=") clause.op = Clause::Op::Equals;
      else bad_request("clause op must be \"in\", \"not in\" or \"=\"", "op");
      clause.values = strings(field(c, "values"), "values");
      if (clause.op == Clause::Op::Equals && clause.values.size() != 1)
        bad_request("clause op \"=\" takes exactly one value", "values");
      rule.condition.clauses.push_back(std::move(clause));
    }
    const Json &target = field(d, "target");
    if (!target.is_object()) bad_request("field \"target\" must map attributes to values", "target");
    for (auto it = target.begin(); it != target.end(); ++it) {
      if (!it.value().is_string()) bad_request("target values must be strings", "target");
      rule.target[it.key()] = it.value().get<std::string>();
    }
    r.data.push_back(std::move(rule));
  }
  return r;
}

Json ruleset_to_json(const RuleSet &r) {
  Json data = Json::array();
  for (const auto &d : r.data) {
    Json cond = Json::array();
    for (const auto &c : d.condition.clauses)
      cond.push_back({{"attribute", c.attribute},
                      {"op", c.op == Clause::Op::In ? "in" : c.op == Clause::Op::NotIn ? "not in" : "="},
                      {"values", c.values}});
    Json target = Json::object();
    for (const auto &[k, v] : d.target) target[k] = v;
    data.push_back({{"condition", cond}, {"target", target}});
  }
  return {{"dimension", r.dim_id},
          {"structure",
           {{"source_level", r.structure.source_level},
            {"condition_attributes", r.structure.condition_attributes},
            {"target_level", r.structure.target_level},
            {"target_attributes", r.structure.target_attributes}}},
          {"data", data}};
}

Json summary_to_json(const ChangeSummary &s) {
  Json groups = Json::array();
  for (const auto &[inst, children] : s.groups) groups.push_back({{"instance", inst}, {"children", children}});
  return {{"dimension", s.dim_id},   {"source_level", s.source_level}, {"new_level", s.new_level},
          {"position", s.position}, {"groups", groups},               {"rules", s.rules_text}};
}

Json error_envelope(const Error &e) {
  Json err = {{"code", e.code()}, {"message", e.what()}, {"location", e.location()}};
  if (auto *d = dynamic_cast<const DetailedError *>(&e))
    for (auto it = d->details.begin(); it != d->details.end(); ++it) err[it.key()] = it.value();
  return {{"error", err}};
}

int status_for(std::string_view code) {
  if (code == "unknown-route" || code == "unknown-cube" || code == "not-found") return 404;
  if (code == "method-not-allowed") return 405;
  if (code == "concurrent-writer") return 409;
  if (code == "invalid-rules") return 422;
  if (code == "io-error" || code == "internal") return 500;
  return 400;
}

// --- session -------------------------------------------------------------------

Service::Service(fs::path dir) : dir_(dir) {
  recover_directory(dir);
  warehouse_ = std::make_shared<const Warehouse>(load_warehouse(dir));
  const fs::path log_file = dir / kLogFileName;
  if (fs::exists(log_file)) {
    try {
      log_ = Json::parse(read_file(log_file));
    } catch (const Json::parse_error &e) {
      throw Error("bad-log", "cannot parse '" + log_file.string() + "': " + e.what(), log_file.string());
    }
    if (!log_.is_array()) throw Error("bad-log", "'" + log_file.string() + "' must hold a JSON array", log_file.string());
  }
}

Service::Service(Warehouse w) : warehouse_(std::make_shared<const Warehouse>(std::move(w))) {}

std::shared_ptr<const Warehouse> Service::snapshot() const {
  std::lock_guard lock(state_);
  return warehouse_;
}

std::uint64_t Service::version() const {
  std::lock_guard lock(state_);
  return version_;
}

Json Service::model() const {
  std::shared_ptr<const Warehouse> snap;
  std::uint64_t version;
  std::size_t log_length;
  {
    std::lock_guard lock(state_);
    snap = warehouse_;
    version = version_;
    log_length = log_.size();
  }
  const Warehouse &w = *snap;
  Json dims = Json::array();
  for (std::size_t d = 0; d < w.model.dimensions.size(); ++d) {
    const auto &spec = w.model.dimensions[d];
    const DimensionData *data = w.find_dimension_data(spec.id);
    Json levels = Json::array();
    for (std::size_t l = 0; l < spec.levels.size(); ++l) {
      Json attrs = Json::array();
      for (const auto &a : spec.levels[l].attributes) attrs.push_back({{"name", a.name}, {"type", to_string(a.type)}});
      const std::size_t members = data && l < data->levels.size() ? data->levels[l].instances.size() : 0;
      levels.push_back({{"id", spec.levels[l].id}, {"attributes", attrs}, {"members", members}});
    }
    dims.push_back({{"id", spec.id}, {"path", spec.path}, {"levels", levels}});
  }
  Json measures = Json::array();
  for (const auto &m : w.model.facts.measures) measures.push_back({{"id", m.id}, {"type", to_string(m.type)}});
  return {{"version", version},
          {"directory", dir_ ? dir_->string() : std::string()},
          {"dimensions", dims},
          {"facts",
           {{"id", w.model.facts.id},
            {"path", w.model.facts.path},
            {"measures", measures},
            {"dimensions", w.model.facts.dimension_refs},
            {"count", w.facts.rows.size()}}},
          {"findings", findings_json(validate_warehouse(w))},
          {"log_length", log_length}};
}

Json Service::dimension(std::string_view dim_id) const {
  const auto w = snapshot();
  const DimensionData *data = w->find_dimension_data(dim_id);
  if (!data) throw Error("not-found", "no dimension '" + std::string(dim_id) + "'", std::string(dim_id));
  Json levels = Json::array();
  for (const auto &level : data->levels) {
    Json instances = Json::array();
    for (const auto &inst : level.instances) {
      Json attrs = Json::object();
      for (const auto &[k, v] : inst.attributes) attrs[k] = v;
      Json j = {{"id", inst.id}, {"attributes", attrs}};
      j["roll_up"] = inst.roll_up ? Json(*inst.roll_up) : Json(nullptr);
      j["drill_down"] = inst.drill_down ? Json(*inst.drill_down) : Json(nullptr);
      instances.push_back(j);
    }
    levels.push_back({{"id", level.level_id}, {"instances", instances}});
  }
  return {{"id", data->dim_id}, {"levels", levels}};
}

std::string Service::store_cube(Cube cube, std::uint64_t version) {
  std::lock_guard lock(state_);
  const std::string id = "c" + std::to_string(next_cube_++);
  cubes_.emplace(id, StoredCube{std::move(cube), version});
  return id;
}

Service::StoredCube Service::find_cube(std::string_view id) const {
  std::lock_guard lock(state_);
  auto it = cubes_.find(std::string(id));
  if (it == cubes_.end()) throw Error("unknown-cube", "no cube '" + std::string(id) + "'", std::string(id));
  return it->second;
}

Json Service::render(const std::string &id, const StoredCube &c, std::size_t offset, std::size_t limit) const {
  const Cube &cube = c.cube;
  Json axes = Json::array();
  for (const auto &a : cube.axes) axes.push_back(axis_json(a));
  Json preds = Json::array();
  for (const auto &p : cube.predicates) preds.push_back({{"dim", p.dim_id}, {"level", p.level_id}, {"members", p.members}});
  const auto ordered = cube.ordered_cells();
  Json cells = Json::array();
  for (std::size_t i = offset; i < ordered.size() && i - offset < limit; ++i) {
    Json cell = cell_json(*ordered[i].second);
    cell["coordinate"] = *ordered[i].first;
    if (auto it = cube.content.find(*ordered[i].first); it != cube.content.end()) {
      Json content = Json::array();
      for (const auto &lv : it->second) content.push_back({{"label", lv.label}, {"cell", cell_json(lv.value)}});
      cell["content"] = content;
    }
    cells.push_back(cell);
  }
  const std::size_t end = std::min(ordered.size(), offset + limit);
  Json out = {{"id", id},
              {"version", c.version},
              {"stale", c.version != version()},
              {"measure", cube.measure_id},
              {"aggregate", to_string(cube.aggregate)},
              {"axes", axes},
              {"predicates", preds}};
  out["pushed"] = cube.pushed ? Json{{"position", cube.pushed->position}, {"axis", axis_json(cube.pushed->axis)}} : Json(nullptr);
  out["cells"] = cells;
  out["page"] = {{"offset", offset},
                 {"limit", limit},
                 {"total", ordered.size()},
                 {"next", end < ordered.size() ? Json(end) : Json(nullptr)}};
  return out;
}

Json Service::create_cube(const Json &body) {
  std::shared_ptr<const Warehouse> w;
  std::uint64_t v;
  {
    std::lock_guard lock(state_);
    w = warehouse_;
    v = version_;
  }
  Cube cube = build_cube(w, axis_specs(field(body, "axes"), "axes"), string_field(body, "measure"),
                         parse_aggregate(string_or(body, "aggregate", "sum")));
  StoredCube stored{std::move(cube), v};
  const std::string id = store_cube(stored.cube, v);
  return render(id, stored, 0, kDefaultPageLimit);
}

Json Service::cube_op(std::string_view cube_id, const Json &body) {
  const StoredCube base = find_cube(cube_id);
  StoredCube next{apply_op(base.cube, body), base.version};
  const std::string id = store_cube(next.cube, next.version);
  return render(id, next, 0, kDefaultPageLimit);
}

Json Service::get_cube(std::string_view cube_id, std::size_t offset, std::size_t limit) const {
  if (limit == 0) bad_request("limit must be positive", "limit");
  return render(std::string(cube_id), find_cube(cube_id), offset, limit);
}

Json Service::export_cube(std::string_view cube_id) const { return {{"text", export_cube_text(find_cube(cube_id).cube)}}; }

Json Service::validate_rules(const Json &body) const {
  const RuleSet rules = rules_from_body(body);
  const auto w = snapshot();
  const ValidationReport report = validate_ruleset(rules, *w);
  Json out = {{"ok", report.ok()}, {"findings", findings_json(report)}, {"rules", format_rules(rules)}};
  try {
    out["dimension"] = resolve_dimension(rules, w->model);
  } catch (const Error &) {
    out["dimension"] = nullptr;
  }
  return out;
}

Json Service::apply_rules(const Json &body) {
  const RuleSet rules = rules_from_body(body);
  const bool dry_run = bool_or(body, "dry_run", false);
  std::unique_lock writer(writer_, std::try_to_lock);
  if (!writer.owns_lock()) throw Error("concurrent-writer", "another rule set is being applied");
  std::optional<WriterLock> disk_lock;
  if (dir_ && !dry_run) disk_lock.emplace(*dir_);

  const auto base = snapshot();
  const ValidationReport report = validate_ruleset(rules, *base);
  if (!report.ok())
    throw DetailedError("invalid-rules",
                        "rule set has " + std::to_string(report.findings.size()) + " finding(s); first: " +
                            report.findings.front().message,
                        {{"findings", findings_json(report)}});
  EvolutionResult result = apply_ruleset(*base, rules);
  if (dry_run)
    return {{"applied", false}, {"findings", findings_json(report)}, {"summary", summary_to_json(result.summary)}, {"version", version()}};

  Json entry;
  Json new_log;
  {
    std::lock_guard lock(state_);
    entry = summary_entry(result.summary, log_.size() + 1);
    new_log = log_;
  }
  new_log.push_back(entry);
  if (dir_) replace_directory(*dir_, result.warehouse, {{std::string(kLogFileName), new_log.dump(2) + "\n"}}, replace_options_);
  std::uint64_t v;
  {
    std::lock_guard lock(state_);
    warehouse_ = std::make_shared<const Warehouse>(std::move(result.warehouse));
    v = ++version_;
    log_ = std::move(new_log);
  }
  return {{"applied", true}, {"findings", findings_json(report)}, {"summary", entry}, {"version", v}};
}

Service::StoredCube Service::resolve_cube(const Json &body) {
  const Json &c = field(body, "cube");
  if (c.is_string()) return find_cube(c.get<std::string>());
  const Json created = create_cube(c);
  return find_cube(created.at("id").get<std::string>());
}

Json Service::mine(std::string_view task, const Json &body) {
  if (task == "opac") {
    const StoredCube c = resolve_cube(body);
    const std::string dim = string_field(body, "dim");
    const Linkage linkage = parse_linkage(string_or(body, "linkage", "ward"));
    FeatureSet features = extract_member_vectors(c.cube, dim);
    if (bool_or(body, "normalize", true)) normalize_min_max(features.vectors);
    const double weight = number_or(body, "descriptor_weight", 0);
    if (weight > 0) append_descriptor_columns(features.vectors, weight);
    const Dendrogram d = ahc_cluster(features.vectors, linkage);
    Json merges = Json::array();
    for (const auto &m : d.merges) merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
    Json quality = Json::array();
    for (const auto &q : quality_table(d, features.vectors)) quality.push_back(quality_json(q));
    Json out = {{"dim", dim},
                {"linkage", to_string(linkage)},
                {"leaves", d.leaves},
                {"merges", merges},
                {"dendrogram", dendrogram_node(d, d.leaves.size() + d.merges.size() - 1)},
                {"quality", quality}};
    if (body.contains("k")) {
      const Json &kj = body.at("k");
      if (!kj.is_number_integer() || kj.get<std::int64_t>() <= 0) bad_request("field \"k\" must be a positive integer", "k");
      const Partition p = cut_partition(d, kj.get<std::size_t>());
      out["partition"] = {{"clusters", p.clusters}, {"quality", quality_json(partition_quality(p, features.vectors))}};
      if (body.contains("target_level")) {
        std::vector<std::string> names;
        if (body.contains("names")) names = strings(body.at("names"), "names");
        else
          for (std::size_t i = 1; i <= p.k(); ++i) names.push_back("cluster-" + std::to_string(i));
        const RuleSet rules = partition_to_rules(p, c.cube, dim, string_field(body, "target_level"), names,
                                                 string_or(body, "target_attribute", "name"));
        out["rules"] = format_rules(rules);
      }
    } else if (body.contains("target_level")) {
      bad_request("\"target_level\" needs \"k\"", "k");
    }
    return out;
  }
  if (task == "mca") {
    const StoredCube c = resolve_cube(body);
    const IndicatorMatrix m = build_indicator_matrix(c.cube);
    const FactorialResult f = mca_axes(m);
    const auto tv = test_values(f, m);
    Json members = Json::array();
    for (std::size_t j = 0; j < m.columns(); ++j) {
      const IndicatorBlock &b = m.variable_of(j);
      Json mj = {{"dim", b.dim_id},
                 {"level", b.level_id},
                 {"member", m.member_of(j)},
                 {"frequency", m.frequency[j]},
                 {"coordinates", f.member_coordinates[j]},
                 {"testable", tv[j].testable}};
      mj["test_values"] = tv[j].testable ? Json(tv[j].values) : Json(nullptr);
      members.push_back(mj);
    }
    StoredCube arranged{arrange_cube(c.cube, m, tv), c.version};
    const std::string arranged_id = store_cube(arranged.cube, arranged.version);
    const HomogeneityScore before = homogeneity(c.cube), after = homogeneity(arranged.cube);
    return {{"facts", m.rows()},
            {"eigenvalues", f.eigenvalues},
            {"total_inertia", f.total_inertia},
            {"members", members},
            {"homogeneity", {{"before", before.value}, {"after", after.value}}},
            {"arranged", render(arranged_id, arranged, 0, kDefaultPageLimit)}};
  }
  if (task == "rules") {
    MetaRule meta;
    meta.antecedent = axis_specs(field(body, "antecedent"), "antecedent");
    meta.consequent = axis_specs(field(body, "consequent"), "consequent");
    meta.measure_id = string_field(body, "measure");
    meta.aggregate = parse_aggregate(string_or(body, "aggregate", "count"));
    if (body.contains("context")) meta.context = predicates(body.at("context"));
    const auto w = snapshot();
    const FrequentResult f = mine_frequent(*w, meta, number_or(body, "min_support", 0.1));
    const auto rules = derive_rules(f, meta, number_or(body, "min_confidence", 0));
    Json frequent = Json::array();
    for (const auto &fi : f.itemsets)
      frequent.push_back({{"items", items_json(fi.items)}, {"support", fi.support}, {"weight", fi.weight}});
    return {{"total", f.total},
            {"context_facts", f.context_facts},
            {"frequent", frequent},
            {"rules", Json::parse(export_rules(rules, RuleFormat::Json))}};
  }
  throw Error("unknown-route", "unknown mining task '" + std::string(task) + "' (expected opac, mca or rules)");
}

Json Service::log() const {
  std::lock_guard lock(state_);
  return {{"entries", log_}, {"version", version_}};
}

// --- routing ---------------------------------------------------------------------

Response Service::handle(std::string_view method, std::string_view target, const Json &body) {
  try {
    std::string_view path = target, query;
    if (auto q = target.find('?'); q != std::string_view::npos) {
      path = target.substr(0, q);
      query = target.substr(q + 1);
    }
    std::map<std::string, std::string> params;
    while (!query.empty()) {
      const auto amp = query.find('&');
      const std::string_view kv = query.substr(0, amp);
      const auto eq = kv.find('=');
      params[std::string(kv.substr(0, eq))] = eq == std::string_view::npos ? "" : std::string(kv.substr(eq + 1));
      query = amp == std::string_view::npos ? std::string_view() : query.substr(amp + 1);
    }
    std::vector<std::string> seg;
    for (std::size_t i = 0; i < path.size();) {
      const auto next = path.find('/', i);
      const auto part = path.substr(i, next == std::string_view::npos ? std::string_view::npos : next - i);
      if (!part.empty()) seg.emplace_back(part);
      if (next == std::string_view::npos) break;
      i = next + 1;
    }
    auto expect = [&](std::string_view m) {
      if (method != m)
        throw Error("method-not-allowed", std::string(method) + " not allowed on " + std::string(path) + " (use " + std::string(m) + ")");
    };
    auto ok = [](Json j) { return Response{200, std::move(j)}; };

    if (seg.size() == 1 && seg[0] == "model") return expect("GET"), ok(model());
    if (seg.size() == 1 && seg[0] == "log") return expect("GET"), ok(log());
    if (seg.size() == 2 && seg[0] == "dimensions") return expect("GET"), ok(dimension(seg[1]));
    if (seg.size() == 1 && seg[0] == "cubes") return expect("POST"), Response{201, create_cube(body)};
    if (seg.size() == 2 && seg[0] == "cubes") {
      expect("GET");
      const std::size_t offset = params.count("offset") ? parse_size(params["offset"], "offset") : 0;
      const std::size_t limit = params.count("limit") ? parse_size(params["limit"], "limit") : kDefaultPageLimit;
      return ok(get_cube(seg[1], offset, limit));
    }
    if (seg.size() == 3 && seg[0] == "cubes" && seg[2] == "op") return expect("POST"), Response{201, cube_op(seg[1], body)};
    if (seg.size() == 3 && seg[0] == "cubes" && seg[2] == "export") return expect("GET"), ok(export_cube(seg[1]));
    if (seg.size() == 2 && seg[0] == "rules" && seg[1] == "validate") return expect("POST"), ok(validate_rules(body));
    if (seg.size() == 2 && seg[0] == "rules" && seg[1] == "apply") return expect("POST"), ok(apply_rules(body));
    if (seg.size() == 2 && seg[0] == "mine") return expect("POST"), ok(mine(seg[1], body));
    throw Error("unknown-route", "no route for " + std::string(method) + " " + std::string(path), std::string(path));
  } catch (const Error &e) {
    return {status_for(e.code()), error_envelope(e)};
  } catch (const Json::exception &e) {
    return {400, error_envelope(Error("bad-request", e.what()))};
  } catch (const std::exception &e) {
    return {500, error_envelope(Error("internal", e.what()))};
  }
}

} // namespace xdw

#include "xdw/warehouse.hpp"

#include "xdw/error.hpp"
#include "xdw/xml.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace xdw {

// --- enums ---------------------------------------------------------------

std::string_view to_string(AttributeType t) {
  switch (t) {
  case AttributeType::String: return "string";
  case AttributeType::Boolean: return "boolean";
  case AttributeType::Integer: return "integer";
  case AttributeType::Real: return "real";
  }
  return "string";
}

std::string_view to_string(MeasureType t) { return t == MeasureType::Integer ? "integer" : "real"; }

AttributeType parse_attribute_type(std::string_view s) {
  if (s == "string") return AttributeType::String;
  if (s == "boolean") return AttributeType::Boolean;
  if (s == "integer") return AttributeType::Integer;
  if (s == "real") return AttributeType::Real;
  throw Error("bad-type", "unknown attribute type '" + std::string(s) + "'");
}

MeasureType parse_measure_type(std::string_view s) {
  if (s == "integer") return MeasureType::Integer;
  if (s == "real") return MeasureType::Real;
  throw Error("bad-type", "unknown measure type '" + std::string(s) + "' (expected integer or real)");
}

// --- lookups -------------------------------------------------------------

const AttributeSpec *LevelSpec::find_attribute(std::string_view n) const {
  for (const auto &a : attributes)
    if (a.name == n) return &a;
  return nullptr;
}

std::optional<std::size_t> DimensionSpec::level_index(std::string_view level_id) const {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i].id == level_id) return i;
  return std::nullopt;
}

const MeasureSpec *FactSpec::find_measure(std::string_view m) const {
  for (const auto &x : measures)
    if (x.id == m) return &x;
  return nullptr;
}

const DimensionSpec *WarehouseModel::find_dimension(std::string_view id) const {
  for (const auto &d : dimensions)
    if (d.id == id) return &d;
  return nullptr;
}

const Instance *LevelInstances::find(std::string_view id) const {
  for (const auto &i : instances)
    if (i.id == id) return &i;
  return nullptr;
}

const LevelInstances *DimensionData::find_level(std::string_view level_id) const {
  for (const auto &l : levels)
    if (l.level_id == level_id) return &l;
  return nullptr;
}

const DimensionData *Warehouse::find_dimension_data(std::string_view dim_id) const {
  for (const auto &d : dimensions)
    if (d.dim_id == dim_id) return &d;
  return nullptr;
}

// --- parsing -------------------------------------------------------------

namespace {

[[noreturn]] void unknown_element(const xml::Element &el, std::string_view parent) {
  throw Error("unknown-element",
              "unknown element <" + el.name + "> inside <" + std::string(parent) + "> at " + el.where(),
              el.where());
}

[[noreturn]] void duplicate_id(const xml::Element &el, std::string_view what, const std::string &id) {
  throw Error("duplicate-id", "duplicate " + std::string(what) + " id '" + id + "' at " + el.where(),
              el.where());
}

void expect_root(const xml::Element &root, std::string_view name) {
  if (root.name != name)
    throw Error("unknown-element", "expected root <" + std::string(name) + ">, found <" + root.name + ">",
                root.where());
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

} // namespace

WarehouseModel parse_model(std::string_view doc) {
  const xml::Element root = xml::parse(doc);
  expect_root(root, "DW-model");
  WarehouseModel model;
  bool have_facts = false;
  std::set<std::string> dim_ids;
  for (const auto &el : root.children) {
    if (el.name == "dimension") {
      DimensionSpec dim;
      dim.id = el.required("id", "dimension");
      dim.path = el.required("path", "dimension");
      if (!dim_ids.insert(dim.id).second) duplicate_id(el, "dimension", dim.id);
      std::set<std::string> level_ids;
      for (const auto &lv : el.children) {
        if (lv.name != "Level") unknown_element(lv, "dimension");
        LevelSpec level;
        level.id = lv.required("id", "Level");
        if (!level_ids.insert(level.id).second) duplicate_id(lv, "level", level.id);
        for (const auto &at : lv.children) {
          if (at.name != "attribute") unknown_element(at, "Level");
          AttributeSpec a;
          a.name = at.required("name", "attribute");
          a.type = parse_attribute_type(at.required("type", "attribute"));
          if (level.find_attribute(a.name)) duplicate_id(at, "attribute", a.name);
          level.attributes.push_back(std::move(a));
        }
        dim.levels.push_back(std::move(level));
      }
      model.dimensions.push_back(std::move(dim));
    } else if (el.name == "FactDoc") {
      if (have_facts)
        throw Error("unsupported", "only one <FactDoc> per model is supported (second at " + el.where() + ")",
                    el.where());
      have_facts = true;
      FactSpec &f = model.facts;
      f.id = el.required("id", "FactDoc");
      f.path = el.required("path", "FactDoc");
      for (const auto &c : el.children) {
        if (c.name == "measure") {
          MeasureSpec m;
          m.id = c.required("id", "measure");
          m.type = parse_measure_type(c.required("type", "measure"));
          if (f.find_measure(m.id)) duplicate_id(c, "measure", m.id);
          f.measures.push_back(std::move(m));
        } else if (c.name == "dimension") {
          std::string ref = c.required("idref", "FactDoc/dimension");
          if (std::find(f.dimension_refs.begin(), f.dimension_refs.end(), ref) != f.dimension_refs.end())
            duplicate_id(c, "dimension reference", ref);
          f.dimension_refs.push_back(std::move(ref));
        } else {
          unknown_element(c, "FactDoc");
        }
      }
    } else {
      unknown_element(el, "DW-model");
    }
  }
  if (!have_facts) throw Error("missing-element", "<DW-model> has no <FactDoc> element", root.where());
  return model;
}

DimensionData parse_dimension(std::string_view doc, const DimensionSpec &spec) {
  const xml::Element root = xml::parse(doc);
  expect_root(root, "dimension");
  DimensionData data;
  data.dim_id = root.required("dim-id", "dimension");
  if (data.dim_id != spec.id)
    throw Error("dim-id-mismatch", "dimension document declares dim-id '" + data.dim_id + "' but the model expects '" +
                                       spec.id + "'",
                root.where());
  for (const auto &lv : root.children) {
    if (lv.name != "Level") unknown_element(lv, "dimension");
    LevelInstances level;
    level.level_id = lv.required("id", "Level");
    auto idx = spec.level_index(level.level_id);
    if (!idx)
      throw Error("undeclared-level", "level '" + level.level_id + "' at " + lv.where() +
                                          " is not declared for dimension '" + spec.id + "'",
                  lv.where());
    const LevelSpec &lspec = spec.levels[*idx];
    for (const auto &in : lv.children) {
      if (in.name != "Instance") unknown_element(in, "Level");
      Instance inst;
      inst.id = in.required("id", "Instance");
      if (const auto *r = in.attribute("Roll-up")) inst.roll_up = *r;
      if (const auto *d = in.attribute("Drill-Down")) inst.drill_down = split_ws(*d);
      for (const auto &[k, v] : in.attributes)
        if (k != "id" && k != "Roll-up" && k != "Drill-Down")
          throw Error("unknown-attribute", "unexpected attribute '" + k + "' on <Instance> at " + in.where(),
                      in.where());
      for (const auto &at : in.children) {
        if (at.name != "attribute") unknown_element(at, "Instance");
        const std::string &name = at.required("id", "attribute");
        if (!lspec.find_attribute(name))
          throw Error("undeclared-attribute", "attribute '" + name + "' at " + at.where() +
                                                  " is not declared for level '" + lspec.id + "'",
                      at.where());
        if (!inst.attributes.emplace(name, at.required("value", "attribute")).second)
          duplicate_id(at, "attribute", name);
      }
      level.instances.push_back(std::move(inst));
    }
    data.levels.push_back(std::move(level));
  }
  return data;
}

FactTable parse_facts(std::string_view doc, const FactSpec &spec) {
  const xml::Element root = xml::parse(doc);
  expect_root(root, "FactDoc");
  if (const auto *id = root.attribute("id"); id && *id != spec.id)
    throw Error("fact-id-mismatch", "fact document id '" + *id + "' does not match model FactDoc '" + spec.id + "'",
                root.where());
  FactTable table;
  table.fact_spec_id = spec.id;
  std::size_t index = 0;
  for (const auto &f : root.children) {
    if (f.name != "fact") unknown_element(f, "FactDoc");
    FactRow row;
    for (const auto &c : f.children) {
      if (c.name == "measure") {
        const std::string &ref = c.required("idref", "fact/measure");
        const MeasureSpec *m = spec.find_measure(ref);
        if (!m)
          throw Error("unknown-reference", "fact " + std::to_string(index) + ": undeclared measure '" + ref + "'",
                      c.where());
        const std::string &text = c.required("value", "fact/measure");
        auto v = parse_number(text);
        if (!v || (m->type == MeasureType::Integer && *v != static_cast<double>(static_cast<long long>(*v))))
          throw Error("bad-number", "fact " + std::to_string(index) + ": measure '" + ref + "' value '" + text +
                                        "' is not a valid " + std::string(to_string(m->type)),
                      c.where());
        if (!row.measures.emplace(ref, *v).second) duplicate_id(c, "measure binding", ref);
      } else if (c.name == "dimension") {
        const std::string &ref = c.required("idref", "fact/dimension");
        if (std::find(spec.dimension_refs.begin(), spec.dimension_refs.end(), ref) == spec.dimension_refs.end())
          throw Error("unknown-reference", "fact " + std::to_string(index) + ": undeclared dimension '" + ref + "'",
                      c.where());
        if (!row.members.emplace(ref, c.required("instance", "fact/dimension")).second)
          duplicate_id(c, "dimension binding", ref);
      } else {
        unknown_element(c, "fact");
      }
    }
    for (const auto &m : spec.measures)
      if (!row.measures.count(m.id))
        throw Error("missing-binding", "fact " + std::to_string(index) + " lacks measure '" + m.id + "'", f.where());
    for (const auto &d : spec.dimension_refs)
      if (!row.members.count(d))
        throw Error("missing-binding", "fact " + std::to_string(index) + " lacks dimension '" + d + "'", f.where());
    table.rows.push_back(std::move(row));
    ++index;
  }
  return table;
}

// --- serialization -------------------------------------------------------

std::optional<double> parse_number(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string serialize_model(const WarehouseModel &model) {
  xml::Element root{.name = "DW-model"};
  for (const auto &d : model.dimensions) {
    xml::Element de{.name = "dimension", .attributes = {{"id", d.id}, {"path", d.path}}};
    for (const auto &l : d.levels) {
      xml::Element le{.name = "Level", .attributes = {{"id", l.id}}};
      for (const auto &a : l.attributes)
        le.children.push_back(
            {.name = "attribute", .attributes = {{"name", a.name}, {"type", std::string(to_string(a.type))}}});
      de.children.push_back(std::move(le));
    }
    root.children.push_back(std::move(de));
  }
  const FactSpec &f = model.facts;
  xml::Element fe{.name = "FactDoc", .attributes = {{"id", f.id}, {"path", f.path}}};
  for (const auto &m : f.measures)
    fe.children.push_back({.name = "measure", .attributes = {{"id", m.id}, {"type", std::string(to_string(m.type))}}});
  for (const auto &r : f.dimension_refs) fe.children.push_back({.name = "dimension", .attributes = {{"idref", r}}});
  root.children.push_back(std::move(fe));
  return xml::write(root);
}

std::string serialize_dimension(const DimensionData &data) {
  xml::Element root{.name = "dimension", .attributes = {{"dim-id", data.dim_id}}};
  for (const auto &l : data.levels) {
    xml::Element le{.name = "Level", .attributes = {{"id", l.level_id}}};
    for (const auto &inst : l.instances) {
      xml::Element ie{.name = "Instance", .attributes = {{"id", inst.id}}};
      if (inst.roll_up) ie.attributes.emplace_back("Roll-up", *inst.roll_up);
      if (inst.drill_down) {
        std::string joined;
        for (const auto &c : *inst.drill_down) {
          if (!joined.empty()) joined += ' ';
          joined += c;
        }
        ie.attributes.emplace_back("Drill-Down", joined);
      }
      for (const auto &[k, v] : inst.attributes)
        ie.children.push_back({.name = "attribute", .attributes = {{"id", k}, {"value", v}}});
      le.children.push_back(std::move(ie));
    }
    root.children.push_back(std::move(le));
  }
  return xml::write(root);
}

std::string serialize_facts(const FactTable &facts) {
  xml::Element root{.name = "FactDoc", .attributes = {{"id", facts.fact_spec_id}}};
  for (const auto &row : facts.rows) {
    xml::Element fe{.name = "fact"};
    for (const auto &[k, v] : row.measures)
      fe.children.push_back({.name = "measure", .attributes = {{"idref", k}, {"value", format_number(v)}}});
    for (const auto &[k, v] : row.members)
      fe.children.push_back({.name = "dimension", .attributes = {{"idref", k}, {"instance", v}}});
    root.children.push_back(std::move(fe));
  }
  return xml::write(root);
}

std::vector<Document> serialize_warehouse(const Warehouse &w) {
  std::vector<Document> docs;
  docs.push_back({std::string(kModelFileName), serialize_model(w.model)});
  for (const auto &spec : w.model.dimensions) {
    const DimensionData *data = w.find_dimension_data(spec.id);
    if (!data) throw Error("invalid-warehouse", "no data for dimension '" + spec.id + "'");
    docs.push_back({spec.path, serialize_dimension(*data)});
  }
  docs.push_back({w.model.facts.path, serialize_facts(w.facts)});
  return docs;
}

// --- validation ----------------------------------------------------------

bool ValidationReport::ok() const {
  return std::none_of(findings.begin(), findings.end(), [](const Finding &f) { return f.severity == Severity::Error; });
}

std::size_t ValidationReport::count(std::string_view kind) const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [&](const Finding &f) { return f.kind == kind; }));
}

namespace {

class Validator {
public:
  explicit Validator(const Warehouse &w) : w_(w) {}

  ValidationReport run() {
    check_model();
    for (const auto &spec : w_.model.dimensions)
      if (usable_dims_.count(spec.id)) check_dimension(spec);
    for (const auto &data : w_.dimensions)
      if (!w_.model.find_dimension(data.dim_id))
        add("unexpected-dimension-data", "dimension data '" + data.dim_id + "' has no model declaration");
    check_facts();
    return std::move(report_);
  }

private:
  const Warehouse &w_;
  ValidationReport report_;
  std::set<std::string> usable_dims_;        // model-valid dimensions
  std::set<std::string> linked_dims_;        // dimensions whose data matched the model
  std::unordered_map<std::string, std::unordered_set<std::string>> finest_; // dim -> finest ids

  void add(std::string kind, std::string message, Severity s = Severity::Error) {
    report_.findings.push_back({s, std::move(kind), std::move(message)});
  }

  void check_model() {
    std::map<std::string, int> seen;
    for (const auto &d : w_.model.dimensions) ++seen[d.id];
    for (const auto &[id, n] : seen)
      if (n > 1) add("duplicate-dimension-id", "dimension id '" + id + "' declared " + std::to_string(n) + " times");
    for (const auto &d : w_.model.dimensions) {
      if (seen[d.id] > 1) continue;
      bool ok = true;
      if (d.path.empty()) add("empty-path", "dimension '" + d.id + "' has an empty path");
      if (d.levels.empty()) {
        add("no-levels", "dimension '" + d.id + "' declares no level");
        ok = false;
      }
      std::set<std::string> level_ids;
      for (const auto &l : d.levels) {
        if (!level_ids.insert(l.id).second) {
          add("duplicate-level-id", "dimension '" + d.id + "' repeats level '" + l.id + "'");
          ok = false;
        }
        if (l.attributes.empty()) {
          add("no-attributes", "level '" + l.id + "' of '" + d.id + "' declares no attribute");
          ok = false;
        }
        std::set<std::string> names;
        for (const auto &a : l.attributes)
          if (!names.insert(a.name).second) {
            add("duplicate-attribute", "level '" + l.id + "' repeats attribute '" + a.name + "'");
            ok = false;
          }
      }
      if (ok) usable_dims_.insert(d.id);
    }
    const FactSpec &f = w_.model.facts;
    if (f.path.empty()) add("empty-path", "fact spec '" + f.id + "' has an empty path");
    if (f.measures.empty()) add("no-measures", "fact spec '" + f.id + "' declares no measure");
    std::set<std::string> mids;
    for (const auto &m : f.measures)
      if (!mids.insert(m.id).second) add("duplicate-measure", "measure '" + m.id + "' declared twice");
    if (f.dimension_refs.empty()) add("no-dimension-refs", "fact spec '" + f.id + "' references no dimension");
    std::set<std::string> refs;
    for (const auto &r : f.dimension_refs) {
      if (!refs.insert(r).second) add("duplicate-dimension-ref", "fact spec references '" + r + "' twice");
      if (!w_.model.find_dimension(r)) add("unknown-dimension-ref", "fact spec references unknown dimension '" + r + "'");
    }
  }

  void check_dimension(const DimensionSpec &spec) {
    const DimensionData *data = w_.find_dimension_data(spec.id);
    if (!data) {
      add("missing-dimension-data", "no data document loaded for dimension '" + spec.id + "'");
      return;
    }
    bool same = data->levels.size() == spec.levels.size();
    for (std::size_t i = 0; same && i < spec.levels.size(); ++i) same = data->levels[i].level_id == spec.levels[i].id;
    if (!same) {
      add("level-mismatch", "levels of dimension data '" + spec.id + "' do not match the model's level order");
      return;
    }
    linked_dims_.insert(spec.id);

    const std::size_t L = spec.levels.size();
    std::vector<std::unordered_map<std::string, const Instance *>> index(L);
    for (std::size_t li = 0; li < L; ++li) {
      for (const auto &inst : data->levels[li].instances) {
        if (!index[li].emplace(inst.id, &inst).second)
          add("duplicate-instance", "instance '" + inst.id + "' repeated in level '" + spec.levels[li].id + "'");
        for (const auto &[name, value] : inst.attributes)
          if (!spec.levels[li].find_attribute(name))
            add("undeclared-attribute",
                "instance '" + inst.id + "' sets undeclared attribute '" + name + "' in level '" + spec.levels[li].id + "'");
      }
    }
    for (const auto &inst : data->levels[0].instances) finest_[spec.id].insert(inst.id);

    for (std::size_t li = 0; li < L; ++li) {
      const std::string &lid = spec.levels[li].id;
      const bool coarsest = li + 1 == L;
      const bool finest = li == 0;
      for (const auto &inst : data->levels[li].instances) {
        const std::string where = "instance '" + inst.id + "' of level '" + lid + "'";
        // Roll-up side.
        if (coarsest) {
          if (inst.roll_up) {
            if (*inst.roll_up == inst.id)
              add("self-roll-up", where + " rolls up to itself at the coarsest level (ignored)", Severity::Warning);
            else
              add("roll-up-beyond-coarsest", where + " has Roll-up '" + *inst.roll_up + "' but no coarser level exists");
          }
        } else if (!inst.roll_up) {
          add("missing-roll-up", where + " has no Roll-up parent");
        } else {
          auto it = index[li + 1].find(*inst.roll_up);
          if (it == index[li + 1].end()) {
            add("dangling-roll-up", where + " rolls up to missing instance '" + *inst.roll_up + "'");
          } else if (const auto &dd = it->second->drill_down;
                     dd && std::find(dd->begin(), dd->end(), inst.id) == dd->end()) {
            add("asymmetric-link", "asymmetric hierarchy link: " + where + " rolls up to '" + *inst.roll_up +
                                       "' which does not list it in Drill-Down");
          }
        }
        // Drill-down side.
        if (finest) {
          if (inst.drill_down)
            add("drill-down-at-finest", where + " has Drill-Down but no finer level exists");
        } else if (!inst.drill_down || inst.drill_down->empty()) {
          add("missing-drill-down", where + " has no Drill-Down children");
        } else {
          for (const auto &child : *inst.drill_down) {
            auto it = index[li - 1].find(child);
            if (it == index[li - 1].end()) {
              add("dangling-drill-down", where + " drills down to missing instance '" + child + "'");
              continue;
            }
            const auto &ru = it->second->roll_up;
            if (ru && *ru != inst.id && index[li].count(*ru))
              add("asymmetric-link", "asymmetric hierarchy link: " + where + " lists child '" + child +
                                         "' whose Roll-up is '" + *ru + "'");
          }
        }
      }
    }
  }

  void check_facts() {
    const FactSpec &f = w_.model.facts;
    std::size_t i = 0;
    for (const auto &row : w_.facts.rows) {
      for (const auto &m : f.measures)
        if (!row.measures.count(m.id))
          add("missing-measure-binding", "fact " + std::to_string(i) + " lacks measure '" + m.id + "'");
      for (const auto &d : f.dimension_refs) {
        if (!w_.model.find_dimension(d)) continue;
        auto it = row.members.find(d);
        if (it == row.members.end()) {
          add("missing-dimension-binding", "fact " + std::to_string(i) + " lacks dimension '" + d + "'");
          continue;
        }
        if (!linked_dims_.count(d)) continue;
        if (!finest_[d].count(it->second))
          add("dangling-fact-reference", "dangling fact reference: fact " + std::to_string(i) + " names '" +
                                             it->second + "' absent from the finest level of '" + d + "'");
      }
      ++i;
    }
  }
};

} // namespace

ValidationReport validate_warehouse(const Warehouse &w) { return Validator(w).run(); }

// --- files ---------------------------------------------------------------

std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing-document", "cannot read '" + p.string() + "'", p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path &p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io-error", "cannot write '" + p.string() + "'", p.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error("io-error", "short write to '" + p.string() + "'", p.string());
}

namespace {

template <class F>
auto with_file_context(const std::filesystem::path &p, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error &e) {
    if (e.code() == "missing-document") throw;
    std::string loc = p.filename().string();
    if (!e.location().empty()) loc += ":" + e.location();
    throw Error(e.code(), p.filename().string() + ": " + e.what(), loc);
  }
}

} // namespace

Warehouse load_warehouse(const std::filesystem::path &dir) {
  Warehouse w;
  const auto model_path = dir / kModelFileName;
  w.model = with_file_context(model_path, [&] { return parse_model(read_file(model_path)); });
  for (const auto &spec : w.model.dimensions) {
    const auto p = dir / spec.path;
    w.dimensions.push_back(with_file_context(p, [&] { return parse_dimension(read_file(p), spec); }));
  }
  const auto fp = dir / w.model.facts.path;
  w.facts = with_file_context(fp, [&] { return parse_facts(read_file(fp), w.model.facts); });
  return w;
}

void write_warehouse(const Warehouse &w, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  for (const auto &doc : serialize_warehouse(w)) write_file(dir / doc.file_name, doc.text);
}

} // namespace xdw

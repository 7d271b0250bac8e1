#include "xdw/ingest.hpp"

#include "xdw/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace xdw {

// --- delimited text --------------------------------------------------------

CsvTable parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  std::size_t line = 1, col = 1, i = 0;
  auto fail = [&](const std::string &msg) {
    throw Error("bad-csv", msg + " at " + std::to_string(line) + ":" + std::to_string(col),
                std::to_string(line) + ":" + std::to_string(col));
  };
  while (i < text.size()) {
    std::vector<std::string> record;
    const std::size_t start_line = line;
    bool end_of_record = false;
    while (!end_of_record) {
      std::string field;
      if (i < text.size() && text[i] == '"') {
        ++i, ++col;
        for (;;) {
          if (i >= text.size()) fail("unterminated quoted field");
          const char c = text[i];
          if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field += '"';
              i += 2, col += 2;
              continue;
            }
            ++i, ++col;
            break;
          }
          field += c;
          ++i;
          if (c == '\n') ++line, col = 1;
          else ++col;
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
          fail("unexpected character after closing quote");
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          if (text[i] == '"') fail("quote inside unquoted field");
          field += text[i++];
          ++col;
        }
      }
      record.push_back(std::move(field));
      if (i < text.size() && text[i] == ',') {
        ++i, ++col;
        continue;
      }
      if (i < text.size() && text[i] == '\r') ++i;
      if (i < text.size() && text[i] == '\n') ++i;
      else if (i < text.size()) fail("stray carriage return");
      ++line, col = 1;
      end_of_record = true;
    }
    if (record.size() == 1 && record[0].empty()) continue; // blank line
    records.push_back(std::move(record));
    record_lines.push_back(start_line);
  }
  if (records.empty()) throw Error("bad-csv", "missing header row", "1:1");
  CsvTable out;
  out.header = std::move(records[0]);
  std::set<std::string> seen;
  for (const auto &h : out.header)
    if (!seen.insert(h).second) throw Error("bad-csv", "duplicate header column '" + h + "'", "1:1");
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != out.header.size())
      throw Error("bad-csv",
                  "line " + std::to_string(record_lines[r]) + " has " + std::to_string(records[r].size()) +
                      " fields, header has " + std::to_string(out.header.size()),
                  std::to_string(record_lines[r]) + ":1");
    out.rows.push_back(std::move(records[r]));
  }
  return out;
}

namespace {

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

} // namespace

std::string write_csv(const CsvTable &table) {
  std::string out;
  auto line = [&](const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
    out += "\n";
  };
  line(table.header);
  for (const auto &r : table.rows) line(r);
  return out;
}

// --- mapping -----------------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void bad_mapping(const std::string &msg) { throw Error("bad-mapping", msg); }

std::string str_field(const json &obj, const char *key, const std::string &where, const std::string *fallback = nullptr) {
  if (!obj.is_object()) bad_mapping(where + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    bad_mapping(where + " lacks \"" + key + "\"");
  }
  if (!it->is_string() || it->get<std::string>().empty()) bad_mapping(where + "." + key + " must be a nonempty string");
  return it->get<std::string>();
}

const json &array_field(const json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array() || it->empty()) bad_mapping(where + "." + key + " must be a nonempty array");
  return *it;
}

template <class F> auto typed(F parse, const std::string &text, const std::string &where) {
  try {
    return parse(text);
  } catch (const Error &e) {
    bad_mapping(where + ": " + e.what());
  }
}

void check_mapping(const IngestionMapping &m) {
  if (m.dimensions.empty()) bad_mapping("mapping binds no dimension");
  if (m.measures.empty()) bad_mapping("mapping binds no measure");
  std::set<std::string> dims, paths{m.fact_path}, measures;
  for (const auto &d : m.dimensions) {
    if (!dims.insert(d.dim_id).second) bad_mapping("dimension '" + d.dim_id + "' bound twice");
    if (!paths.insert(d.path).second) bad_mapping("document path '" + d.path + "' used twice");
    if (d.levels.empty()) bad_mapping("dimension '" + d.dim_id + "' binds no level");
    std::set<std::string> levels;
    for (const auto &l : d.levels) {
      if (!levels.insert(l.level_id).second) bad_mapping("level '" + l.level_id + "' bound twice in '" + d.dim_id + "'");
      if (l.attributes.empty()) bad_mapping("level '" + l.level_id + "' binds no attribute");
      std::set<std::string> names;
      for (const auto &a : l.attributes)
        if (!names.insert(a.name).second) bad_mapping("attribute '" + a.name + "' bound twice on '" + l.level_id + "'");
    }
  }
  for (const auto &mb : m.measures)
    if (!measures.insert(mb.measure_id).second) bad_mapping("measure '" + mb.measure_id + "' bound twice");
}

} // namespace

IngestionMapping parse_mapping(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    bad_mapping(std::string("mapping is not JSON: ") + e.what());
  }
  if (!doc.is_object()) bad_mapping("mapping must be a JSON object");
  IngestionMapping m;
  if (auto f = doc.find("facts"); f != doc.end()) {
    m.fact_id = str_field(*f, "id", "facts", &m.fact_id);
    m.fact_path = str_field(*f, "path", "facts", &m.fact_path);
  }
  const json &dims = array_field(doc, "dimensions", "mapping");
  for (std::size_t d = 0; d < dims.size(); ++d) {
    const std::string where = "dimensions[" + std::to_string(d) + "]";
    DimensionBinding db;
    db.dim_id = str_field(dims[d], "id", where);
    const std::string default_path = "dim-" + db.dim_id + ".xml";
    db.path = str_field(dims[d], "path", where, &default_path);
    const json &levels = array_field(dims[d], "levels", where);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const std::string lw = where + ".levels[" + std::to_string(l) + "]";
      LevelBinding lb;
      lb.level_id = str_field(levels[l], "id", lw);
      lb.column = str_field(levels[l], "column", lw, &lb.level_id);
      const json &attrs = array_field(levels[l], "attributes", lw);
      for (std::size_t a = 0; a < attrs.size(); ++a) {
        const std::string aw = lw + ".attributes[" + std::to_string(a) + "]";
        AttributeBinding ab;
        ab.name = str_field(attrs[a], "name", aw);
        ab.column = str_field(attrs[a], "column", aw, &ab.name);
        const std::string string_type = "string";
        const std::string type = str_field(attrs[a], "type", aw, &string_type);
        ab.type = typed(parse_attribute_type, type, aw);
        lb.attributes.push_back(std::move(ab));
      }
      db.levels.push_back(std::move(lb));
    }
    m.dimensions.push_back(std::move(db));
  }
  const json &measures = array_field(doc, "measures", "mapping");
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const std::string where = "measures[" + std::to_string(i) + "]";
    MeasureBinding mb;
    mb.measure_id = str_field(measures[i], "id", where);
    mb.column = str_field(measures[i], "column", where, &mb.measure_id);
    const std::string real = "real";
    mb.type = typed(parse_measure_type, str_field(measures[i], "type", where, &real), where);
    m.measures.push_back(std::move(mb));
  }
  check_mapping(m);
  return m;
}

std::string format_mapping(const IngestionMapping &m) {
  json doc;
  doc["facts"] = {{"id", m.fact_id}, {"path", m.fact_path}};
  doc["dimensions"] = json::array();
  for (const auto &d : m.dimensions) {
    json levels = json::array();
    for (const auto &l : d.levels) {
      json attrs = json::array();
      for (const auto &a : l.attributes)
        attrs.push_back({{"name", a.name}, {"column", a.column}, {"type", std::string(to_string(a.type))}});
      levels.push_back({{"id", l.level_id}, {"column", l.column}, {"attributes", attrs}});
    }
    doc["dimensions"].push_back({{"id", d.dim_id}, {"path", d.path}, {"levels", levels}});
  }
  doc["measures"] = json::array();
  for (const auto &mb : m.measures)
    doc["measures"].push_back({{"id", mb.measure_id}, {"column", mb.column}, {"type", std::string(to_string(mb.type))}});
  return doc.dump(2) + "\n";
}

// --- ingestion ---------------------------------------------------------------

namespace {

struct PendingInstance {
  std::map<std::string, std::string> attributes;
  std::optional<std::string> parent;
  std::set<std::string> children;
};

bool typed_value_ok(AttributeType t, const std::string &v) {
  switch (t) {
  case AttributeType::String:
    return true;
  case AttributeType::Boolean:
    return v == "true" || v == "false";
  case AttributeType::Integer: {
    auto n = parse_number(v);
    return n && std::isfinite(*n) && *n == std::trunc(*n);
  }
  case AttributeType::Real: {
    auto n = parse_number(v);
    return n && std::isfinite(*n);
  }
  }
  return false;
}

} // namespace

Warehouse ingest(const CsvTable &table, const IngestionMapping &mapping) {
  check_mapping(mapping);
  std::map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < table.header.size(); ++c) column_of.emplace(table.header[c], c);
  auto column = [&](const std::string &name) {
    auto it = column_of.find(name);
    if (it == column_of.end()) throw Error("missing-column", "table has no column '" + name + "'", "header");
    return it->second;
  };
  // Resolve every binding up front so a missing column fails before any row.
  struct LevelCols {
    std::size_t id;
    std::vector<std::size_t> attrs;
  };
  std::vector<std::vector<LevelCols>> level_cols;
  for (const auto &d : mapping.dimensions) {
    level_cols.emplace_back();
    for (const auto &l : d.levels) {
      LevelCols lc{column(l.column), {}};
      for (const auto &a : l.attributes) lc.attrs.push_back(column(a.column));
      level_cols.back().push_back(std::move(lc));
    }
  }
  std::vector<std::size_t> measure_cols;
  for (const auto &m : mapping.measures) measure_cols.push_back(column(m.column));

  // pending[d][l]: member id -> collected data
  std::vector<std::vector<std::map<std::string, PendingInstance>>> pending(mapping.dimensions.size());
  for (std::size_t d = 0; d < mapping.dimensions.size(); ++d) pending[d].resize(mapping.dimensions[d].levels.size());

  Warehouse w;
  w.facts.fact_spec_id = mapping.fact_id;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    auto cell = [&](std::size_t c) -> const std::string & {
      if (c >= row.size()) throw Error("missing-value", where + " is short of column '" + table.header[c] + "'", where);
      return row[c];
    };
    auto at = [&](std::size_t c) { return where + ", column " + table.header[c]; };
    FactRow fact;
    for (std::size_t d = 0; d < mapping.dimensions.size(); ++d) {
      const auto &db = mapping.dimensions[d];
      for (std::size_t l = 0; l < db.levels.size(); ++l) {
        const LevelCols &lc = level_cols[d][l];
        const std::string &id = cell(lc.id);
        if (id.empty()) throw Error("missing-value", at(lc.id) + " is empty", at(lc.id));
        PendingInstance &inst = pending[d][l][id];
        const bool fresh = inst.attributes.empty();
        for (std::size_t a = 0; a < lc.attrs.size(); ++a) {
          const AttributeBinding &ab = db.levels[l].attributes[a];
          const std::string &value = cell(lc.attrs[a]);
          if (!typed_value_ok(ab.type, value))
            throw Error("bad-value",
                        at(lc.attrs[a]) + ": '" + value + "' is not a valid " + std::string(to_string(ab.type)) +
                            " for attribute '" + ab.name + "'",
                        at(lc.attrs[a]));
          if (fresh) {
            inst.attributes[ab.name] = value;
          } else if (inst.attributes.at(ab.name) != value) {
            throw Error("conflicting-attribute",
                        at(lc.attrs[a]) + ": member '" + id + "' of level '" + db.levels[l].level_id + "' has " +
                            ab.name + " '" + inst.attributes.at(ab.name) + "' earlier and '" + value + "' here",
                        at(lc.attrs[a]));
          }
        }
        if (l + 1 < db.levels.size()) {
          const std::size_t pc = level_cols[d][l + 1].id;
          const std::string &parent = cell(pc);
          if (parent.empty()) throw Error("missing-value", at(pc) + " is empty", at(pc));
          if (inst.parent && *inst.parent != parent)
            throw Error("conflicting-parent",
                        at(pc) + ": member '" + id + "' of level '" + db.levels[l].level_id + "' rolls up to '" +
                            *inst.parent + "' earlier and '" + parent + "' here",
                        at(pc));
          inst.parent = parent;
          pending[d][l + 1][parent].children.insert(id);
        }
        if (l == 0) fact.members[db.dim_id] = id;
      }
    }
    for (std::size_t m = 0; m < mapping.measures.size(); ++m) {
      const MeasureBinding &mb = mapping.measures[m];
      std::string text = cell(measure_cols[m]);
      const auto first = text.find_first_not_of(" \t");
      text = first == std::string::npos ? std::string() : text.substr(first, text.find_last_not_of(" \t") - first + 1);
      if (text.empty()) throw Error("missing-value", at(measure_cols[m]) + " is empty", at(measure_cols[m]));
      auto v = parse_number(text);
      if (!v || !std::isfinite(*v) || (mb.type == MeasureType::Integer && *v != std::trunc(*v)))
        throw Error("bad-number",
                    at(measure_cols[m]) + ": '" + text + "' is not a valid " + std::string(to_string(mb.type)) +
                        " for measure '" + mb.measure_id + "'",
                    at(measure_cols[m]));
      fact.measures[mb.measure_id] = *v;
    }
    w.facts.rows.push_back(std::move(fact));
  }

  w.model.facts = {mapping.fact_id, mapping.fact_path, {}, {}};
  for (const auto &mb : mapping.measures) w.model.facts.measures.push_back({mb.measure_id, mb.type});
  for (std::size_t d = 0; d < mapping.dimensions.size(); ++d) {
    const auto &db = mapping.dimensions[d];
    DimensionSpec spec{db.dim_id, db.path, {}};
    DimensionData data;
    data.dim_id = db.dim_id;
    for (std::size_t l = 0; l < db.levels.size(); ++l) {
      LevelSpec ls{db.levels[l].level_id, {}};
      for (const auto &ab : db.levels[l].attributes) ls.attributes.push_back({ab.name, ab.type});
      spec.levels.push_back(std::move(ls));
      LevelInstances li{db.levels[l].level_id, {}};
      for (auto &[id, p] : pending[d][l]) {
        Instance inst{id, std::move(p.attributes), std::move(p.parent), std::nullopt};
        if (l > 0) inst.drill_down = std::vector<std::string>(p.children.begin(), p.children.end());
        li.instances.push_back(std::move(inst));
      }
      data.levels.push_back(std::move(li));
    }
    w.model.dimensions.push_back(std::move(spec));
    w.model.facts.dimension_refs.push_back(db.dim_id);
    w.dimensions.push_back(std::move(data));
  }

  const ValidationReport report = validate_warehouse(w);
  if (!report.ok())
    throw Error("invalid-warehouse", "ingested warehouse fails validation: " + report.findings.front().message);
  return w;
}

// --- fixtures ------------------------------------------------------------------

namespace {

std::size_t draw(std::mt19937_64 &rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool chance(std::mt19937_64 &rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

// Fisher-Yates on raw engine output; std::shuffle's draws are
// implementation-defined, which would tie fixtures to one standard library.
template <class T> void shuffle(std::vector<T> &v, std::mt19937_64 &rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

// The transcription schema shared by clapi-small and mca-blocks.
IngestionMapping transcription_mapping() {
  IngestionMapping m;
  m.dimensions = {
      {"time-d", "dim-time.xml", {{"location-in-transcription", "location", {{"location", "location", AttributeType::String}}}}},
      {"speaker-d", "dim-speaker.xml", {{"speaker", "speaker", {{"sex", "sex", AttributeType::Boolean}}}}},
      {"transcription-d",
       "dim-transcript.xml",
       {{"token", "token", {{"term", "term", AttributeType::String}}},
        {"transcription", "transcription", {{"transcription-name", "transcription_name", AttributeType::String}}}}},
  };
  m.measures = {{"frequency", "frequency", MeasureType::Real}};
  return m;
}

const std::vector<std::string> kTranscriptionHeader{"location", "speaker",           "sex",      "token",
                                                    "term",     "transcription",     "transcription_name",
                                                    "frequency"};

FixtureSource clapi_small(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> locations{"begin", "middle", "end"};
  const std::vector<std::string> words{"hello", "well", "bye", "yes", "so", "okay", "right", "voila"};
  const std::size_t speakers = 3 + draw(rng, 3);
  std::vector<std::string> sex;
  for (std::size_t s = 0; s < speakers; ++s) sex.push_back(s < 2 ? (s ? "false" : "true") : (chance(rng, 0.5) ? "true" : "false"));
  struct Token {
    std::string id, term, transcription;
  };
  std::vector<Token> tokens;
  for (std::size_t t = 1; t <= 3; ++t) {
    std::vector<std::string> pool = words;
    shuffle(pool, rng);
    const std::size_t k = 3 + draw(rng, 2);
    for (std::size_t i = 0; i < k; ++i) tokens.push_back({pool[i] + "-tr" + std::to_string(t), pool[i], "tr" + std::to_string(t)});
  }
  FixtureSource src{{kTranscriptionHeader, {}}, transcription_mapping()};
  for (const auto &loc : locations)
    for (std::size_t s = 0; s < speakers; ++s)
      for (const auto &tok : tokens) {
        if (!chance(rng, 0.3)) continue;
        src.table.rows.push_back({loc, "spk" + std::to_string(s + 1), sex[s], tok.id, tok.term, tok.transcription,
                                  "transcription " + tok.transcription.substr(2), std::to_string(1 + draw(rng, 9))});
      }
  // Every declared member shows up in some fact.
  for (std::size_t s = 0; s < speakers; ++s)
    src.table.rows.push_back({locations[s % 3], "spk" + std::to_string(s + 1), sex[s], tokens[s % tokens.size()].id,
                              tokens[s % tokens.size()].term, tokens[s % tokens.size()].transcription,
                              "transcription " + tokens[s % tokens.size()].transcription.substr(2), "1"});
  for (const auto &tok : tokens)
    src.table.rows.push_back({locations[draw(rng, 3)], "spk1", sex[0], tok.id, tok.term, tok.transcription,
                              "transcription " + tok.transcription.substr(2), std::to_string(1 + draw(rng, 9))});
  return src;
}

// Tokens P01..P10 and locations L1..L8 are split into three hidden groups by a
// seeded shuffle; same-group cells are mostly full with large counts, other
// cells rarely full with small counts.
FixtureSource mca_blocks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> token_group{0, 0, 0, 0, 1, 1, 1, 2, 2, 2}, location_group{0, 0, 0, 1, 1, 1, 2, 2};
  shuffle(token_group, rng);
  shuffle(location_group, rng);
  auto token_id = [](std::size_t t) { return std::string(t + 1 < 10 ? "P0" : "P") + std::to_string(t + 1); };
  FixtureSource src{{kTranscriptionHeader, {}}, transcription_mapping()};
  std::vector<std::vector<bool>> full(10, std::vector<bool>(8, false));
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t l = 0; l < 8; ++l) full[t][l] = chance(rng, token_group[t] == location_group[l] ? 0.85 : 0.08);
  // Each token and location keeps at least one in-block cell.
  for (std::size_t t = 0; t < 10; ++t) {
    std::vector<std::size_t> mine;
    for (std::size_t l = 0; l < 8; ++l)
      if (location_group[l] == token_group[t]) mine.push_back(l);
    full[t][mine[draw(rng, mine.size())]] = true;
  }
  for (std::size_t l = 0; l < 8; ++l) {
    std::vector<std::size_t> mine;
    for (std::size_t t = 0; t < 10; ++t)
      if (token_group[t] == location_group[l]) mine.push_back(t);
    full[mine[draw(rng, mine.size())]][l] = true;
  }
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t l = 0; l < 8; ++l) {
      if (!full[t][l]) continue;
      const bool block = token_group[t] == location_group[l];
      const std::size_t speaker = draw(rng, 2);
      src.table.rows.push_back({"L" + std::to_string(l + 1), "spk" + std::to_string(speaker + 1), speaker ? "false" : "true",
                                token_id(t), token_id(t), "corpus", "corpus",
                                std::to_string(block ? 5 + draw(rng, 5) : 1 + draw(rng, 2))});
    }
  return src;
}

// 96 facts; the first quarter pins token "voila" at location "end" and is
// mostly spoken by women, the rest is drawn without that pairing.
FixtureSource rules_demo(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> locations{"begin", "middle", "end"};
  const std::vector<std::string> tokens{"hello", "well", "okay", "voila"};
  const std::vector<std::string> women{"ana", "eve", "ines"}, men{"bob", "carl", "dan"};
  FixtureSource src;
  src.table.header = {"location", "speaker", "sex", "token", "frequency"};
  src.mapping.dimensions = {
      {"time-d", "dim-time.xml", {{"location-in-transcription", "location", {{"location", "location", AttributeType::String}}}}},
      {"speaker-d",
       "dim-speaker.xml",
       {{"speaker", "speaker", {{"name", "speaker", AttributeType::String}}},
        {"sex", "sex", {{"sex", "sex", AttributeType::String}}}}},
      {"transcription-d", "dim-transcript.xml", {{"token", "token", {{"term", "token", AttributeType::String}}}}},
  };
  src.mapping.measures = {{"frequency", "frequency", MeasureType::Real}};
  for (std::size_t i = 0; i < 96; ++i) {
    std::string location, token;
    double p_woman = 0.45;
    if (i < 24) {
      location = "end", token = "voila", p_woman = 0.85;
    } else {
      do {
        location = locations[draw(rng, 3)];
        token = tokens[draw(rng, 4)];
      } while (location == "end" && token == "voila");
    }
    const bool woman = chance(rng, p_woman);
    const std::string speaker = woman ? women[draw(rng, 3)] : men[draw(rng, 3)];
    src.table.rows.push_back({location, speaker, woman ? "f" : "m", token, std::to_string(1 + draw(rng, 6))});
  }
  return src;
}

} // namespace

std::vector<std::string> fixture_names() { return {"clapi-small", "mca-blocks", "rules-demo"}; }

FixtureSource fixture_source(std::string_view name, std::uint64_t seed) {
  if (name == "clapi-small") return clapi_small(seed);
  if (name == "mca-blocks") return mca_blocks(seed);
  if (name == "rules-demo") return rules_demo(seed);
  throw Error("unknown-fixture", "unknown fixture '" + std::string(name) + "' (expected clapi-small, mca-blocks or rules-demo)");
}

Warehouse generate_fixture(std::string_view name, std::uint64_t seed) {
  const FixtureSource src = fixture_source(name, seed);
  return ingest(src.table, src.mapping);
}

} // namespace xdw

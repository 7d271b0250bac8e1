#include "xdw/evolution.hpp"

#include "xdw/error.hpp"
#include "xdw/xml.hpp"

#include <algorithm>
#include <set>

namespace xdw {

namespace {

// --- rule text lexer -------------------------------------------------------

bool word_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
         c == '.' || c == ':' || c == '@' || static_cast<unsigned char>(c) >= 0x80;
}

struct Token {
  enum Kind { Word, Quoted, Punct, End } kind = End;
  std::string text;
  int column = 0;
};

std::vector<Token> lex_line(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto column = [&](std::size_t at) { return static_cast<int>(at) + 1; };
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '\'' || c == '"') {
      const std::size_t start = i++;
      std::string text;
      for (;;) {
        if (i >= line.size()) {
          std::string loc = std::to_string(line_no) + ":" + std::to_string(column(start));
          throw Error("rule-syntax", "unterminated quoted value at " + loc, loc);
        }
        if (line[i] == '\\' && i + 1 < line.size()) {
          text += line[i + 1];
          i += 2;
        } else if (line[i] == c) {
          ++i;
          break;
        } else {
          text += line[i++];
        }
      }
      out.push_back({Token::Quoted, std::move(text), column(start)});
    } else if (word_char(c)) {
      const std::size_t start = i;
      while (i < line.size() && word_char(line[i])) ++i;
      out.push_back({Token::Word, std::string(line.substr(start, i - start)), column(start)});
    } else if (c == '(' || c == ')' || c == '{' || c == '}' || c == ',' || c == '=') {
      out.push_back({Token::Punct, std::string(1, c), column(i)});
      ++i;
    } else {
      std::string loc = std::to_string(line_no) + ":" + std::to_string(column(i));
      throw Error("rule-syntax", "unknown construct '" + std::string(1, c) + "' at " + loc, loc);
    }
  }
  out.push_back({Token::End, "", column(line.size())});
  return out;
}

class LineParser {
public:
  LineParser(std::vector<Token> tokens, int line_no) : toks_(std::move(tokens)), line_(line_no) {}

  const Token &peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::End; }

  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Word && peek(ahead).text == w;
  }
  bool is_punct(char p) const { return peek().kind == Token::Punct && peek().text[0] == p; }

  [[noreturn]] void fail(const std::string &what) const {
    std::string loc = std::to_string(line_) + ":" + std::to_string(peek().column);
    std::string found = at_end() ? "end of line" : "'" + peek().text + "'";
    throw Error("rule-syntax", what + " at " + loc + ", found " + found, loc);
  }

  void keyword(std::string_view w) {
    if (!is_word(w)) fail("expected '" + std::string(w) + "'");
    ++pos_;
  }

  void punct(char p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    ++pos_;
  }

  bool accept_punct(char p) {
    if (!is_punct(p)) return false;
    ++pos_;
    return true;
  }

  std::string name(const char *what) {
    if (peek().kind != Token::Word) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }

  std::string value() {
    if (peek().kind != Token::Word && peek().kind != Token::Quoted) fail("expected a value");
    return toks_[pos_++].text;
  }

  // "{" [ name { "," name } ] "}"
  std::vector<std::string> name_set(const char *what) {
    std::vector<std::string> out;
    punct('{');
    if (accept_punct('}')) return out;
    do out.push_back(name(what));
    while (accept_punct(','));
    punct('}');
    return out;
  }

  std::vector<std::string> value_set() {
    std::vector<std::string> out;
    punct('{');
    if (accept_punct('}')) return out;
    do out.push_back(value());
    while (accept_punct(','));
    punct('}');
    return out;
  }

  void finish() {
    if (!at_end()) fail("unexpected trailing input");
  }

  void skip() { ++pos_; }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

StructureRule parse_structure(LineParser &p) {
  StructureRule s;
  p.keyword("if");
  p.keyword("ConditionOn");
  p.punct('(');
  s.source_level = p.name("a source level id");
  p.punct(',');
  s.condition_attributes = p.name_set("an attribute name");
  p.punct(')');
  p.keyword("then");
  p.keyword("Generate");
  p.punct('(');
  s.target_level = p.name("a target level id");
  p.punct(',');
  s.target_attributes = p.name_set("an attribute name");
  p.punct(')');
  p.finish();
  return s;
}

DataRule parse_data(LineParser &p) {
  DataRule rule;
  // Optional "-" bullet and "(n)" label.
  if (p.is_word("-")) p.skip();
  if (p.is_punct('(')) {
    p.skip();
    p.name("a rule number");
    p.punct(')');
  }
  p.keyword("if");
  do {
    Clause clause;
    clause.attribute = p.name("an attribute name");
    if (p.is_word("in")) {
      p.skip();
      clause.op = Clause::Op::In;
      clause.values = p.value_set();
    } else if (p.is_word("not")) {
      p.skip();
      p.keyword("in");
      clause.op = Clause::Op::NotIn;
      clause.values = p.value_set();
    } else if (p.accept_punct('=')) {
      clause.op = Clause::Op::Equals;
      clause.values = {p.value()};
    } else {
      p.fail("expected 'in', 'not in' or '='");
    }
    rule.condition.clauses.push_back(std::move(clause));
  } while (p.is_word("and") && (p.skip(), true));
  p.keyword("then");
  do {
    std::string attr = p.name("a target attribute name");
    p.punct('=');
    std::string v;
    if (p.accept_punct('{')) {
      v = p.value();
      p.punct('}');
    } else {
      v = p.value();
    }
    if (!rule.target.emplace(attr, v).second) p.fail("target attribute '" + attr + "' bound twice");
  } while ((p.accept_punct(',') || (p.is_word("and") && (p.skip(), true))));
  p.finish();
  return rule;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_bare(std::string_view v) {
  if (v.empty() || v == "-" || v == "and" || v == "in" || v == "not" || v == "then" || v == "if") return false;
  return std::all_of(v.begin(), v.end(), word_char);
}

std::string quote(std::string_view v) {
  std::string out = "'";
  for (char c : v) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

std::string join_names(const std::vector<std::string> &names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

const std::string *instance_value(const Instance &inst, std::string_view attr) {
  if (attr == kInstanceIdAttribute) return &inst.id;
  auto it = inst.attributes.find(std::string(attr));
  return it == inst.attributes.end() ? nullptr : &it->second;
}

} // namespace

bool Condition::matches(const Instance &instance) const {
  for (const auto &clause : clauses) {
    const std::string *v = instance_value(instance, clause.attribute);
    const bool in = v && std::find(clause.values.begin(), clause.values.end(), *v) != clause.values.end();
    switch (clause.op) {
    case Clause::Op::In:
    case Clause::Op::Equals:
      if (!in) return false;
      break;
    case Clause::Op::NotIn:
      if (in) return false;
      break;
    }
  }
  return true;
}

RuleSet parse_rules(std::string_view text) {
  RuleSet rules;
  bool have_structure = false;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;

    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const std::string low = lower(body);
    if (low == "structure rule:" || low == "structure rules:" || low == "data rule:" || low == "data rules:") continue;
    if (low.rfind("dimension:", 0) == 0) {
      std::string_view id = trim(body.substr(10));
      if (!xml::is_name(id)) {
        std::string loc = std::to_string(line_no) + ":1";
        throw Error("rule-syntax", "bad dimension id at " + loc, loc);
      }
      rules.dim_id = std::string(id);
      continue;
    }

    LineParser p(lex_line(line, line_no), line_no);
    if (!have_structure) {
      rules.structure = parse_structure(p);
      have_structure = true;
    } else {
      rules.data.push_back(parse_data(p));
    }
  }
  if (!have_structure) {
    std::string loc = std::to_string(line_no) + ":1";
    throw Error("rule-syntax", "missing structure rule", loc);
  }
  return rules;
}

std::string format_rules(const RuleSet &rules) {
  std::string out;
  if (!rules.dim_id.empty()) out += "Dimension: " + rules.dim_id + "\n";
  const auto &s = rules.structure;
  out += "Structure rule:\n";
  out += "if ConditionOn(" + s.source_level + ", {" + join_names(s.condition_attributes) + "}) then Generate(" +
         s.target_level + ", {" + join_names(s.target_attributes) + "})\n";
  out += "Data rules:\n";
  for (std::size_t i = 0; i < rules.data.size(); ++i) {
    const auto &rule = rules.data[i];
    out += "- (" + std::to_string(i + 1) + ") if ";
    for (std::size_t c = 0; c < rule.condition.clauses.size(); ++c) {
      const auto &clause = rule.condition.clauses[c];
      if (c) out += " and ";
      out += clause.attribute;
      if (clause.op == Clause::Op::Equals) {
        out += " = " + quote(clause.values.at(0));
        continue;
      }
      out += clause.op == Clause::Op::In ? " in {" : " not in {";
      for (std::size_t v = 0; v < clause.values.size(); ++v) out += (v ? ", " : "") + quote(clause.values[v]);
      out += "}";
    }
    out += " then ";
    bool first = true;
    for (const auto &[attr, value] : rule.target) {
      if (!first) out += ", ";
      first = false;
      out += attr + "={" + (is_bare(value) ? value : quote(value)) + "}";
    }
    out += "\n";
  }
  return out;
}

std::string target_instance_id(const DataRule &rule) {
  if (rule.target.empty()) return {};
  const std::string &v = rule.target.begin()->second;
  if (v.empty()) return {};
  std::string id;
  for (char c : v) id += (word_char(c) && c != '@') ? c : '_';
  if (!xml::is_name(id)) id = "_" + id;
  return id;
}

std::string resolve_dimension(const RuleSet &rules, const WarehouseModel &model) {
  if (!rules.dim_id.empty()) {
    const auto *dim = model.find_dimension(rules.dim_id);
    return dim && dim->level_index(rules.structure.source_level) ? rules.dim_id : std::string{};
  }
  std::string found;
  for (const auto &dim : model.dimensions) {
    if (!dim.level_index(rules.structure.source_level)) continue;
    if (!found.empty()) return {};
    found = dim.id;
  }
  return found;
}

ValidationReport validate_ruleset(const RuleSet &rules, const Warehouse &w) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string message) {
    report.findings.push_back({Severity::Error, std::move(kind), std::move(message)});
  };
  const auto &s = rules.structure;

  if (rules.data.empty()) add("no-data-rules", "rule set has no data rules");
  if (s.target_attributes.empty()) add("no-target-attributes", "structure rule generates no attributes");
  if (!xml::is_name(s.target_level)) add("bad-level-id", "target level id '" + s.target_level + "' is not a name");
  for (const auto &a : s.target_attributes)
    if (!xml::is_name(a)) add("bad-attribute-name", "target attribute '" + a + "' is not a name");

  const DimensionSpec *dim = nullptr;
  if (!rules.dim_id.empty() && !w.model.find_dimension(rules.dim_id)) {
    add("unknown-dimension", "dimension '" + rules.dim_id + "' is not declared");
  } else {
    std::size_t owners = 0;
    for (const auto &d : w.model.dimensions) {
      if (!rules.dim_id.empty() && d.id != rules.dim_id) continue;
      if (d.level_index(s.source_level)) {
        dim = &d;
        ++owners;
      }
    }
    if (owners == 0) {
      add("missing-source-level", "source level '" + s.source_level + "' does not exist");
    } else if (owners > 1) {
      dim = nullptr;
      add("ambiguous-source-level", "source level '" + s.source_level + "' exists in several dimensions");
    }
  }

  const LevelSpec *source = nullptr;
  if (dim) {
    source = &dim->levels[*dim->level_index(s.source_level)];
    if (dim->level_index(s.target_level))
      add("target-level-exists", "level '" + s.target_level + "' already exists in dimension '" + dim->id + "'");
    for (const auto &a : s.condition_attributes)
      if (a != kInstanceIdAttribute && !source->find_attribute(a))
        add("undeclared-attribute", "condition attribute '" + a + "' is not declared on level '" + source->id + "'");
  }

  const std::set<std::string> cond_attrs(s.condition_attributes.begin(), s.condition_attributes.end());
  const std::set<std::string> target_attrs(s.target_attributes.begin(), s.target_attributes.end());
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < rules.data.size(); ++i) {
    const auto &rule = rules.data[i];
    const std::string label = "rule (" + std::to_string(i + 1) + ")";
    for (const auto &clause : rule.condition.clauses)
      if (!cond_attrs.count(clause.attribute))
        add("undeclared-attribute",
            label + " conditions on '" + clause.attribute + "', which the structure rule does not declare");
    for (const auto &a : s.target_attributes)
      if (!rule.target.count(a)) add("unbound-target-attribute", label + " does not bind '" + a + "'");
    for (const auto &[a, v] : rule.target)
      if (!target_attrs.count(a)) add("unknown-target-attribute", label + " binds undeclared attribute '" + a + "'");
    std::string id = target_instance_id(rule);
    if (id.empty()) {
      add("bad-target-id", label + " yields an empty instance id");
    } else if (auto [it, fresh] = ids.emplace(id, i); !fresh) {
      add("duplicate-target-instance", label + " and rule (" + std::to_string(it->second + 1) +
                                           ") both create instance '" + id + "'");
    }
  }

  const DimensionData *data = dim ? w.find_dimension_data(dim->id) : nullptr;
  const LevelInstances *members = data ? data->find_level(s.source_level) : nullptr;
  if (members) {
    std::vector<std::size_t> hits(rules.data.size(), 0);
    for (const auto &inst : members->instances) {
      std::size_t n = 0;
      for (std::size_t i = 0; i < rules.data.size(); ++i)
        if (rules.data[i].condition.matches(inst)) {
          ++n;
          ++hits[i];
        }
      if (n == 0) add("incomplete", "incomplete: " + inst.id + " unmatched");
      else if (n == 2) add("ambiguous", "ambiguous: " + inst.id + " matched twice");
      else if (n > 2) add("ambiguous", "ambiguous: " + inst.id + " matched " + std::to_string(n) + " times");
    }
    for (std::size_t i = 0; i < rules.data.size(); ++i)
      if (hits[i] == 0)
        add("empty-rule", "rule (" + std::to_string(i + 1) + ") matches no instance of '" + s.source_level + "'");
  }
  return report;
}

EvolutionResult apply_ruleset(const Warehouse &w, const RuleSet &rules) {
  ValidationReport report = validate_ruleset(rules, w);
  for (const auto &f : report.findings)
    if (f.severity == Severity::Error) throw Error("invalid-rules", f.message);

  const auto &s = rules.structure;
  EvolutionResult result{w, {}};
  Warehouse &out = result.warehouse;
  const std::string dim_id = resolve_dimension(rules, w.model);

  auto spec_it = std::find_if(out.model.dimensions.begin(), out.model.dimensions.end(),
                              [&](const DimensionSpec &d) { return d.id == dim_id; });
  auto data_it = std::find_if(out.dimensions.begin(), out.dimensions.end(),
                              [&](const DimensionData &d) { return d.dim_id == dim_id; });
  DimensionSpec &spec = *spec_it;
  DimensionData &data = *data_it;
  const std::size_t src = *spec.level_index(s.source_level);
  const bool has_parent = src + 1 < spec.levels.size();

  LevelSpec level{s.target_level, {}};
  for (const auto &a : s.target_attributes) level.attributes.push_back({a, AttributeType::String});
  spec.levels.insert(spec.levels.begin() + static_cast<std::ptrdiff_t>(src + 1), std::move(level));

  LevelInstances created{s.target_level, {}};
  auto &source = data.levels[src].instances;
  for (const auto &rule : rules.data) {
    Instance inst{target_instance_id(rule), rule.target, std::nullopt, std::vector<std::string>{}};
    std::optional<std::optional<std::string>> parent;
    for (auto &child : source) {
      if (!rule.condition.matches(child)) continue;
      if (has_parent) {
        if (parent && *parent != child.roll_up)
          throw Error("non-homogeneous-parent", "instance '" + inst.id + "' would group children of different parents ('" +
                                                    parent->value_or("") + "', '" + child.roll_up.value_or("") + "')");
        parent = child.roll_up;
      }
      inst.drill_down->push_back(child.id);
    }
    if (parent) inst.roll_up = *parent;
    result.summary.groups.emplace_back(inst.id, *inst.drill_down);
    created.instances.push_back(std::move(inst));
  }
  for (auto &child : source)
    for (const auto &inst : created.instances)
      if (rules.data[static_cast<std::size_t>(&inst - created.instances.data())].condition.matches(child))
        child.roll_up = inst.id;

  if (has_parent) {
    for (auto &p : data.levels[src + 1].instances) {
      std::vector<std::string> children;
      for (const auto &inst : created.instances)
        if (inst.roll_up == p.id) children.push_back(inst.id);
      p.drill_down = std::move(children);
    }
  }
  data.levels.insert(data.levels.begin() + static_cast<std::ptrdiff_t>(src + 1), std::move(created));

  RuleSet resolved = rules;
  resolved.dim_id = dim_id;
  result.summary.dim_id = dim_id;
  result.summary.source_level = s.source_level;
  result.summary.new_level = s.target_level;
  result.summary.position = src + 1;
  result.summary.rules_text = format_rules(resolved);
  return result;
}

} // namespace xdw

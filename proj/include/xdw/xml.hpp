#pragma once

// Minimal XML document model: elements, attributes and character data.
// Enough for the warehouse documents; no DTD, no namespaces, no processing
// instructions other than the leading declaration.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xdw::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes; // document order
  std::vector<Element> children;
  std::string text; // concatenated, whitespace-trimmed character data
  int line = 0;
  int column = 0;

  const std::string *attribute(std::string_view key) const;
  /// Throws xdw::Error("missing-attribute") naming `context` and the element position.
  const std::string &required(std::string_view key, std::string_view context) const;
  std::string where() const;
};

/// Parse a complete document. Throws xdw::Error with code "malformed-xml"
/// and a "line:column" location on any well-formedness violation.
Element parse(std::string_view text);

/// Serialize with two-space indentation and a UTF-8 declaration.
std::string write(const Element &root);

std::string escape(std::string_view raw);

/// True when `s` is a valid XML Name (ASCII subset).
bool is_name(std::string_view s);

} // namespace xdw::xml

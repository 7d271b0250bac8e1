#include "xdw/xml.hpp"

#include "xdw/error.hpp"

#include <cstdint>

namespace xdw::xml {

namespace {

bool name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool name_char(unsigned char c) {
  return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string &out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

class Parser {
public:
  explicit Parser(std::string_view text) : src_(text) {}

  Element document() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") advance(3);
    if (starts_with("<?xml")) declaration();
    misc();
    if (at_end() || peek() != '<') fail("expected root element");
    Element root = element();
    misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  [[noreturn]] void fail(const std::string &what) const { fail_at(line_, col_, what); }

  [[noreturn]] void fail_at(int line, int col, const std::string &what) const {
    std::string loc = std::to_string(line) + ":" + std::to_string(col);
    throw Error("malformed-xml", "malformed XML at " + loc + ": " + what, loc);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    advance(s.size());
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) advance();
  }

  void declaration() {
    advance(5);
    auto close = src_.find("?>", pos_);
    auto gt = src_.find('>', pos_);
    if (close == std::string_view::npos || gt < close) fail("XML declaration must end with '?>'");
    advance(close + 2 - pos_);
  }

  void comment() {
    advance(4);
    auto end = src_.find("--", pos_);
    if (end == std::string_view::npos) fail("unterminated comment");
    advance(end - pos_);
    if (!starts_with("-->")) fail("'--' not allowed inside comment");
    advance(3);
  }

  void misc() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        comment();
      } else if (starts_with("<!DOCTYPE")) {
        fail("DOCTYPE is not supported");
      } else if (starts_with("<?")) {
        fail("processing instruction not supported");
      } else {
        return;
      }
    }
  }

  std::string name() {
    if (at_end() || !name_start(static_cast<unsigned char>(peek()))) fail("expected a name");
    std::size_t start = pos_;
    while (!at_end() && name_char(static_cast<unsigned char>(peek()))) advance();
    return std::string(src_.substr(start, pos_ - start));
  }

  void reference(std::string &out) {
    const int line = line_, col = col_;
    advance(); // '&'
    auto semi = src_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 10) fail_at(line, col, "unterminated entity reference");
    std::string_view ent = src_.substr(pos_, semi - pos_);
    if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "amp") out += '&';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (ent.size() > 1 && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent[1] == 'x';
      std::string_view digits = ent.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      append_utf8(out, cp);
    } else {
      fail_at(line, col, "unknown entity '&" + std::string(ent) + ";'");
    }
    advance(semi + 1 - pos_);
  }

  std::string attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail("attribute value must be quoted");
    char quote = peek();
    advance();
    std::string out;
    for (;;) {
      if (at_end()) fail("unterminated attribute value");
      char c = peek();
      if (c == quote) {
        advance();
        return out;
      }
      if (c == '<') fail("'<' not allowed in attribute value");
      if (c == '&') {
        reference(out);
      } else {
        out += c;
        advance();
      }
    }
  }

  Element element() {
    Element el;
    el.line = line_;
    el.column = col_;
    expect("<");
    el.name = name();
    for (;;) {
      bool had_space = !at_end() && is_space(peek());
      skip_space();
      if (at_end()) fail("unterminated start tag <" + el.name + ">");
      if (starts_with("/>")) {
        advance(2);
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      if (!had_space) fail("expected whitespace before attribute");
      const int line = line_, col = col_;
      std::string key = name();
      skip_space();
      expect("=");
      skip_space();
      std::string value = attribute_value();
      if (el.attribute(key)) fail_at(line, col, "duplicate attribute '" + key + "'");
      el.attributes.emplace_back(std::move(key), std::move(value));
    }
    std::string text;
    for (;;) {
      if (at_end()) fail("missing end tag </" + el.name + ">");
      if (starts_with("</")) {
        const int line = line_, col = col_;
        advance(2);
        std::string closing = name();
        if (closing != el.name)
          fail_at(line, col, "end tag </" + closing + "> does not match <" + el.name + ">");
        skip_space();
        expect(">");
        break;
      }
      if (starts_with("<!--")) {
        comment();
      } else if (starts_with("<![CDATA[")) {
        advance(9);
        auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        text.append(src_.substr(pos_, end - pos_));
        advance(end + 3 - pos_);
      } else if (starts_with("<?")) {
        fail("processing instruction not supported");
      } else if (peek() == '<') {
        el.children.push_back(element());
      } else if (peek() == '&') {
        reference(text);
      } else {
        text += peek();
        advance();
      }
    }
    el.text = trim(text);
    return el;
  }
};

void write_element(const Element &el, int depth, std::string &out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += el.name;
  for (const auto &[k, v] : el.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v);
    out += '"';
  }
  if (el.children.empty() && el.text.empty()) {
    out += " />\n";
    return;
  }
  out += '>';
  if (el.children.empty()) {
    out += escape(el.text);
  } else {
    out += '\n';
    if (!el.text.empty()) {
      out.append(static_cast<std::size_t>(depth + 1) * 2, ' ');
      out += escape(el.text);
      out += '\n';
    }
    for (const auto &child : el.children) write_element(child, depth + 1, out);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
  }
  out += "</";
  out += el.name;
  out += ">\n";
}

} // namespace

const std::string *Element::attribute(std::string_view key) const {
  for (const auto &[k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

const std::string &Element::required(std::string_view key, std::string_view context) const {
  if (const auto *v = attribute(key)) return *v;
  throw Error("missing-attribute",
              std::string(context) + ": <" + name + "> at " + where() + " lacks required attribute '" +
                  std::string(key) + "'",
              where());
}

std::string Element::where() const { return std::to_string(line) + ":" + std::to_string(column); }

Element parse(std::string_view text) { return Parser(text).document(); }

std::string write(const Element &root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  write_element(root, 0, out);
  return out;
}

std::string escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += c;
    }
  }
  return out;
}

bool is_name(std::string_view s) {
  if (s.empty() || !name_start(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!name_char(static_cast<unsigned char>(c))) return false;
  return true;
}

} // namespace xdw::xml

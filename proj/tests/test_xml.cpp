#include "xdw/error.hpp"
#include "xdw/xml.hpp"

#include <gtest/gtest.h>

namespace xdw {
namespace {

std::string error_code(std::string_view text) {
  try {
    xml::parse(text);
  } catch (const Error &e) {
    return e.code() + "@" + e.location();
  }
  return "ok";
}

TEST(Xml, ParsesElementsAttributesAndText) {
  auto root = xml::parse("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<!-- c -->\n"
                         "<a x=\"1\" y='two'>\n  <b/>\n  <c k=\"&lt;&amp;&#65;&#x42;\">hi &amp; bye</c>\n</a>\n");
  EXPECT_EQ(root.name, "a");
  ASSERT_EQ(root.attributes.size(), 2u);
  EXPECT_EQ(*root.attribute("y"), "two");
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(root.children[1].text, "hi & bye");
  EXPECT_EQ(*root.children[1].attribute("k"), "<&AB");
  EXPECT_EQ(root.children[1].line, 5);
}

TEST(Xml, RejectsMalformedDocumentsWithLocation) {
  EXPECT_EQ(error_code("<a><b></a>"), "malformed-xml@1:7");
  EXPECT_EQ(error_code("<a x=1/>"), "malformed-xml@1:6");
  EXPECT_EQ(error_code("<a x=\"1\" x=\"2\"/>"), "malformed-xml@1:10");
  EXPECT_EQ(error_code("<a/><b/>"), "malformed-xml@1:5");
  EXPECT_EQ(error_code("<a>"), "malformed-xml@1:4");
  EXPECT_EQ(error_code("<a>&nbsp;</a>"), "malformed-xml@1:4");
  // Declaration closed by '>' instead of '?>'.
  EXPECT_EQ(error_code("<?xml version=\"1.0\" encoding=\"utf-8\">\n<a/>"), "malformed-xml@1:6");
  // Parenthesised, unquoted attribute list.
  EXPECT_NE(error_code("<i D=(\"a\",\"b\")/>"), "ok");
}

TEST(Xml, WriteThenParseIsStable) {
  xml::Element root{.name = "r", .attributes = {{"q", "a\"<b>'&"}}};
  root.children.push_back({.name = "leaf", .text = "x < y"});
  root.children.push_back({.name = "empty"});
  const std::string text = xml::write(root);
  EXPECT_EQ(text.rfind("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n", 0), 0u);
  auto back = xml::parse(text);
  EXPECT_EQ(*back.attribute("q"), "a\"<b>'&");
  EXPECT_EQ(back.children[0].text, "x < y");
  EXPECT_EQ(xml::write(back), text);
}

TEST(Xml, NameTokens) {
  EXPECT_TRUE(xml::is_name("group-of-location"));
  EXPECT_TRUE(xml::is_name("_x.1"));
  EXPECT_FALSE(xml::is_name("1abc"));
  EXPECT_FALSE(xml::is_name("a b"));
  EXPECT_FALSE(xml::is_name(""));
}

} // namespace
} // namespace xdw

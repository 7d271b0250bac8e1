#include "support/fixtures.hpp"
#include "support/random_warehouse.hpp"

#include "xdw/error.hpp"
#include "xdw/warehouse.hpp"

#include <gtest/gtest.h>

#include <functional>

namespace xdw {
namespace {

using test::data_dir;

std::string code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  return "ok";
}

TEST(ParseModel, ClapiModelMirrorsDocument) {
  const auto model = parse_model(read_file(data_dir() / "clapi" / "dw-model.xml"));
  ASSERT_EQ(model.dimensions.size(), 3u);
  EXPECT_EQ(model.dimensions[0].id, "time-d");
  EXPECT_EQ(model.dimensions[0].path, "dim-time.xml");
  EXPECT_EQ(model.dimensions[0].levels.size(), 1u);
  EXPECT_EQ(model.dimensions[0].levels[0].id, "location-in-transcription");
  EXPECT_EQ(model.dimensions[1].id, "speaker-d");
  EXPECT_EQ(model.dimensions[1].levels.size(), 1u);
  EXPECT_EQ(model.dimensions[1].levels[0].attributes[0], (AttributeSpec{"sex", AttributeType::Boolean}));
  EXPECT_EQ(model.dimensions[2].id, "transcription-d");
  ASSERT_EQ(model.dimensions[2].levels.size(), 2u);
  EXPECT_EQ(model.dimensions[2].levels[0].id, "token");
  EXPECT_EQ(model.dimensions[2].levels[1].id, "transcription");
  EXPECT_EQ(model.facts.id, "facts");
  EXPECT_EQ(model.facts.path, "facts.xml");
  ASSERT_EQ(model.facts.measures.size(), 1u);
  EXPECT_EQ(model.facts.measures[0], (MeasureSpec{"frequency", MeasureType::Real}));
  EXPECT_EQ(model.facts.dimension_refs, (std::vector<std::string>{"time-d", "speaker-d", "transcription-d"}));
}

TEST(ParseModel, GroupedModelAddsSecondTimeLevel) {
  const auto model = parse_model(read_file(data_dir() / "clapi_grouped" / "dw-model.xml"));
  const auto &time = model.dimensions[0];
  ASSERT_EQ(time.levels.size(), 2u);
  EXPECT_EQ(time.levels[1].id, "group-of-location-in-transcription");
  EXPECT_EQ(time.levels[1].attributes[0], (AttributeSpec{"location-group", AttributeType::String}));
  auto base = parse_model(read_file(data_dir() / "clapi" / "dw-model.xml"));
  base.dimensions[0].levels.push_back(time.levels[1]);
  EXPECT_EQ(base, model);
}

TEST(ParseModel, MinimalSingletonModel) {
  const auto model = parse_model(R"(<DW-model>
    <dimension id="d" path="d.xml"><Level id="l"><attribute name="a" type="integer"/></Level></dimension>
    <FactDoc id="f" path="f.xml"><measure id="m" type="integer"/><dimension idref="d"/></FactDoc>
  </DW-model>)");
  EXPECT_EQ(model.dimensions.size(), 1u);
  EXPECT_EQ(model.facts.measures.size(), 1u);
}

TEST(ParseModel, ErrorsNameTheProblem) {
  EXPECT_EQ(code_of([] { parse_model("<DW-model><dimension id='d'/></DW-model>"); }), "missing-attribute");
  EXPECT_EQ(code_of([] { parse_model("<DW-model><cube/></DW-model>"); }), "unknown-element");
  EXPECT_EQ(code_of([] { parse_model("<DW-model><dimension id='d' path='a'/><dimension id='d' path='b'/>"
                                     "<FactDoc id='f' path='f'/></DW-model>"); }),
            "duplicate-id");
  EXPECT_EQ(code_of([] { parse_model("<DW-model><dimension id='d' path='a'></DW-model>"); }), "malformed-xml");
  try {
    parse_model("<DW-model>\n  <dimension path='a'/>\n</DW-model>");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.location(), "2:3");
    EXPECT_NE(std::string(e.what()).find("'id'"), std::string::npos);
  }
}

TEST(ParseDimension, GroupedTimeDimensionLinks) {
  const auto model = parse_model(read_file(data_dir() / "clapi_grouped" / "dw-model.xml"));
  const auto data = parse_dimension(read_file(data_dir() / "clapi_grouped" / "dim-time.xml"), model.dimensions[0]);
  ASSERT_EQ(data.levels.size(), 2u);
  const auto &loc = data.levels[0];
  ASSERT_EQ(loc.instances.size(), 3u);
  EXPECT_EQ(loc.find("begin")->roll_up, "extreme");
  EXPECT_EQ(loc.find("middle")->roll_up, "middle");
  EXPECT_EQ(loc.find("end")->roll_up, "extreme");
  EXPECT_EQ(loc.find("end")->attributes.at("location"), "end");
  const auto &grp = data.levels[1];
  EXPECT_EQ(grp.find("extreme")->drill_down, (std::vector<std::string>{"begin", "end"}));
  EXPECT_EQ(grp.find("extreme")->attributes.at("location-group"), "extreme");
  EXPECT_TRUE(grp.find("middle") != nullptr);
}

TEST(ParseDimension, FlatDimensionAndErrors) {
  DimensionSpec spec{"d", "d.xml", {{"l", {{"a", AttributeType::String}}}}};
  auto data = parse_dimension("<dimension dim-id='d'><Level id='l'><Instance id='x'>"
                              "<attribute id='a' value='1'/></Instance></Level></dimension>",
                              spec);
  EXPECT_FALSE(data.levels[0].instances[0].roll_up);
  EXPECT_FALSE(data.levels[0].instances[0].drill_down);
  EXPECT_EQ(code_of([&] { parse_dimension("<dimension dim-id='e'/>", spec); }), "dim-id-mismatch");
  EXPECT_EQ(code_of([&] { parse_dimension("<dimension dim-id='d'><Level id='z'/></dimension>", spec); }),
            "undeclared-level");
  EXPECT_EQ(code_of([&] {
              parse_dimension("<dimension dim-id='d'><Level id='l'><Instance id='x'>"
                              "<attribute id='b' value='1'/></Instance></Level></dimension>",
                              spec);
            }),
            "undeclared-attribute");
  // A dangling Roll-up parses; validation reports it.
  EXPECT_EQ(code_of([&] {
              parse_dimension("<dimension dim-id='d'><Level id='l'><Instance id='x' Roll-up='nope'/></Level></dimension>",
                              spec);
            }),
            "ok");
}

TEST(ParseFacts, RowsAndErrors) {
  const auto model = parse_model(read_file(data_dir() / "clapi" / "dw-model.xml"));
  const auto facts = parse_facts(read_file(data_dir() / "clapi" / "facts.xml"), model.facts);
  ASSERT_EQ(facts.rows.size(), 4u);
  EXPECT_EQ(facts.rows[0].measures.at("frequency"), 2.0);
  EXPECT_EQ(facts.rows[3].members.at("transcription-d"), "bye");

  EXPECT_TRUE(parse_facts("<FactDoc id='facts'/>", model.facts).rows.empty());

  const std::string missing = R"(<FactDoc id="facts">
    <fact><measure idref="frequency" value="1"/><dimension idref="time-d" instance="begin"/>
      <dimension idref="transcription-d" instance="hello"/></fact>
  </FactDoc>)";
  try {
    parse_facts(missing, model.facts);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "missing-binding");
    EXPECT_NE(std::string(e.what()).find("fact 0"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("speaker-d"), std::string::npos);
  }
  EXPECT_EQ(code_of([&] {
              parse_facts("<FactDoc><fact><measure idref='frequency' value='abc'/></fact></FactDoc>", model.facts);
            }),
            "bad-number");
}

TEST(Serialize, ClapiRoundTripsForAllDocumentKinds) {
  const Warehouse w = load_warehouse(data_dir() / "clapi");
  const auto docs = serialize_warehouse(w);
  ASSERT_EQ(docs.size(), 5u);
  EXPECT_EQ(docs[0].file_name, "dw-model.xml");
  EXPECT_EQ(parse_model(docs[0].text), w.model);
  // The model writer reproduces the hand-written document byte for byte.
  EXPECT_EQ(docs[0].text, read_file(data_dir() / "clapi" / "dw-model.xml"));
  test::TempDir dir("roundtrip");
  write_warehouse(w, dir.path());
  EXPECT_EQ(load_warehouse(dir.path()), w);
}

TEST(Serialize, GroupedDimensionRoundTrip) {
  const auto model = parse_model(read_file(data_dir() / "clapi_grouped" / "dw-model.xml"));
  const auto data = parse_dimension(read_file(data_dir() / "clapi_grouped" / "dim-time.xml"), model.dimensions[0]);
  EXPECT_EQ(parse_dimension(serialize_dimension(data), model.dimensions[0]), data);
  EXPECT_NE(serialize_dimension(data).find("Drill-Down=\"begin end\""), std::string::npos);
}

TEST(Serialize, EmptyFactTable) {
  FactTable t{"facts", {}};
  const std::string text = serialize_facts(t);
  EXPECT_NE(text.find("<FactDoc id=\"facts\" />"), std::string::npos);
  FactSpec spec{"facts", "facts.xml", {{"m", MeasureType::Real}}, {"d"}};
  EXPECT_TRUE(parse_facts(text, spec).rows.empty());
}

TEST(Serialize, NumbersRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0, 1e21})
    EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Serialize, RoundTripPropertyOnRandomWarehouses) {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    test::RandomWarehouseOptions opt;
    opt.max_facts = 60;
    const Warehouse w = test::random_warehouse(seed, opt);
    ASSERT_TRUE(validate_warehouse(w).findings.empty()) << "seed " << seed;
    Warehouse back;
    const auto docs = serialize_warehouse(w);
    back.model = parse_model(docs[0].text);
    for (std::size_t i = 0; i < back.model.dimensions.size(); ++i)
      back.dimensions.push_back(parse_dimension(docs[1 + i].text, back.model.dimensions[i]));
    back.facts = parse_facts(docs.back().text, back.model.facts);
    ASSERT_EQ(back, w) << "seed " << seed;
  }
}

TEST(Hierarchy, RollUpChainsReachCoarsestInLevelCountMinusOneSteps) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Warehouse w = test::random_warehouse(seed, {.max_facts = 0});
    for (const auto &data : w.dimensions) {
      const std::size_t L = data.levels.size();
      for (const auto &leaf : data.levels[0].instances) {
        std::set<std::string> visited{leaf.id};
        std::optional<std::string> cur = leaf.roll_up;
        std::size_t steps = 0;
        while (cur) {
          ++steps;
          ASSERT_LT(steps, L);
          ASSERT_TRUE(visited.insert(*cur).second);
          cur = data.levels[steps].find(*cur)->roll_up;
        }
        EXPECT_EQ(steps, L - 1);
      }
    }
  }
}

// --- validation ----------------------------------------------------------

class Mutation : public ::testing::Test {
protected:
  Warehouse w = load_warehouse(data_dir() / "clapi");
  Instance &inst(std::size_t dim, std::size_t level, std::string_view id) {
    for (auto &i : w.dimensions[dim].levels[level].instances)
      if (i.id == id) return i;
    throw std::logic_error("no instance");
  }
  void expect_single(std::string_view kind) {
    const auto report = validate_warehouse(w);
    ASSERT_EQ(report.findings.size(), 1u) << (report.findings.empty() ? "" : report.findings[0].kind);
    EXPECT_EQ(report.findings[0].kind, kind) << report.findings[0].message;
  }
};

TEST_F(Mutation, ValidFixtureHasNoFindings) { EXPECT_TRUE(validate_warehouse(w).findings.empty()); }

TEST_F(Mutation, AsymmetricLink) {
  inst(2, 1, "tr1").drill_down = std::vector<std::string>{"hello"};
  expect_single("asymmetric-link");
  EXPECT_NE(validate_warehouse(w).findings[0].message.find("asymmetric hierarchy link"), std::string::npos);
}

TEST_F(Mutation, AsymmetricLinkFromParentSide) {
  inst(2, 0, "bye").roll_up = "tr2";
  inst(2, 1, "tr2").drill_down = std::vector<std::string>{"well", "bye"};
  expect_single("asymmetric-link");
}

TEST_F(Mutation, DanglingFactReference) {
  w.facts.rows[1].members["time-d"] = "nowhere";
  expect_single("dangling-fact-reference");
}

TEST_F(Mutation, DanglingRollUp) {
  inst(2, 0, "bye").roll_up = "ghost";
  inst(2, 1, "tr1").drill_down = std::vector<std::string>{"hello"};
  expect_single("dangling-roll-up");
}

TEST_F(Mutation, MissingRollUp) {
  inst(2, 0, "bye").roll_up.reset();
  expect_single("missing-roll-up");
}

TEST_F(Mutation, DanglingDrillDown) {
  inst(2, 1, "tr1").drill_down->push_back("ghost");
  expect_single("dangling-drill-down");
}

TEST_F(Mutation, MissingDrillDown) {
  inst(2, 1, "tr2").drill_down.reset();
  expect_single("missing-drill-down");
}

TEST_F(Mutation, DrillDownAtFinest) {
  inst(0, 0, "begin").drill_down = std::vector<std::string>{"x"};
  expect_single("drill-down-at-finest");
}

TEST_F(Mutation, RollUpBeyondCoarsest) {
  inst(2, 1, "tr1").roll_up = "tr2";
  expect_single("roll-up-beyond-coarsest");
}

TEST_F(Mutation, SelfRollUpIsOnlyAWarning) {
  inst(2, 1, "tr1").roll_up = "tr1";
  expect_single("self-roll-up");
  EXPECT_TRUE(validate_warehouse(w).ok());
}

TEST_F(Mutation, DuplicateInstance) {
  w.dimensions[1].levels[0].instances.push_back(inst(1, 0, "spk2"));
  expect_single("duplicate-instance");
}

TEST_F(Mutation, UndeclaredAttribute) {
  inst(1, 0, "spk1").attributes["age"] = "40";
  expect_single("undeclared-attribute");
}

TEST_F(Mutation, LevelMismatch) {
  std::swap(w.dimensions[2].levels[0], w.dimensions[2].levels[1]);
  expect_single("level-mismatch");
}

TEST_F(Mutation, MissingDimensionData) {
  w.dimensions.erase(w.dimensions.begin() + 1);
  expect_single("missing-dimension-data");
}

TEST_F(Mutation, UnexpectedDimensionData) {
  w.dimensions.push_back({"extra-d", {}});
  expect_single("unexpected-dimension-data");
}

TEST_F(Mutation, MissingMeasureBinding) {
  w.facts.rows[2].measures.clear();
  expect_single("missing-measure-binding");
}

TEST_F(Mutation, MissingDimensionBinding) {
  w.facts.rows[2].members.erase("speaker-d");
  expect_single("missing-dimension-binding");
}

TEST_F(Mutation, DuplicateDimensionId) {
  w.model.dimensions.push_back(w.model.dimensions[1]);
  expect_single("duplicate-dimension-id");
}

TEST_F(Mutation, EmptyPath) {
  w.model.dimensions[0].path.clear();
  expect_single("empty-path");
}

TEST_F(Mutation, NoLevels) {
  w.model.dimensions[0].levels.clear();
  expect_single("no-levels");
}

TEST_F(Mutation, DuplicateLevelId) {
  w.model.dimensions[2].levels[1].id = "token";
  expect_single("duplicate-level-id");
}

TEST_F(Mutation, NoAttributes) {
  w.model.dimensions[0].levels[0].attributes.clear();
  expect_single("no-attributes");
}

TEST_F(Mutation, DuplicateAttribute) {
  auto &attrs = w.model.dimensions[0].levels[0].attributes;
  attrs.push_back(attrs[0]);
  expect_single("duplicate-attribute");
}

TEST_F(Mutation, NoMeasures) {
  w.model.facts.measures.clear();
  expect_single("no-measures");
}

TEST_F(Mutation, DuplicateMeasure) {
  w.model.facts.measures.push_back(w.model.facts.measures[0]);
  expect_single("duplicate-measure");
}

TEST_F(Mutation, NoDimensionRefs) {
  w.model.facts.dimension_refs.clear();
  expect_single("no-dimension-refs");
}

TEST_F(Mutation, DuplicateDimensionRef) {
  w.model.facts.dimension_refs.push_back("time-d");
  expect_single("duplicate-dimension-ref");
}

TEST_F(Mutation, UnknownDimensionRef) {
  w.model.facts.dimension_refs.push_back("ghost-d");
  expect_single("unknown-dimension-ref");
}

TEST(Validate, VerbatimGroupedTimeDocumentFlagsTopLevelQuirks) {
  Warehouse w = load_warehouse(data_dir() / "clapi");
  w.model = parse_model(read_file(data_dir() / "clapi_grouped" / "dw-model.xml"));
  w.dimensions[0] = parse_dimension(read_file(data_dir() / "clapi_grouped" / "dim-time.xml"), w.model.dimensions[0]);
  const auto report = validate_warehouse(w);
  // Coarse "middle" carries a self Roll-up and no Drill-Down in the source document.
  EXPECT_EQ(report.count("self-roll-up"), 1u);
  EXPECT_EQ(report.count("missing-drill-down"), 1u);
  EXPECT_EQ(report.findings.size(), 2u);
}

TEST(Load, MissingDocumentNamesFile) {
  test::TempDir dir("load");
  write_file(dir.path() / "dw-model.xml", read_file(data_dir() / "clapi" / "dw-model.xml"));
  try {
    load_warehouse(dir.path());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "missing-document");
    EXPECT_NE(std::string(e.what()).find("dim-time.xml"), std::string::npos);
  }
}

} // namespace
} // namespace xdw

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmf/datasets.hpp"

using namespace bmf;

namespace {

BinarizationRecipe recipe(std::vector<ColumnRule> rules) {
  BinarizationRecipe r;
  r.rules = std::move(rules);
  return r;
}

ColumnRule rule(RuleKind kind, std::string name) {
  ColumnRule c;
  c.kind = kind;
  c.name = std::move(name);
  return c;
}

}  // namespace

TEST_CASE("parse_table with quotes and blank lines") {
  std::istringstream in("a,\"b,c\",d\n\n1,2,3\n");
  const auto t = parse_table(in, ',');
  REQUIRE(t.size() == 2);
  CHECK(t[0][1] == "b,c");
  CHECK(t[1][2] == "3");
}

TEST_CASE("ragged rows name the line") {
  std::istringstream in("1,2,3\n4,5\n");
  try {
    parse_table(in, ',');
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("binarization rules") {
  const RawTable t = {{"x", "1", "red", "3"},
                      {"y", "0", "blue", "5"},
                      {"z", "?", "red", "4"},
                      {"w", "1", "?", "9"}};
  auto oh = rule(RuleKind::one_hot, "colour");
  oh.categories = {"blue", "red"};
  const auto x = binarize(t, recipe({rule(RuleKind::drop, "id"),
                                     rule(RuleKind::passthrough_binary, "flag"),
                                     oh, rule(RuleKind::median_split, "n")}));
  // median 4.5 splits into <= and > columns
  CHECK(x == BinaryMatrix::from_rows({{1, 0, 1, 1, 0},
                                      {0, 1, 0, 0, 1},
                                      {0, 0, 1, 1, 0},
                                      {1, 0, 0, 0, 1}}));
}

TEST_CASE("median split on an even count averages the middle pair") {
  const RawTable t = {{"1"}, {"2"}, {"3"}, {"4"}};
  const auto x = binarize(t, recipe({rule(RuleKind::median_split, "v")}));
  // median 2.5: values <= 2.5 map to the first column
  CHECK(x == BinaryMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}}));
}

TEST_CASE("unknown category names the column and value") {
  const RawTable t = {{"green"}};
  auto oh = rule(RuleKind::one_hot, "colour");
  oh.categories = {"blue", "red"};
  try {
    binarize(t, recipe({oh}));
    FAIL("expected an error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("colour") != std::string::npos);
    CHECK(msg.find("green") != std::string::npos);
  }
}

TEST_CASE("drop_zero_rows") {
  const RawTable t = {{"1"}, {"0"}};
  auto r = recipe({rule(RuleKind::passthrough_binary, "f")});
  r.drop_zero_rows = true;
  CHECK(binarize(t, r).rows() == 1);
}

TEST_CASE("GML adjacency is symmetric") {
  std::istringstream in(
      "graph [\n node [ id 0 label \"a\" ]\n node [ id 1 ]\n node [ id 2 ]\n"
      " edge [ source 0 target 1 ]\n edge [ source 2 target 1 ]\n]\n");
  CHECK(parse_gml_adjacency(in) ==
        BinaryMatrix::from_rows({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
}

TEST_CASE("manifest parsing") {
  const auto m = parse_manifest(R"(name: demo
aliases: [d]
sources: [demo.csv]
expected: {rows: 2, cols: 3, density: 50.0}
columns:
  - {name: id, rule: drop}
  - {name: f, rule: binary, true: "y", false: ["n"], repeat: 3}
)");
  CHECK(m.name == "demo");
  CHECK(m.aliases == std::vector<std::string>{"d"});
  CHECK(m.recipe.rules.size() == 4);
  CHECK(m.recipe.rules[1].true_value == "y");
  CHECK(m.expected_rows == 2);
}

TEST_CASE("every shipped recipe parses") {
  const auto all = list_manifests(BMF_TEST_RECIPE_DIR);
  CHECK(all.size() == 8);
  CHECK(load_manifest("zoo", BMF_TEST_RECIPE_DIR).expected_cols == 17);
}

TEST_CASE("prepare validates shape and reports truncation") {
  const auto dir = std::filesystem::temp_directory_path() / "bmf_prepare_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "demo.csv") << "a,y,n,y\nb,n,n,y\n";
  }
  auto m = parse_manifest(R"(name: demo
sources: [demo.csv]
expected: {rows: 2, cols: 3, density: 50.0}
columns:
  - {name: id, rule: drop}
  - {name: f, rule: binary, true: "y", false: ["n"], repeat: 3}
)");
  const auto d = prepare(m, dir.string());
  CHECK(d.matrix.rows() == 2);
  CHECK(d.density == doctest::Approx(50.0));
  m.expected_rows = 3;
  CHECK_THROWS(prepare(m, dir.string()));
  {
    std::ofstream(dir / "demo.csv") << "a,y,n,y\nb,n\n";
  }
  m.expected_rows = 2;
  CHECK_THROWS_AS(prepare(m, dir.string()), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("zoo prepares to 101 x 17") {
  const auto m = load_manifest("zoo", BMF_TEST_RECIPE_DIR);
  if (!sources_present(m, BMF_TEST_DATA_DIR)) return;
  const auto d = prepare(m, BMF_TEST_DATA_DIR);
  CHECK(d.matrix.rows() == 101);
  CHECK(d.matrix.cols() == 17);
  CHECK(d.density == doctest::Approx(44.3).epsilon(0.1 / 44.3));
}

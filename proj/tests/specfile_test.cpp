#include "critfan/specfile.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "helpers.hpp"

using namespace critfan;
using critfan::testing::qvec;
using nlohmann::json;

namespace {

const char* kToml = R"toml(
# analysis job
shift = "haar"

[[group]]
family = "SO_even"
rank = 4

[representation]
kind = "mult"
n = 2
arg = { kind = "std", factor = 0 }

[options]
refine = true
grid = { t_min = 1e-3, t_max = 0.5, points = 12 }
)toml";

const char* kJson = R"json({
  "group": [{"family": "SO_even", "rank": 4}],
  "representation": {"kind": "mult", "n": 2,
                     "arg": {"kind": "std", "factor": 0}},
  "shift": "haar",
  "options": {"refine": true,
              "grid": {"t_min": 1e-3, "t_max": 0.5, "points": 12}}
})json";

void check_msg(const char* text, bool toml, const std::string& needle) {
  try {
    parse_spec_text(text, toml);
    FAIL("expected InvalidSpecFile mentioning " << needle);
  } catch (const InvalidSpecFile& e) {
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("toml and json front ends agree") {
  AnalysisSpecFile a = parse_spec_text(kToml, true);
  AnalysisSpecFile b = parse_spec_text(kJson, false);
  for (const AnalysisSpecFile& s : {a, b}) {
    REQUIRE(s.group.factors.size() == 1);
    CHECK(s.group.factors[0].family == Family::SO_even);
    CHECK(s.group.factors[0].rank == 4);
    CHECK(s.representation.kind == RepExpr::Kind::Mult);
    CHECK(s.representation.multiplier == 2);
    CHECK(s.shift.mode == ShiftMode::Haar);
    CHECK(s.refine);
    CHECK_FALSE(s.simulate);
    CHECK_FALSE(s.derivative_of.has_value());
    CHECK(s.grid.points == 12);
    CHECK(s.grid.t_max == 0.5);
  }
}

TEST_CASE("toml subset mechanics") {
  nlohmann::ordered_json doc = toml_to_json(
      "title = \"a#b\" # trailing comment\n"
      "[outer.inner]\n"
      "xs = [1, 2, 3,]\n"
      "flag = false\n"
      "[[runs]]\n"
      "id = 1\n"
      "[[runs]]\n"
      "id = 2\n"
      "point.x = \"1/2\"\n");
  CHECK(doc["title"] == "a#b");
  CHECK(doc["outer"]["inner"]["xs"] == json::array({1, 2, 3}));
  CHECK(doc["outer"]["inner"]["flag"] == false);
  REQUIRE(doc["runs"].size() == 2);
  CHECK(doc["runs"][1]["id"] == 2);
  CHECK(doc["runs"][1]["point"]["x"] == "1/2");

  CHECK_THROWS_AS(toml_to_json("a = 1\na = 2\n"), InvalidSpecFile);
  CHECK_THROWS_AS(toml_to_json("a = \"oops\n"), InvalidSpecFile);
  CHECK_THROWS_AS(toml_to_json("[t]\n[t]\n"), InvalidSpecFile);
  CHECK_THROWS_AS(toml_to_json("a = 1 2\n"), InvalidSpecFile);
  try {
    toml_to_json("ok = 1\nbad =\n");
    FAIL("expected a parse error");
  } catch (const InvalidSpecFile& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("schema failures name the offending field") {
  check_msg(R"({"representation": {"kind": "std"}})", false, "spec.group");
  check_msg(R"({"group": [{"family": "GL", "rank": 0}],
                "representation": {"kind": "std"}})",
            false, "spec.group[0].rank");
  check_msg(R"({"group": [{"family": "GL", "rank": 1}],
                "representation": {"kind": "std"}, "extra": 1})",
            false, "spec.extra");
  check_msg(R"({"group": [{"family": "GL", "rank": 1}],
                "representation": {"kind": "spin"}})",
            false, "spec.representation.kind");
  check_msg(R"({"group": [{"family": "GL", "rank": 1}],
                "representation": {"kind": "std", "factor": 3}})",
            false, "spec.representation.factor");
  check_msg(R"({"group": [{"family": "GL", "rank": 1}],
                "representation": {"kind": "std"}, "shift": [1, 2]})",
            false, "spec.shift");
  check_msg(R"({"group": [{"family": "GL", "rank": 1}],
                "representation": {"kind": "std"},
                "options": {"grid": {"t_min": 2.0, "t_max": 0.5}}})",
            false, "t_min < t_max");
  check_msg(R"({"group": [{"family": "GL", "rank": 1}],
                "representation": {"kind": "weights",
                  "entries": [{"weight": [0.5], "multiplicity": 1}]}})",
            false, "weight");
}

TEST_CASE("weights and shifts accept exact rationals") {
  AnalysisSpecFile s = parse_spec_text(
      R"({"group": [{"family": "Torus", "rank": 2}],
          "representation": {"kind": "weights",
            "entries": [{"weight": ["1/2", -1], "multiplicity": 2},
                        {"weight": [0, 1]}]},
          "shift": ["-3/2", 4]})",
      false);
  CHECK(s.representation.kind == RepExpr::Kind::DirectWeights);
  REQUIRE(s.representation.direct_weights.size() == 2);
  CHECK(vec_eq(s.representation.direct_weights[0].first,
               qvec({Rational(1, 2), -1})));
  CHECK(s.representation.direct_weights[0].second == 2);
  CHECK(s.representation.direct_weights[1].second == 1);
  CHECK(s.shift.mode == ShiftMode::Custom);
  CHECK(vec_eq(s.shift.custom, qvec({Rational(-3, 2), 4})));
}

TEST_CASE("file loading dispatches on the extension") {
  std::string dir = "/tmp/critfan_spec_test";
  REQUIRE(std::system(("mkdir -p " + dir).c_str()) == 0);
  {
    std::ofstream t(dir + "/a.toml");
    t << kToml;
    std::ofstream j(dir + "/a.json");
    j << kJson;
  }
  AnalysisSpecFile a = load_spec_file(dir + "/a.toml");
  AnalysisSpecFile b = load_spec_file(dir + "/a.json");
  CHECK(a.shift.mode == b.shift.mode);
  CHECK(a.grid.points == b.grid.points);
  CHECK_THROWS_AS(load_spec_file(dir + "/missing.json"), InvalidSpecFile);
}

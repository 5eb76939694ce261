#include "critfan/report.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace critfan;
using critfan::testing::qvec;

TEST_CASE("sha256 matches the published vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("rays serialize as integers and rationals as strings") {
  nlohmann::ordered_json r = ray_json(qvec({-1, 0, 2}));
  CHECK(r.dump() == "[-1,0,2]");
  CHECK_THROWS_AS(ray_json(qvec({Rational(1, 2)})), Error);
  nlohmann::ordered_json q = rational_row_json(qvec({Rational(-3, 2), 4}));
  CHECK(q.dump() == R"(["-3/2","4"])");
}

TEST_CASE("analysis report is deterministic and complete") {
  AnalysisResult res = analyze({{{Family::GL, 1}}}, rep_std(0),
                               {ShiftMode::None, {}});
  nlohmann::ordered_json a = analysis_json(res, sha256_hex("input"));
  nlohmann::ordered_json b = analysis_json(res, sha256_hex("input"));
  CHECK(a.dump(2) == b.dump(2));
  CHECK(a["tool"] == kToolVersion);
  CHECK(a["input_sha256"] == sha256_hex("input"));
  CHECK(a["verdict"] == "Critical");
  CHECK(a["fan"]["dim"] == 1);
  CHECK(a["fan"]["rays"].size() == 2);
  CHECK(a["exponents"].size() == 3);
  CHECK(a["criticality"]["witnesses"].size() == 1);
  CHECK(a["shift"]["mode"] == "none");

  std::string text = render_text(a);
  CHECK(text.find("verdict: Critical") != std::string::npos);
  CHECK(text.find("criticality per ray:") != std::string::npos);
  CHECK(text.find("witnesses:") != std::string::npos);
}

TEST_CASE("central verdict renders without a fan") {
  AnalysisResult res = analyze({{{Family::Torus, 1}}},
                               rep_weights({{qvec({0}), 1}}),
                               {ShiftMode::None, {}});
  nlohmann::ordered_json a = analysis_json(res, sha256_hex("x"));
  CHECK(a["verdict"] == "CentralTorusActsTrivially");
  CHECK_FALSE(a.contains("fan"));
  std::string text = render_text(a);
  CHECK(text.find("CentralTorusActsTrivially") != std::string::npos);
}

TEST_CASE("verdict names") {
  CHECK(verdict_name(Verdict::NonCritical) == "NonCritical");
  CHECK(verdict_name(Verdict::Critical) == "Critical");
}

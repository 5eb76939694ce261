#pragma once

#include "critfan/asymlab.hpp"
#include "critfan/criticality.hpp"
#include "critfan/repspec.hpp"
#include "critfan/rootdata.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace critfan {

// Parsed analysis job: group, representation expression, shift, options.
// Specs are accepted as JSON or as a strict TOML subset (bare and dotted
// keys, strings, integers, floats, booleans, single-line arrays and inline
// tables, [table] and [[array-of-tables]] headers, # comments).  Unknown or
// duplicate fields are rejected.
struct AnalysisSpecFile {
  GroupSpec group;
  RepExpr representation;
  ShiftSpec shift{ShiftMode::None, {}};
  bool refine = false;
  std::optional<QVec> derivative_of;
  bool simulate = false;
  FitGrid grid{1e-3, 1e-1, 12};
};

std::string slurp_file(const std::string& path);

// TOML-subset text to the equivalent JSON document.
nlohmann::ordered_json toml_to_json(const std::string& text);

// Schema validation shared by both input syntaxes.
AnalysisSpecFile spec_from_json(const nlohmann::json& doc);

// Parse by syntax; toml selects the TOML front end.
AnalysisSpecFile parse_spec_text(const std::string& text, bool toml);

// Reads the file and dispatches on the ".toml" extension.
AnalysisSpecFile load_spec_file(const std::string& path);

}  // namespace critfan

#pragma once

#include "critfan/arrangement.hpp"
#include "critfan/criticality.hpp"

#include <json.hpp>

#include <string>

namespace critfan {

inline constexpr const char* kToolVersion = "critfan 0.1.0";

std::string sha256_hex(const std::string& data);

// Serialization helpers.  Rays and fan data are integral and emitted as JSON
// integers; exponent coefficients are emitted as exact rational strings.
nlohmann::ordered_json ray_json(const QVec& v);
nlohmann::ordered_json rational_row_json(const QVec& v);
nlohmann::ordered_json fan_json(const Fan& f);
nlohmann::ordered_json exponents_json(const std::vector<ExponentMultiset>& e);
nlohmann::ordered_json criticality_json(const CriticalityReport& r);

// Full analysis report with provenance; canonical key order, byte-identical
// across re-runs of the same input.
nlohmann::ordered_json analysis_json(const AnalysisResult& result,
                                     const std::string& input_hash);

std::string verdict_name(Verdict v);

// Plain-text rendering of an analysis report.
std::string render_text(const nlohmann::ordered_json& report);

}  // namespace critfan

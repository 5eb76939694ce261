#include "critfan/report.hpp"

#include <openssl/evp.h>

#include <sstream>

namespace critfan {

namespace {

long long as_integer(const Rational& r) {
  if (boost::multiprecision::denominator(r) != 1)
    throw Error("NonIntegralRay", "expected an integral vector entry, got " +
                                      to_string(r));
  return boost::multiprecision::numerator(r).convert_to<long long>();
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

nlohmann::ordered_json ray_json(const QVec& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(as_integer(v[i]));
  return arr;
}

nlohmann::ordered_json rational_row_json(const QVec& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(to_string(v[i]));
  return arr;
}

nlohmann::ordered_json fan_json(const Fan& f) {
  nlohmann::ordered_json out;
  out["dim"] = f.dim;
  auto rays = nlohmann::ordered_json::array();
  for (const QVec& r : f.rays) rays.push_back(ray_json(r));
  out["rays"] = rays;
  auto cones = nlohmann::ordered_json::array();
  for (const FanCone& c : f.cones) {
    nlohmann::ordered_json jc;
    jc["dim"] = c.geom.cone_dim();
    jc["ray_indices"] = c.ray_idx;
    cones.push_back(jc);
  }
  out["cones"] = cones;
  return out;
}

nlohmann::ordered_json exponents_json(const std::vector<ExponentMultiset>& e) {
  auto out = nlohmann::ordered_json::array();
  for (size_t i = 0; i < e.size(); ++i) {
    nlohmann::ordered_json jc;
    jc["cone"] = i;
    auto lst = nlohmann::ordered_json::array();
    for (const auto& [vec, mult] : e[i]) {
      nlohmann::ordered_json je;
      je["coefficients"] = rational_row_json(vec);
      je["multiplicity"] = mult;
      lst.push_back(je);
    }
    jc["exponents"] = lst;
    out.push_back(jc);
  }
  return out;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::NonCritical:
      return "NonCritical";
    case Verdict::Critical:
      return "Critical";
    default:
      return "CentralTorusActsTrivially";
  }
}

nlohmann::ordered_json criticality_json(const CriticalityReport& r) {
  nlohmann::ordered_json out;
  auto rays = nlohmann::ordered_json::array();
  for (const RayRecord& rec : r.rays) {
    nlohmann::ordered_json jr;
    jr["ray"] = ray_json(rec.ray);
    jr["chi"] = to_string(rec.chi_value);
    jr["two_rho"] = to_string(rec.rho_value);
    jr["critical"] = rec.critical;
    rays.push_back(jr);
  }
  out["rays"] = rays;
  out["verdict"] = verdict_name(r.verdict);
  auto wit = nlohmann::ordered_json::array();
  for (const QVec& w : r.witnesses) wit.push_back(ray_json(w));
  out["witnesses"] = wit;
  return out;
}

nlohmann::ordered_json analysis_json(const AnalysisResult& result,
                                     const std::string& input_hash) {
  nlohmann::ordered_json out;
  out["tool"] = kToolVersion;
  out["input_sha256"] = input_hash;
  auto grp = nlohmann::ordered_json::array();
  for (const GroupFactor& f : result.group.factors) {
    nlohmann::ordered_json jf;
    jf["family"] = family_name(f.family);
    jf["rank"] = f.rank;
    grp.push_back(jf);
  }
  out["group"] = grp;
  nlohmann::ordered_json js;
  js["mode"] = result.shift.mode == ShiftMode::None   ? "none"
               : result.shift.mode == ShiftMode::Haar ? "haar"
                                                      : "custom";
  if (result.report.shift.size() > 0)
    js["coefficients"] = rational_row_json(result.report.shift);
  out["shift"] = js;
  out["verdict"] = verdict_name(result.report.verdict);
  if (result.arrangement) {
    out["fan"] = fan_json(result.arrangement->fan);
    out["exponents"] = exponents_json(result.arrangement->exponents);
  }
  out["criticality"] = criticality_json(result.report);
  return out;
}

namespace {

std::string flat_row(const nlohmann::ordered_json& arr) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < arr.size(); ++i)
    os << (i ? " " : "") << arr[i].dump();
  os << "]";
  return os.str();
}

}  // namespace

std::string render_text(const nlohmann::ordered_json& report) {
  std::ostringstream os;
  if (report.contains("tool")) os << report["tool"].get<std::string>() << "\n";
  if (report.contains("input_sha256"))
    os << "input sha256: " << report["input_sha256"].get<std::string>() << "\n";
  if (report.contains("group")) {
    os << "group:";
    for (const auto& f : report["group"])
      os << " " << f["family"].get<std::string>() << "(" << f["rank"] << ")";
    os << "\n";
  }
  if (report.contains("shift")) {
    os << "shift: " << report["shift"]["mode"].get<std::string>();
    if (report["shift"].contains("coefficients"))
      os << " " << flat_row(report["shift"]["coefficients"]);
    os << "\n";
  }
  if (report.contains("verdict"))
    os << "verdict: " << report["verdict"].get<std::string>() << "\n";
  if (report.contains("fan")) {
    const auto& fan = report["fan"];
    os << "fan: dim " << fan["dim"] << ", " << fan["rays"].size()
       << " rays, " << fan["cones"].size() << " cones\n";
    for (size_t i = 0; i < fan["rays"].size(); ++i)
      os << "  ray " << i << ": " << flat_row(fan["rays"][i]) << "\n";
  }
  if (report.contains("exponents")) {
    os << "exponents:\n";
    const nlohmann::ordered_json* fan =
        report.contains("fan") ? &report["fan"] : nullptr;
    for (const auto& jc : report["exponents"]) {
      size_t ci = jc["cone"].get<size_t>();
      os << "  cone " << ci;
      if (fan)
        os << " (dim " << (*fan)["cones"][ci]["dim"] << ", rays "
           << flat_row((*fan)["cones"][ci]["ray_indices"]) << ")";
      os << ":";
      for (const auto& je : jc["exponents"])
        os << " " << flat_row(je["coefficients"]) << " x" << je["multiplicity"];
      os << "\n";
    }
  }
  if (report.contains("criticality")) {
    const auto& cr = report["criticality"];
    os << "criticality per ray:\n";
    for (const auto& jr : cr["rays"])
      os << "  " << flat_row(jr["ray"]) << "  chi=" << jr["chi"].get<std::string>()
         << "  2rho=" << jr["two_rho"].get<std::string>()
         << (jr["critical"].get<bool>() ? "  CRITICAL" : "") << "\n";
    if (!cr["witnesses"].empty()) {
      os << "witnesses:";
      for (const auto& w : cr["witnesses"]) os << " " << flat_row(w);
      os << "\n";
    }
  }
  if (report.contains("numeric")) {
    os << "numeric:\n";
    for (const auto& [key, val] : report["numeric"].items())
      os << "  " << key << ": " << val.dump() << "\n";
  }
  for (const auto& [key, val] : report.items()) {
    static const char* known[] = {"tool",      "input_sha256", "group",
                                  "shift",     "verdict",      "fan",
                                  "exponents", "criticality",  "numeric"};
    bool handled = false;
    for (const char* k : known) handled = handled || key == k;
    if (!handled) os << key << ": " << val.dump() << "\n";
  }
  return os.str();
}

}  // namespace critfan

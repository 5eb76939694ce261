#include "critfan/criticality.hpp"

namespace critfan {

CriticalityReport criticality_report(const ExponentArrangement& a, const ShiftSpec& s) {
  CriticalityReport rep;
  rep.shift_mode = s.mode;
  switch (s.mode) {
    case ShiftMode::None:
      rep.shift = QVec::Zero(a.fan.dim);
      break;
    case ShiftMode::Haar:
      rep.shift = haar_character(a.weights, a.fan.dim);
      break;
    case ShiftMode::Custom:
      if (s.custom.size() != a.fan.dim)
        throw DimensionMismatch("custom shift size vs fan dim");
      rep.shift = s.custom;
      break;
  }

  for (size_t ci = 0; ci < a.fan.cones.size(); ++ci) {
    const FanCone& fc = a.fan.cones[ci];
    if (fc.geom.cone_dim() != 1) continue;
    RayRecord rec;
    rec.ray = fc.geom.rays.row(0).transpose();
    const QVec& chi = a.exponents[ci][0].first;
    rec.chi_value = (chi + rep.shift).dot(rec.ray);
    rec.rho_value = a.datum.two_rho.dot(rec.ray);
    rec.critical = rec.chi_value == rec.rho_value;
    if (rec.critical) rep.witnesses.push_back(rec.ray);
    rep.rays.push_back(std::move(rec));
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::NonCritical : Verdict::Critical;
  return rep;
}

AnalysisResult analyze(const GroupSpec& g, const RepExpr& e, const ShiftSpec& s,
                       int max_dim) {
  AnalysisResult res;
  res.group = g;
  res.shift = s;
  res.datum = build_root_datum(g, max_dim);
  res.weights = weights_of(e, res.datum);
  try {
    res.arrangement = build_arrangement(res.datum, res.weights);
  } catch (const CentralTorusActsTrivially&) {
    res.report.verdict = Verdict::CentralTorusActsTrivially;
    res.report.shift_mode = s.mode;
    res.report.shift = QVec::Zero(res.datum.dim);
    return res;
  }
  res.report = criticality_report(*res.arrangement, s);
  return res;
}

}  // namespace critfan

#pragma once

#include "critfan/arrangement.hpp"

#include <optional>

namespace critfan {

enum class ShiftMode { None, Haar, Custom };

struct ShiftSpec {
  ShiftMode mode = ShiftMode::None;
  QVec custom;
};

struct RayRecord {
  QVec ray;
  Rational chi_value;  // <chi_R + shift, ray>
  Rational rho_value;  // <2 rho, ray>
  bool critical = false;
};

enum class Verdict { NonCritical, Critical, CentralTorusActsTrivially };

struct CriticalityReport {
  std::vector<RayRecord> rays;
  Verdict verdict = Verdict::NonCritical;
  std::vector<QVec> witnesses;  // rays whose record is critical
  ShiftMode shift_mode = ShiftMode::None;
  QVec shift;  // resolved shift functional
};

// A ray is critical when the shifted cone exponent meets the modular
// character on it; the arrangement is Critical when any ray is.
CriticalityReport criticality_report(const ExponentArrangement& a, const ShiftSpec& s);

// Full pipeline: datum, weights, arrangement, report.  A trivially acting
// central direction is reported as a verdict, not an exception.
struct AnalysisResult {
  GroupSpec group;
  ShiftSpec shift;
  RootDatum datum;
  WeightMultiset weights;
  std::optional<ExponentArrangement> arrangement;  // absent iff central-trivial
  CriticalityReport report;
};

AnalysisResult analyze(const GroupSpec& g, const RepExpr& e, const ShiftSpec& s,
                       int max_dim = 12);

}  // namespace critfan

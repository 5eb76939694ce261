#pragma once

#include "critfan/fan.hpp"
#include "critfan/repspec.hpp"

namespace critfan {

// Multiset of exponent functionals, sorted lexicographically.  Arrangements
// built here carry exactly one exponent per cone; derivative arrangements
// inherit theirs from the source cones.
using ExponentMultiset = std::vector<std::pair<QVec, long>>;

struct ExponentArrangement {
  Fan fan;
  std::vector<ExponentMultiset> exponents;  // parallel to fan.cones
  RootDatum datum;
  WeightMultiset weights;
  KernelSplit kernel;
};

// Cuts the antidominant chamber (intersected with the complement subalgebra
// when the action kernel is nonzero) along the weight hyperplanes and the
// chamber walls.  The exponent of a cone C is -sum of the weights positive
// on relint(C), with multiplicity.  Errors: CentralTorusActsTrivially,
// IrregularKernel.
ExponentArrangement build_arrangement(const RootDatum& rd, const WeightMultiset& w);

// Face-restriction property: for cones C1 <= C2, each exponent of C2
// restricted to span(C1) must be available in the multiset of C1 (coinciding
// restrictions on the C2 side count by their maximum).  Empty iff it holds.
std::vector<std::string> check_compatibility(const ExponentArrangement& a);

// Adds d to every exponent of every cone.
ExponentArrangement shift_arrangement(const ExponentArrangement& a, const QVec& d);

// <chi_C, lambda> for the unique cone C whose relative interior contains
// lambda; OutsideSupport otherwise.
Rational eval_exponent(const ExponentArrangement& a, const QVec& lambda);

struct DerivativeArrangement {
  Cone base_cone;  // the cone differentiated along, in ambient coordinates
  StarFan star;
  // Exponent multisets parallel to star.fan.cones, inherited from the source
  // cones; the functionals stay in ambient coordinates.
  std::vector<ExponentMultiset> exponents;
};

// Star of the arrangement at a cone d of its fan; d = {0} returns the
// arrangement itself in star form.  Throws NotInFan.
DerivativeArrangement derivative_arrangement(const ExponentArrangement& a, const Cone& d);

}  // namespace critfan

#pragma once

#include "critfan/errors.hpp"
#include "critfan/linalg.hpp"

#include <vector>

namespace critfan {

enum class Sign { Positive, Zero, Negative, Mixed };

// Closed convex polyhedral cone in Q^dim with both descriptions held in
// canonical form:
//  - lineality: canonical subspace basis (primitive RREF rows)
//  - rays: primitive generators of the extreme rays of the pointed part,
//    reduced modulo the lineality space, sorted lexicographically
//  - eqs: canonical basis of the annihilator of the linear span
//  - ineqs: primitive facet functionals reduced modulo eqs, sorted
// Two cones are equal iff all canonical fields coincide.
struct Cone {
  int dim = 0;
  QMat rays;       // one generator per row
  QMat lineality;  // one basis vector per row
  QMat ineqs;      // rows f meaning <f, x> >= 0
  QMat eqs;        // rows g meaning <g, x> = 0

  int n_rays() const { return static_cast<int>(rays.rows()); }
  int lineality_dim() const { return static_cast<int>(lineality.rows()); }
  int cone_dim() const { return dim - static_cast<int>(eqs.rows()); }
  bool pointed() const { return lineality.rows() == 0; }
  bool is_zero() const { return rays.rows() == 0 && lineality.rows() == 0; }
  bool simplicial() const { return pointed() && n_rays() == cone_dim(); }
  // Sum of the rays: a relative interior point (zero for the zero cone).
  QVec relint_point() const;
};

// H -> V -> canonical H via the double description method.
// Throws DimensionMismatch when row widths disagree with dim.
Cone dd_convert(const QMat& ineqs, const QMat& eqs, int dim);

// V -> H -> canonical V; generator and lineality rows may be redundant.
Cone cone_from_rays(const QMat& gens, const QMat& lineality, int dim);

Cone zero_cone(int dim);
Cone full_space(int dim);

bool same_cone(const Cone& a, const Cone& b);
bool cone_contains(const Cone& c, const QVec& x);
bool cone_relint_contains(const Cone& c, const QVec& x);

Cone intersect_cones(const Cone& a, const Cone& b);
Cone intersect_halfspace(const Cone& c, const QVec& f);  // adds <f, x> >= 0
Cone intersect_hyperplane(const Cone& c, const QVec& f); // adds <f, x> = 0

// All faces of a pointed cone, including {0} and the cone itself, sorted by
// (dimension, ray list).  Throws PointednessViolation on lineality.
std::vector<Cone> faces(const Cone& c);

// b is a face of a: b equals the subcone of a tight on some ineq subset.
bool is_face_of(const Cone& b, const Cone& a);

// Sign of f on the relative interior of c.
Sign relint_sign(const QVec& f, const Cone& c);

// One region of the translated-facet partition.  Membership on top of the
// ambient cone: weak rows >= 0 and strict rows > 0.  face_index lists the
// facets of c vanishing on the labelling face.
struct PartitionRegion {
  std::vector<int> face_index;
  QMat weak;
  QMat strict;
};

// Largest delta of the form 1/2^k, k <= 20, for which every sign pattern the
// translated facets realize on c \ {0} is the pattern of a nonzero face.
// Throws DeltaTooLarge when no such k exists, PointednessViolation on
// lineality.
Rational delta_max(const Cone& c);

// Partition of c \ {0} at the given delta: one region per nonzero face.
// Throws DeltaTooLarge when the pattern condition fails at delta.
std::vector<PartitionRegion> cone_partition(const Cone& c, const Rational& delta);

bool region_contains(const Cone& c, const PartitionRegion& r, const QVec& x);

}  // namespace critfan

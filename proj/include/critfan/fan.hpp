#pragma once

#include "critfan/cone.hpp"

#include <optional>
#include <string>
#include <vector>

namespace critfan {

struct FanCone {
  std::vector<int> ray_idx;  // sorted indices into Fan::rays
  Cone geom;
};

// Finite collection of pointed cones, face-closed, pairwise intersecting in
// common faces, covering the support cone.  Rays are primitive and sorted
// lexicographically; cones are sorted by (dimension, ray index list).
struct Fan {
  int dim = 0;
  std::vector<QVec> rays;
  std::vector<FanCone> cones;
  Cone support;

  int ray_index(const QVec& r) const;
  int cone_index(const std::vector<int>& sorted_ray_idx) const;
  int cone_index_of(const Cone& c) const;
  std::vector<int> maximal_cones() const;
  // Index of the unique cone whose relative interior contains x, or -1 when
  // x lies outside the support.
  int relint_locate(const QVec& x) const;
};

// Builds a fan from maximal cones: deduplicates, face-closes, indexes rays.
Fan build_fan(int dim, const std::vector<Cone>& maximal, const Cone& support);

// Cuts base along the hyperplanes {h = 0}.  Every closed region of maximal
// dimension becomes a maximal cone; regions must come out pointed, otherwise
// PointednessViolation.  The support is base.
Fan fan_from_hyperplanes(const Cone& base, const std::vector<QVec>& hyps);

// Empty iff all fan invariants hold, else human-readable diagnostics.
std::vector<std::string> is_valid_fan(const Fan& f);

// Star subdivision of f at v.  v may be an existing ray (pulling) or a new
// ray inside the support; cones containing v are replaced by joins of v with
// their faces missing v.
Fan star_subdivide(const Fan& f, const QVec& v);

// Refines every cone to a simplicial one by pulling at the existing rays, so
// normally no new rays appear.  If a defensive fallback has to insert a new
// ray inside a cone descending from input cone C, the ray is required to
// avoid the kernel of avoid[C]; RefinementObstruction when impossible.
Fan stellar_refine_to_simplicial(const Fan& f,
                                 const std::vector<std::optional<QVec>>* avoid = nullptr);

struct StarFan {
  Fan fan;                       // in quotient coordinates
  QMat projection;               // (dim - k) x dim quotient map
  std::vector<int> source_cone;  // input cone index backing each star cone
};

// Quotient fan at a cone d of f: images in span(f)/span(d) of the cones
// containing d.  The support is the conical hull of the images.  Throws
// NotInFan when d is not a cone of f.
StarFan star_fan(const Fan& f, const Cone& d);

}  // namespace critfan

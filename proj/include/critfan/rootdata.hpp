#pragma once

#include "critfan/cone.hpp"

#include <string>
#include <utility>
#include <vector>

namespace critfan {

enum class Family { GL, SO_odd, SO_even, Sp, Torus };

// rank is n for GL_n, m for SO_{2m+1}, SO_{2m}, Sp_{2m}, and the dimension
// for a torus factor.  Each factor occupies rank epsilon coordinates.
struct GroupFactor {
  Family family;
  int rank;
};

struct GroupSpec {
  std::vector<GroupFactor> factors;
};

std::string family_name(Family f);
Family family_from_name(const std::string& s);

// Split epsilon realization of the restricted root system of the group over
// a p-adic field, everything expressed in the coordinates of a = X_*(A) ox Q.
struct RootDatum {
  GroupSpec group;
  int dim = 0;
  std::vector<QVec> simple_roots;
  std::vector<QVec> positive_roots;
  QVec two_rho;
  Cone antidominant;  // {v : <alpha, v> <= 0 for every simple root alpha}
  QMat center;        // canonical basis of the central subspace
  std::vector<QMat> factor_spans;            // semisimple span per factor
  std::vector<std::pair<int, int>> blocks;   // [first, last) coordinates per factor
};

// Throws UnsupportedGroup for empty specs, bad ranks (SO_even needs rank
// >= 3), or total dimension above max_dim.
RootDatum build_root_datum(const GroupSpec& g, int max_dim = 12);

// Square of the modular character of the Borel on the torus, additively.
QVec modular_character(const RootDatum& rd);

enum class SplitKind { MeetsCenter, FactorSum, Neither };

struct SplitVerdict {
  SplitKind kind;
  std::vector<int> factor_indices;  // FactorSum: whose spans sum to the space
};

// Relates a subspace (rows form a basis) to the center and the simple
// factor spans.
SplitVerdict simple_factor_split(const RootDatum& rd, const QMat& subspace);

}  // namespace critfan

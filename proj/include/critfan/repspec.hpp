#pragma once

#include "critfan/rootdata.hpp"

namespace critfan {

// Representation expression: Std and Adjoint name a group factor; Dual, Sum
// and Mult combine children; DirectWeights lists weights explicitly.
struct RepExpr {
  enum class Kind { Std, Adjoint, Dual, Sum, Mult, DirectWeights };
  Kind kind = Kind::Std;
  int factor = 0;
  int multiplier = 1;
  std::vector<RepExpr> children;
  std::vector<std::pair<QVec, long>> direct_weights;
};

RepExpr rep_std(int factor);
RepExpr rep_adjoint(int factor);
RepExpr rep_dual(RepExpr e);
RepExpr rep_sum(std::vector<RepExpr> es);
RepExpr rep_mult(RepExpr e, int n);
RepExpr rep_weights(std::vector<std::pair<QVec, long>> entries);

// Weight multiset of the torus action: entries sorted lexicographically with
// positive multiplicities, the zero weight included when it occurs.
struct WeightMultiset {
  std::vector<std::pair<QVec, long>> entries;
  long total_dim = 0;
};

WeightMultiset weights_of(const RepExpr& e, const RootDatum& rd);

// Weight of the Haar character of the acted-on vector space: the sum of all
// weights with multiplicity.
QVec haar_character(const WeightMultiset& w, int dim);

enum class KernelVerdict { CentralTrivial, Clean, Irregular };

struct KernelSplit {
  QMat a0;  // canonical basis of the common kernel of the weights
  KernelVerdict verdict = KernelVerdict::Clean;
  QMat a_prime;                     // Clean: complement subalgebra basis
  std::vector<int> kernel_factors;  // Clean: factors absorbed into a0
};

KernelSplit action_kernel(const WeightMultiset& w, const RootDatum& rd);

struct WeightPartition {
  WeightMultiset negative, zero, positive;
};

// Buckets the weights by their sign on relint(c); a weight of mixed sign
// there raises MixedSign.
WeightPartition weight_partition(const WeightMultiset& w, const Cone& c);

}  // namespace critfan

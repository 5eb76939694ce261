#include "critfan/repspec.hpp"

#include <algorithm>
#include <map>

namespace critfan {

RepExpr rep_std(int factor) {
  RepExpr e;
  e.kind = RepExpr::Kind::Std;
  e.factor = factor;
  return e;
}

RepExpr rep_adjoint(int factor) {
  RepExpr e;
  e.kind = RepExpr::Kind::Adjoint;
  e.factor = factor;
  return e;
}

RepExpr rep_dual(RepExpr c) {
  RepExpr e;
  e.kind = RepExpr::Kind::Dual;
  e.children.push_back(std::move(c));
  return e;
}

RepExpr rep_sum(std::vector<RepExpr> es) {
  RepExpr e;
  e.kind = RepExpr::Kind::Sum;
  e.children = std::move(es);
  return e;
}

RepExpr rep_mult(RepExpr c, int n) {
  RepExpr e;
  e.kind = RepExpr::Kind::Mult;
  e.multiplier = n;
  e.children.push_back(std::move(c));
  return e;
}

RepExpr rep_weights(std::vector<std::pair<QVec, long>> entries) {
  RepExpr e;
  e.kind = RepExpr::Kind::DirectWeights;
  e.direct_weights = std::move(entries);
  return e;
}

namespace {

void canonicalize(WeightMultiset& w) {
  std::sort(w.entries.begin(), w.entries.end(),
            [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
  std::vector<std::pair<QVec, long>> merged;
  for (auto& e : w.entries) {
    if (e.second == 0) continue;
    if (!merged.empty() && vec_eq(merged.back().first, e.first))
      merged.back().second += e.second;
    else
      merged.push_back(std::move(e));
  }
  w.entries = std::move(merged);
  w.total_dim = 0;
  for (const auto& e : w.entries) w.total_dim += e.second;
}

QVec unit(int dim, int i) {
  QVec v = QVec::Zero(dim);
  v[i] = 1;
  return v;
}

void append_std(const RootDatum& rd, int factor, std::vector<std::pair<QVec, long>>& out) {
  if (factor < 0 || factor >= static_cast<int>(rd.group.factors.size()))
    throw UnsupportedGroup("factor index " + std::to_string(factor) + " out of range");
  const auto [lo, hi] = rd.blocks[static_cast<size_t>(factor)];
  switch (rd.group.factors[static_cast<size_t>(factor)].family) {
    case Family::GL:
    case Family::Torus:
      for (int i = lo; i < hi; ++i) out.emplace_back(unit(rd.dim, i), 1);
      break;
    case Family::SO_odd:
      for (int i = lo; i < hi; ++i) {
        out.emplace_back(unit(rd.dim, i), 1);
        out.emplace_back(-unit(rd.dim, i), 1);
      }
      out.emplace_back(QVec::Zero(rd.dim), 1);
      break;
    case Family::Sp:
    case Family::SO_even:
      for (int i = lo; i < hi; ++i) {
        out.emplace_back(unit(rd.dim, i), 1);
        out.emplace_back(-unit(rd.dim, i), 1);
      }
      break;
  }
}

void append_adjoint(const RootDatum& rd, int factor, std::vector<std::pair<QVec, long>>& out) {
  if (factor < 0 || factor >= static_cast<int>(rd.group.factors.size()))
    throw UnsupportedGroup("factor index " + std::to_string(factor) + " out of range");
  const auto [lo, hi] = rd.blocks[static_cast<size_t>(factor)];
  // roots of the factor, plus one zero weight per Cartan dimension; for a
  // torus factor that is just rank copies of the zero weight
  for (const QVec& a : rd.positive_roots) {
    bool inside = false;
    for (int i = lo; i < hi && !inside; ++i) inside = a[i] != 0;
    if (!inside) continue;
    out.emplace_back(a, 1);
    out.emplace_back(-a, 1);
  }
  out.emplace_back(QVec::Zero(rd.dim), hi - lo);
}

void collect(const RepExpr& e, const RootDatum& rd, long mult,
             std::vector<std::pair<QVec, long>>& out) {
  switch (e.kind) {
    case RepExpr::Kind::Std: {
      std::vector<std::pair<QVec, long>> ws;
      append_std(rd, e.factor, ws);
      for (auto& [w, m] : ws) out.emplace_back(std::move(w), m * mult);
      break;
    }
    case RepExpr::Kind::Adjoint: {
      std::vector<std::pair<QVec, long>> ws;
      append_adjoint(rd, e.factor, ws);
      for (auto& [w, m] : ws) out.emplace_back(std::move(w), m * mult);
      break;
    }
    case RepExpr::Kind::Dual: {
      std::vector<std::pair<QVec, long>> ws;
      collect(e.children.at(0), rd, mult, ws);
      for (auto& [w, m] : ws) out.emplace_back(-w, m);
      break;
    }
    case RepExpr::Kind::Sum:
      for (const RepExpr& c : e.children) collect(c, rd, mult, out);
      break;
    case RepExpr::Kind::Mult:
      if (e.multiplier < 1)
        throw UnsupportedGroup("multiplicity " + std::to_string(e.multiplier) +
                               " must be positive");
      collect(e.children.at(0), rd, mult * e.multiplier, out);
      break;
    case RepExpr::Kind::DirectWeights:
      for (const auto& [w, m] : e.direct_weights) {
        if (w.size() != rd.dim)
          throw DimensionMismatch("weight size vs ambient dim");
        if (m < 1) throw UnsupportedGroup("weight multiplicity must be positive");
        out.emplace_back(w, m * mult);
      }
      break;
  }
}

}  // namespace

WeightMultiset weights_of(const RepExpr& e, const RootDatum& rd) {
  WeightMultiset w;
  collect(e, rd, 1, w.entries);
  canonicalize(w);
  return w;
}

QVec haar_character(const WeightMultiset& w, int dim) {
  QVec s = QVec::Zero(dim);
  for (const auto& [v, m] : w.entries) s += Rational(m) * v;
  return s;
}

KernelSplit action_kernel(const WeightMultiset& w, const RootDatum& rd) {
  KernelSplit ks;
  std::vector<QVec> rows;
  for (const auto& [v, m] : w.entries) rows.push_back(v);
  ks.a0 = kernel_basis(rows.empty() ? QMat(0, rd.dim) : rows_from(rows, rd.dim));
  if (ks.a0.rows() == 0) {
    ks.verdict = KernelVerdict::Clean;
    QMat id(rd.dim, rd.dim);
    id.setZero();
    for (int i = 0; i < rd.dim; ++i) id(i, i) = 1;
    ks.a_prime = id;
    return ks;
  }
  SplitVerdict sv = simple_factor_split(rd, ks.a0);
  switch (sv.kind) {
    case SplitKind::MeetsCenter:
      ks.verdict = KernelVerdict::CentralTrivial;
      return ks;
    case SplitKind::Neither:
      ks.verdict = KernelVerdict::Irregular;
      return ks;
    case SplitKind::FactorSum:
      break;
  }
  ks.verdict = KernelVerdict::Clean;
  ks.kernel_factors = sv.factor_indices;
  QMat rows_ap = rd.center;
  for (size_t i = 0; i < rd.factor_spans.size(); ++i) {
    if (std::find(ks.kernel_factors.begin(), ks.kernel_factors.end(),
                  static_cast<int>(i)) != ks.kernel_factors.end())
      continue;
    rows_ap = stack_rows(rows_ap, rd.factor_spans[i]);
  }
  ks.a_prime = rows_ap.rows() ? row_space_basis(rows_ap) : QMat(0, rd.dim);
  return ks;
}

WeightPartition weight_partition(const WeightMultiset& w, const Cone& c) {
  WeightPartition p;
  for (const auto& [v, m] : w.entries) {
    switch (relint_sign(v, c)) {
      case Sign::Negative:
        p.negative.entries.emplace_back(v, m);
        break;
      case Sign::Zero:
        p.zero.entries.emplace_back(v, m);
        break;
      case Sign::Positive:
        p.positive.entries.emplace_back(v, m);
        break;
      case Sign::Mixed:
        throw MixedSign("a weight changes sign on the relative interior");
    }
  }
  for (auto& part : {&p.negative, &p.zero, &p.positive}) {
    part->total_dim = 0;
    for (const auto& e : part->entries) part->total_dim += e.second;
  }
  return p;
}

}  // namespace critfan

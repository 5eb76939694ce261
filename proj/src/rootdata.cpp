#include "critfan/rootdata.hpp"

namespace critfan {

std::string family_name(Family f) {
  switch (f) {
    case Family::GL: return "GL";
    case Family::SO_odd: return "SO_odd";
    case Family::SO_even: return "SO_even";
    case Family::Sp: return "Sp";
    case Family::Torus: return "Torus";
  }
  return "?";
}

Family family_from_name(const std::string& s) {
  if (s == "GL") return Family::GL;
  if (s == "SO_odd") return Family::SO_odd;
  if (s == "SO_even") return Family::SO_even;
  if (s == "Sp") return Family::Sp;
  if (s == "Torus") return Family::Torus;
  throw UnsupportedGroup("unknown family '" + s + "'");
}

namespace {

QVec unit(int dim, int i) {
  QVec v = QVec::Zero(dim);
  v[i] = 1;
  return v;
}

void validate(const GroupSpec& g, int max_dim) {
  if (g.factors.empty()) throw UnsupportedGroup("empty factor list");
  int total = 0;
  for (const GroupFactor& f : g.factors) {
    if (f.rank < 1)
      throw UnsupportedGroup(family_name(f.family) + " factor with rank " +
                             std::to_string(f.rank));
    if (f.family == Family::SO_even && f.rank < 3)
      throw UnsupportedGroup("SO_even requires rank >= 3, got " +
                             std::to_string(f.rank));
    total += f.rank;
  }
  if (total > max_dim)
    throw UnsupportedGroup("total dimension " + std::to_string(total) +
                           " exceeds the cap " + std::to_string(max_dim));
}

}  // namespace

RootDatum build_root_datum(const GroupSpec& g, int max_dim) {
  validate(g, max_dim);
  RootDatum rd;
  rd.group = g;
  for (const GroupFactor& f : g.factors) rd.dim += f.rank;
  rd.two_rho = QVec::Zero(rd.dim);

  std::vector<QVec> center_rows;
  int o = 0;
  for (const GroupFactor& f : g.factors) {
    const int m = f.rank;
    rd.blocks.emplace_back(o, o + m);
    std::vector<QVec> span_rows;
    switch (f.family) {
      case Family::GL: {
        for (int i = 0; i < m - 1; ++i)
          rd.simple_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + i + 1));
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j)
            rd.positive_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + j));
        for (int i = 0; i < m; ++i) rd.two_rho[o + i] = m - 1 - 2 * i;
        QVec ones = QVec::Zero(rd.dim);
        for (int i = 0; i < m; ++i) ones[o + i] = 1;
        center_rows.push_back(ones);
        for (int i = 0; i < m - 1; ++i)
          span_rows.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + i + 1));
        break;
      }
      case Family::SO_odd: {
        for (int i = 0; i < m - 1; ++i)
          rd.simple_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + i + 1));
        rd.simple_roots.push_back(unit(rd.dim, o + m - 1));
        for (int i = 0; i < m; ++i) {
          for (int j = i + 1; j < m; ++j) {
            rd.positive_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + j));
            rd.positive_roots.push_back(unit(rd.dim, o + i) + unit(rd.dim, o + j));
          }
          rd.positive_roots.push_back(unit(rd.dim, o + i));
        }
        for (int i = 0; i < m; ++i) rd.two_rho[o + i] = 2 * (m - 1 - i) + 1;
        for (int i = 0; i < m; ++i) span_rows.push_back(unit(rd.dim, o + i));
        break;
      }
      case Family::Sp: {
        for (int i = 0; i < m - 1; ++i)
          rd.simple_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + i + 1));
        rd.simple_roots.push_back(Rational(2) * unit(rd.dim, o + m - 1));
        for (int i = 0; i < m; ++i) {
          for (int j = i + 1; j < m; ++j) {
            rd.positive_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + j));
            rd.positive_roots.push_back(unit(rd.dim, o + i) + unit(rd.dim, o + j));
          }
          rd.positive_roots.push_back(Rational(2) * unit(rd.dim, o + i));
        }
        for (int i = 0; i < m; ++i) rd.two_rho[o + i] = 2 * (m - i);
        for (int i = 0; i < m; ++i) span_rows.push_back(unit(rd.dim, o + i));
        break;
      }
      case Family::SO_even: {
        for (int i = 0; i < m - 1; ++i)
          rd.simple_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + i + 1));
        rd.simple_roots.push_back(unit(rd.dim, o + m - 2) + unit(rd.dim, o + m - 1));
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j) {
            rd.positive_roots.push_back(unit(rd.dim, o + i) - unit(rd.dim, o + j));
            rd.positive_roots.push_back(unit(rd.dim, o + i) + unit(rd.dim, o + j));
          }
        for (int i = 0; i < m; ++i) rd.two_rho[o + i] = 2 * (m - 1 - i);
        for (int i = 0; i < m; ++i) span_rows.push_back(unit(rd.dim, o + i));
        break;
      }
      case Family::Torus: {
        for (int i = 0; i < m; ++i) center_rows.push_back(unit(rd.dim, o + i));
        break;
      }
    }
    rd.factor_spans.push_back(span_rows.empty() ? QMat(0, rd.dim)
                                                : row_space_basis(rows_from(span_rows, rd.dim)));
    o += m;
  }

  rd.center = center_rows.empty() ? QMat(0, rd.dim)
                                  : row_space_basis(rows_from(center_rows, rd.dim));
  std::vector<QVec> walls;
  for (const QVec& a : rd.simple_roots) walls.push_back(-a);
  rd.antidominant = dd_convert(rows_from(walls, rd.dim), QMat(0, rd.dim), rd.dim);
  return rd;
}

QVec modular_character(const RootDatum& rd) { return rd.two_rho; }

SplitVerdict simple_factor_split(const RootDatum& rd, const QMat& subspace) {
  SplitVerdict v;
  if (subspace.rows() == 0) {
    v.kind = SplitKind::FactorSum;
    return v;
  }
  const int rs = rank_of(subspace);
  if (rd.center.rows() > 0) {
    int joint = rank_of(stack_rows(subspace, rd.center));
    if (joint < rs + static_cast<int>(rd.center.rows())) {
      v.kind = SplitKind::MeetsCenter;
      return v;
    }
  }
  QMat accum(0, rd.dim);
  int acc_rank = 0;
  for (size_t i = 0; i < rd.factor_spans.size(); ++i) {
    const QMat& sp = rd.factor_spans[i];
    if (sp.rows() == 0) continue;
    if (subspace_of(sp, subspace)) {
      v.factor_indices.push_back(static_cast<int>(i));
      accum = stack_rows(accum, sp);
      acc_rank += static_cast<int>(sp.rows());
    }
  }
  if (acc_rank == rs && subspace_of(subspace, accum.rows() ? accum : QMat(0, rd.dim))) {
    v.kind = SplitKind::FactorSum;
    return v;
  }
  v.kind = SplitKind::Neither;
  v.factor_indices.clear();
  return v;
}

}  // namespace critfan

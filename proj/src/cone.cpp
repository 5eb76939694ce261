#include "critfan/cone.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace critfan {

namespace {

using Bits = std::vector<uint64_t>;

Bits bits_make(int n) { return Bits((n + 63) / 64, 0); }
void bits_set(Bits& b, int i) { b[i >> 6] |= uint64_t(1) << (i & 63); }

bool bits_superset(const Bits& a, const Bits& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if ((a[i] & b[i]) != b[i]) return false;
  return true;
}

Bits bits_and(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}

struct DDRay {
  QVec v;
  Bits zero;  // tight constraints among those processed so far
};

Rational dot(const QVec& a, const QVec& b) { return a.dot(b); }

// Incremental double description with explicit lineality handling.  Returns
// the canonical (lineality basis, extreme rays) pair of
// {x : ineqs x >= 0, eqs x = 0}.
std::pair<QMat, QMat> dd_core(const QMat& ineqs, const QMat& eqs, int dim) {
  struct Constraint {
    QVec a;
    bool eq;
  };
  std::vector<Constraint> cs;
  cs.reserve(static_cast<size_t>(eqs.rows() + ineqs.rows()));
  for (Eigen::Index i = 0; i < eqs.rows(); ++i)
    cs.push_back({eqs.row(i).transpose(), true});
  for (Eigen::Index i = 0; i < ineqs.rows(); ++i)
    cs.push_back({ineqs.row(i).transpose(), false});
  const int total = static_cast<int>(cs.size());

  std::vector<QVec> lin;
  for (int i = 0; i < dim; ++i) {
    QVec e = QVec::Zero(dim);
    e[i] = 1;
    lin.push_back(e);
  }
  std::vector<DDRay> rays;

  for (int step = 0; step < total; ++step) {
    const QVec& a = cs[static_cast<size_t>(step)].a;
    const bool eq = cs[static_cast<size_t>(step)].eq;

    int bi = -1;
    for (size_t l = 0; l < lin.size(); ++l)
      if (dot(a, lin[l]) != 0) { bi = static_cast<int>(l); break; }

    if (bi >= 0) {
      QVec b = lin[static_cast<size_t>(bi)];
      Rational ab = dot(a, b);
      if (ab < 0) { b = -b; ab = -ab; }
      lin.erase(lin.begin() + bi);
      for (auto& l : lin) {
        Rational coef = dot(a, l) / ab;
        if (coef != 0) l -= coef * b;
      }
      for (auto& r : rays) {
        Rational coef = dot(a, r.v) / ab;
        if (coef != 0) r.v = primitive(r.v - coef * b);
        bits_set(r.zero, step);
      }
      if (!eq) {
        DDRay nb;
        nb.v = primitive(b);
        nb.zero = bits_make(total);
        for (int j = 0; j < step; ++j) bits_set(nb.zero, j);
        rays.push_back(std::move(nb));
      }
      continue;
    }

    std::vector<int> pos, zero, neg;
    std::vector<Rational> val(rays.size());
    for (size_t r = 0; r < rays.size(); ++r) {
      val[r] = dot(a, rays[r].v);
      if (val[r] > 0) pos.push_back(static_cast<int>(r));
      else if (val[r] < 0) neg.push_back(static_cast<int>(r));
      else zero.push_back(static_cast<int>(r));
    }

    auto adjacent = [&](int i, int j) {
      Bits common = bits_and(rays[static_cast<size_t>(i)].zero,
                             rays[static_cast<size_t>(j)].zero);
      for (size_t k = 0; k < rays.size(); ++k) {
        if (static_cast<int>(k) == i || static_cast<int>(k) == j) continue;
        if (bits_superset(rays[k].zero, common)) return false;
      }
      return true;
    };

    std::vector<DDRay> next;
    auto keep = [&](int r) {
      DDRay k = rays[static_cast<size_t>(r)];
      if (val[static_cast<size_t>(r)] == 0) bits_set(k.zero, step);
      next.push_back(std::move(k));
    };
    if (!eq)
      for (int r : pos) keep(r);
    for (int r : zero) keep(r);
    for (int p : pos)
      for (int n : neg) {
        if (!adjacent(p, n)) continue;
        DDRay w;
        w.v = primitive(val[static_cast<size_t>(p)] * rays[static_cast<size_t>(n)].v -
                        val[static_cast<size_t>(n)] * rays[static_cast<size_t>(p)].v);
        w.zero = bits_and(rays[static_cast<size_t>(p)].zero,
                          rays[static_cast<size_t>(n)].zero);
        bits_set(w.zero, step);
        next.push_back(std::move(w));
      }
    rays = std::move(next);
  }

  QMat lin_basis = row_space_basis(rows_from(lin, dim));
  std::vector<int> pivots;
  for (Eigen::Index i = 0; i < lin_basis.rows(); ++i)
    for (Eigen::Index j = 0; j < lin_basis.cols(); ++j)
      if (lin_basis(i, j) != 0) { pivots.push_back(static_cast<int>(j)); break; }

  std::vector<QVec> out;
  for (auto& r : rays) {
    QVec v = primitive(reduce_mod_rows(r.v, lin_basis, pivots));
    if (is_zero_vec(v)) continue;
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const QVec& a, const QVec& b) { return a == b; }),
            out.end());
  return {lin_basis, rows_from(out, dim)};
}

void check_width(const QMat& m, int dim, const char* what) {
  if (m.rows() > 0 && m.cols() != dim)
    throw DimensionMismatch(std::string(what) + " width " +
                            std::to_string(m.cols()) + " vs ambient dim " +
                            std::to_string(dim));
}

QMat empty_rows(int dim) { return QMat(0, dim); }

}  // namespace

QVec Cone::relint_point() const {
  QVec p = QVec::Zero(dim);
  for (Eigen::Index i = 0; i < rays.rows(); ++i) p += rays.row(i).transpose();
  return p;
}

Cone dd_convert(const QMat& ineqs, const QMat& eqs, int dim) {
  check_width(ineqs, dim, "ineqs");
  check_width(eqs, dim, "eqs");
  Cone c;
  c.dim = dim;
  auto [lin, rays] = dd_core(ineqs.rows() ? ineqs : empty_rows(dim),
                             eqs.rows() ? eqs : empty_rows(dim), dim);
  c.lineality = lin;
  c.rays = rays;
  auto [deq, dineq] = dd_core(rays.rows() ? rays : empty_rows(dim),
                              lin.rows() ? lin : empty_rows(dim), dim);
  c.eqs = deq;
  c.ineqs = dineq;
  return c;
}

Cone cone_from_rays(const QMat& gens, const QMat& lineality, int dim) {
  check_width(gens, dim, "gens");
  check_width(lineality, dim, "lineality");
  auto [deq, dineq] = dd_core(gens.rows() ? gens : empty_rows(dim),
                              lineality.rows() ? lineality : empty_rows(dim), dim);
  Cone c;
  c.dim = dim;
  c.eqs = deq;
  c.ineqs = dineq;
  auto [lin, rays] = dd_core(c.ineqs, c.eqs, dim);
  c.lineality = lin;
  c.rays = rays;
  return c;
}

Cone zero_cone(int dim) { return cone_from_rays(empty_rows(dim), empty_rows(dim), dim); }

Cone full_space(int dim) { return dd_convert(empty_rows(dim), empty_rows(dim), dim); }

bool same_cone(const Cone& a, const Cone& b) {
  return a.dim == b.dim && mat_eq(a.rays, b.rays) && mat_eq(a.lineality, b.lineality) &&
         mat_eq(a.ineqs, b.ineqs) && mat_eq(a.eqs, b.eqs);
}

bool cone_contains(const Cone& c, const QVec& x) {
  if (x.size() != c.dim) throw DimensionMismatch("point size vs cone dim");
  for (Eigen::Index i = 0; i < c.eqs.rows(); ++i)
    if (c.eqs.row(i).transpose().dot(x) != 0) return false;
  for (Eigen::Index i = 0; i < c.ineqs.rows(); ++i)
    if (c.ineqs.row(i).transpose().dot(x) < 0) return false;
  return true;
}

bool cone_relint_contains(const Cone& c, const QVec& x) {
  if (x.size() != c.dim) throw DimensionMismatch("point size vs cone dim");
  for (Eigen::Index i = 0; i < c.eqs.rows(); ++i)
    if (c.eqs.row(i).transpose().dot(x) != 0) return false;
  for (Eigen::Index i = 0; i < c.ineqs.rows(); ++i)
    if (c.ineqs.row(i).transpose().dot(x) <= 0) return false;
  return true;
}

Cone intersect_cones(const Cone& a, const Cone& b) {
  if (a.dim != b.dim) throw DimensionMismatch("cone dims differ");
  return dd_convert(stack_rows(a.ineqs, b.ineqs), stack_rows(a.eqs, b.eqs), a.dim);
}

Cone intersect_halfspace(const Cone& c, const QVec& f) {
  return dd_convert(stack_rows(c.ineqs, f.transpose()), c.eqs, c.dim);
}

Cone intersect_hyperplane(const Cone& c, const QVec& f) {
  return dd_convert(c.ineqs, stack_rows(c.eqs, f.transpose()), c.dim);
}

std::vector<Cone> faces(const Cone& c) {
  if (!c.pointed())
    throw PointednessViolation("faces requires a pointed cone");
  const int nr = c.n_rays();
  const int nf = static_cast<int>(c.ineqs.rows());
  std::vector<Bits> tight(static_cast<size_t>(nf));
  for (int i = 0; i < nf; ++i) {
    tight[static_cast<size_t>(i)] = bits_make(nr);
    for (int r = 0; r < nr; ++r)
      if (c.ineqs.row(i).transpose().dot(QVec(c.rays.row(r).transpose())) == 0)
        bits_set(tight[static_cast<size_t>(i)], r);
  }
  Bits top = bits_make(nr);
  for (int r = 0; r < nr; ++r) bits_set(top, r);
  std::set<Bits> seen;
  std::vector<Bits> queue{top, bits_make(nr)};
  seen.insert(top);
  seen.insert(bits_make(nr));
  while (!queue.empty()) {
    Bits f = queue.back();
    queue.pop_back();
    for (int i = 0; i < nf; ++i) {
      Bits child = bits_and(f, tight[static_cast<size_t>(i)]);
      if (seen.insert(child).second) queue.push_back(child);
    }
  }
  std::vector<Cone> out;
  out.reserve(seen.size());
  for (const Bits& b : seen) {
    std::vector<QVec> gens;
    for (int r = 0; r < nr; ++r)
      if (b[static_cast<size_t>(r >> 6)] >> (r & 63) & 1)
        gens.push_back(c.rays.row(r).transpose());
    out.push_back(cone_from_rays(rows_from(gens, c.dim), empty_rows(c.dim), c.dim));
  }
  std::sort(out.begin(), out.end(), [](const Cone& a, const Cone& b) {
    if (a.cone_dim() != b.cone_dim()) return a.cone_dim() < b.cone_dim();
    if (a.n_rays() != b.n_rays()) return a.n_rays() < b.n_rays();
    for (int r = 0; r < a.n_rays(); ++r) {
      QVec ra = a.rays.row(r).transpose(), rb = b.rays.row(r).transpose();
      if (ra != rb) return lex_less(ra, rb);
    }
    return false;
  });
  return out;
}

bool is_face_of(const Cone& b, const Cone& a) {
  if (b.dim != a.dim) return false;
  for (int r = 0; r < b.n_rays(); ++r)
    if (!cone_contains(a, b.rays.row(r).transpose())) return false;
  if (b.is_zero()) return a.pointed();
  // b must be cut out of a by the ineqs of a vanishing on it
  QMat extra_eqs = a.eqs;
  for (Eigen::Index i = 0; i < a.ineqs.rows(); ++i) {
    bool tight = true;
    for (int r = 0; r < b.n_rays() && tight; ++r)
      if (a.ineqs.row(i).transpose().dot(QVec(b.rays.row(r).transpose())) != 0)
        tight = false;
    for (Eigen::Index l = 0; l < b.lineality.rows() && tight; ++l)
      if (a.ineqs.row(i).transpose().dot(QVec(b.lineality.row(l).transpose())) != 0)
        tight = false;
    if (tight) extra_eqs = stack_rows(extra_eqs, QMat(a.ineqs.row(i)));
  }
  return same_cone(b, dd_convert(a.ineqs, extra_eqs, a.dim));
}

Sign relint_sign(const QVec& f, const Cone& c) {
  if (f.size() != c.dim) throw DimensionMismatch("functional size vs cone dim");
  if (c.is_zero()) return Sign::Zero;
  for (Eigen::Index l = 0; l < c.lineality.rows(); ++l)
    if (f.dot(QVec(c.lineality.row(l).transpose())) != 0) return Sign::Mixed;
  bool pos = false, neg = false;
  for (int r = 0; r < c.n_rays(); ++r) {
    Rational v = f.dot(QVec(c.rays.row(r).transpose()));
    if (v > 0) pos = true;
    else if (v < 0) neg = true;
  }
  if (pos && neg) return Sign::Mixed;
  if (pos) return Sign::Positive;
  if (neg) return Sign::Negative;
  return Sign::Zero;
}

namespace {

struct PartitionSetup {
  std::vector<QVec> h;  // facet functionals
  QVec sigma;
};

PartitionSetup partition_setup(const Cone& c) {
  if (!c.pointed())
    throw PointednessViolation("cone partition requires a pointed cone");
  PartitionSetup s;
  s.sigma = QVec::Zero(c.dim);
  for (Eigen::Index i = 0; i < c.ineqs.rows(); ++i) {
    s.h.push_back(c.ineqs.row(i).transpose());
    s.sigma += s.h.back();
  }
  return s;
}

// Sign patterns the translated facets realize on c \ {0}: S is realized when
// some point has h_i <= delta*sigma exactly for i in S.
bool pattern_realized(const Cone& c, const PartitionSetup& s, const Rational& delta,
                      const std::vector<int>& S_mask, QVec* witness) {
  QMat in = c.ineqs;
  for (size_t i = 0; i < s.h.size(); ++i) {
    QVec g = delta * s.sigma - s.h[i];
    if (!S_mask[i]) g = -g;
    in = stack_rows(in, g.transpose());
  }
  Cone k = dd_convert(in, c.eqs, c.dim);
  if (k.is_zero()) return false;
  QVec v0 = k.relint_point();
  for (size_t j = 0; j < s.h.size(); ++j) {
    if (S_mask[j]) continue;
    if ((s.h[j] - delta * s.sigma).dot(v0) <= 0) return false;
  }
  if (witness) *witness = v0;
  return true;
}

std::set<std::vector<int>> face_patterns(const Cone& c, const PartitionSetup& s) {
  std::set<std::vector<int>> out;
  for (const Cone& d : faces(c)) {
    if (d.is_zero()) continue;
    std::vector<int> mask(s.h.size(), 0);
    for (size_t i = 0; i < s.h.size(); ++i) {
      bool tight = true;
      for (int r = 0; r < d.n_rays() && tight; ++r)
        if (s.h[i].dot(QVec(d.rays.row(r).transpose())) != 0) tight = false;
      mask[i] = tight ? 1 : 0;
    }
    out.insert(mask);
  }
  return out;
}

bool partition_valid(const Cone& c, const PartitionSetup& s, const Rational& delta,
                     const std::set<std::vector<int>>& allowed) {
  const size_t m = s.h.size();
  if (m > 16)
    throw DeltaTooLarge("facet count " + std::to_string(m) +
                        " too large for pattern enumeration");
  std::vector<int> mask(m, 0);
  for (uint32_t bits = 0; bits < (uint32_t(1) << m); ++bits) {
    for (size_t i = 0; i < m; ++i) mask[i] = (bits >> i) & 1;
    if (allowed.count(mask)) continue;
    if (pattern_realized(c, s, delta, mask, nullptr)) return false;
  }
  return true;
}

}  // namespace

Rational delta_max(const Cone& c) {
  PartitionSetup s = partition_setup(c);
  auto allowed = face_patterns(c, s);
  Rational delta = 1;
  for (int k = 0; k <= 20; ++k) {
    if (partition_valid(c, s, delta, allowed)) return delta;
    delta /= 2;
  }
  throw DeltaTooLarge("no valid delta of the form 1/2^k with k <= 20");
}

std::vector<PartitionRegion> cone_partition(const Cone& c, const Rational& delta) {
  PartitionSetup s = partition_setup(c);
  auto allowed = face_patterns(c, s);
  if (!partition_valid(c, s, delta, allowed)) {
    std::string dm = "none";
    try {
      dm = to_string(delta_max(c));
    } catch (const DeltaTooLarge&) {
    }
    throw DeltaTooLarge("pattern condition fails at delta = " + to_string(delta) +
                        ", delta_max = " + dm);
  }
  std::vector<PartitionRegion> out;
  for (const Cone& d : faces(c)) {
    if (d.is_zero()) continue;
    PartitionRegion reg;
    std::vector<QVec> weak, strict;
    for (size_t i = 0; i < s.h.size(); ++i) {
      bool tight = true;
      for (int r = 0; r < d.n_rays() && tight; ++r)
        if (s.h[i].dot(QVec(d.rays.row(r).transpose())) != 0) tight = false;
      if (tight) {
        reg.face_index.push_back(static_cast<int>(i));
        weak.push_back(delta * s.sigma - s.h[i]);
      } else {
        strict.push_back(s.h[i] - delta * s.sigma);
      }
    }
    reg.weak = rows_from(weak, c.dim);
    reg.strict = rows_from(strict, c.dim);
    out.push_back(std::move(reg));
  }
  return out;
}

bool region_contains(const Cone& c, const PartitionRegion& r, const QVec& x) {
  if (!cone_contains(c, x)) return false;
  for (Eigen::Index i = 0; i < r.weak.rows(); ++i)
    if (r.weak.row(i).transpose().dot(x) < 0) return false;
  for (Eigen::Index i = 0; i < r.strict.rows(); ++i)
    if (r.strict.row(i).transpose().dot(x) <= 0) return false;
  return true;
}

}  // namespace critfan

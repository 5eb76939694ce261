#include "critfan/fan.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace critfan {

namespace {

std::vector<int> sorted_ray_indices(const Cone& c, const std::vector<QVec>& rays) {
  std::vector<int> idx;
  for (int r = 0; r < c.n_rays(); ++r) {
    QVec v = c.rays.row(r).transpose();
    auto it = std::lower_bound(rays.begin(), rays.end(), v, lex_less);
    if (it == rays.end() || !vec_eq(*it, v)) return {-1};
    idx.push_back(static_cast<int>(it - rays.begin()));
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Pulling triangulation of a pointed cone, driven purely by the incidence of
// rays with facet inequalities.  Faces are ray index sets; the facets of a
// face are the maximal proper intersections with the tight sets of the ineq
// rows.  Each face is split into joins of its lex-least ray (row order of a
// canonical cone is lex order) with the facets missing that ray, which is
// exactly what pulling every ray of the ambient fan in lex order does to
// this cone.
struct Puller {
  std::vector<std::vector<int>> tight;
  std::map<std::vector<int>, std::vector<std::vector<int>>> memo;

  explicit Puller(const Cone& c) {
    tight.resize(static_cast<size_t>(c.ineqs.rows()));
    for (Eigen::Index i = 0; i < c.ineqs.rows(); ++i)
      for (int r = 0; r < c.n_rays(); ++r)
        if (c.ineqs.row(i).transpose().dot(QVec(c.rays.row(r).transpose())) == 0)
          tight[static_cast<size_t>(i)].push_back(r);
  }

  const std::vector<std::vector<int>>& run(const std::vector<int>& face, int fdim) {
    auto it = memo.find(face);
    if (it != memo.end()) return it->second;
    std::vector<std::vector<int>> out;
    if (face.size() == static_cast<size_t>(fdim)) {
      out.push_back(face);
    } else {
      std::set<std::vector<int>> cand;
      for (const std::vector<int>& t : tight) {
        std::vector<int> cut;
        std::set_intersection(face.begin(), face.end(), t.begin(), t.end(),
                              std::back_inserter(cut));
        if (cut.size() < face.size()) cand.insert(std::move(cut));
      }
      int v = face.front();
      for (const std::vector<int>& t : cand) {
        bool maximal = true;
        for (const std::vector<int>& u : cand)
          if (u.size() > t.size() &&
              std::includes(u.begin(), u.end(), t.begin(), t.end())) {
            maximal = false;
            break;
          }
        if (!maximal || std::binary_search(t.begin(), t.end(), v)) continue;
        for (const std::vector<int>& s : run(t, fdim - 1)) {
          std::vector<int> simplex;
          simplex.reserve(s.size() + 1);
          simplex.push_back(v);
          simplex.insert(simplex.end(), s.begin(), s.end());
          std::sort(simplex.begin(), simplex.end());
          out.push_back(std::move(simplex));
        }
      }
    }
    return memo.emplace(face, std::move(out)).first->second;
  }
};

std::vector<std::vector<int>> pulling_simplices(const Cone& c) {
  Puller p(c);
  std::vector<int> top(static_cast<size_t>(c.n_rays()));
  for (int r = 0; r < c.n_rays(); ++r) top[static_cast<size_t>(r)] = r;
  return p.run(top, c.cone_dim());
}

}  // namespace

int Fan::ray_index(const QVec& r) const {
  auto it = std::lower_bound(rays.begin(), rays.end(), r, lex_less);
  if (it == rays.end() || !vec_eq(*it, r)) return -1;
  return static_cast<int>(it - rays.begin());
}

int Fan::cone_index(const std::vector<int>& sorted_ray_idx) const {
  for (size_t i = 0; i < cones.size(); ++i)
    if (cones[i].ray_idx == sorted_ray_idx) return static_cast<int>(i);
  return -1;
}

int Fan::cone_index_of(const Cone& c) const {
  for (size_t i = 0; i < cones.size(); ++i)
    if (same_cone(cones[i].geom, c)) return static_cast<int>(i);
  return -1;
}

std::vector<int> Fan::maximal_cones() const {
  std::vector<int> out;
  for (size_t i = 0; i < cones.size(); ++i) {
    bool proper_subset = false;
    for (size_t j = 0; j < cones.size() && !proper_subset; ++j) {
      if (i == j) continue;
      proper_subset = cones[i].ray_idx.size() < cones[j].ray_idx.size() &&
                      std::includes(cones[j].ray_idx.begin(), cones[j].ray_idx.end(),
                                    cones[i].ray_idx.begin(), cones[i].ray_idx.end());
    }
    if (!proper_subset) out.push_back(static_cast<int>(i));
  }
  return out;
}

int Fan::relint_locate(const QVec& x) const {
  for (auto it = cones.rbegin(); it != cones.rend(); ++it)
    if (cone_relint_contains(it->geom, x))
      return static_cast<int>(cones.rend() - it) - 1;
  return -1;
}

Fan build_fan(int dim, const std::vector<Cone>& maximal, const Cone& support) {
  std::vector<Cone> closed;
  std::set<std::string> seen;
  auto key_of = [](const Cone& c) {
    std::string k = std::to_string(c.n_rays());
    for (int r = 0; r < c.n_rays(); ++r)
      for (int j = 0; j < c.dim; ++j) k += "," + to_string(c.rays(r, j));
    return k;
  };
  for (const Cone& m : maximal) {
    if (m.simplicial() && m.n_rays() < 20) {
      // every subset of the rays of a simplicial cone spans a face, already
      // in canonical order; build the geometry only for subsets not seen yet
      const int nr = m.n_rays();
      for (unsigned mask = 0; mask < (1u << nr); ++mask) {
        QMat gens(__builtin_popcount(mask), dim);
        std::string k = std::to_string(gens.rows());
        Eigen::Index at = 0;
        for (int r = 0; r < nr; ++r) {
          if (!(mask >> r & 1)) continue;
          gens.row(at++) = m.rays.row(r);
          for (int j = 0; j < dim; ++j) k += "," + to_string(m.rays(r, j));
        }
        if (seen.insert(std::move(k)).second)
          closed.push_back(cone_from_rays(gens, QMat(0, dim), dim));
      }
      continue;
    }
    for (Cone& f : faces(m))
      if (seen.insert(key_of(f)).second) closed.push_back(std::move(f));
  }

  Fan fan;
  fan.dim = dim;
  fan.support = support;
  std::vector<QVec> rays;
  for (const Cone& c : closed)
    for (int r = 0; r < c.n_rays(); ++r) rays.push_back(c.rays.row(r).transpose());
  std::sort(rays.begin(), rays.end(), lex_less);
  rays.erase(std::unique(rays.begin(), rays.end(), vec_eq), rays.end());
  fan.rays = std::move(rays);

  for (Cone& c : closed) {
    FanCone fc;
    fc.ray_idx = sorted_ray_indices(c, fan.rays);
    fc.geom = std::move(c);
    fan.cones.push_back(std::move(fc));
  }
  std::sort(fan.cones.begin(), fan.cones.end(), [](const FanCone& a, const FanCone& b) {
    int da = a.geom.cone_dim(), db = b.geom.cone_dim();
    if (da != db) return da < db;
    return a.ray_idx < b.ray_idx;
  });
  return fan;
}

Fan fan_from_hyperplanes(const Cone& base, const std::vector<QVec>& hyps) {
  for (const QVec& h : hyps)
    if (h.size() != base.dim)
      throw DimensionMismatch("hyperplane functional size vs base dim");
  std::vector<Cone> regions{base};
  for (const QVec& h : hyps) {
    std::vector<Cone> next;
    for (const Cone& c : regions) {
      Cone cpos = intersect_halfspace(c, h);
      Cone cneg = intersect_halfspace(c, -h);
      if (same_cone(cpos, cneg)) {
        next.push_back(std::move(cpos));
        continue;
      }
      if (cpos.cone_dim() == c.cone_dim()) next.push_back(std::move(cpos));
      if (cneg.cone_dim() == c.cone_dim()) next.push_back(std::move(cneg));
    }
    regions = std::move(next);
  }
  for (const Cone& c : regions)
    if (!c.pointed())
      throw PointednessViolation("sign region has a lineality space of dim " +
                                 std::to_string(c.lineality_dim()));
  return build_fan(base.dim, regions, base);
}

std::vector<std::string> is_valid_fan(const Fan& f) {
  std::vector<std::string> diags;
  auto ray_name = [&](const FanCone& fc) {
    std::string s = "{";
    for (size_t i = 0; i < fc.ray_idx.size(); ++i)
      s += (i ? "," : "") + std::to_string(fc.ray_idx[i]);
    return s + "}";
  };

  for (size_t i = 0; i + 1 < f.rays.size(); ++i)
    if (!lex_less(f.rays[i], f.rays[i + 1]))
      diags.push_back("ray list not sorted/unique at index " + std::to_string(i));
  for (size_t i = 0; i < f.rays.size(); ++i)
    if (primitive(f.rays[i]) != f.rays[i])
      diags.push_back("ray " + std::to_string(i) + " not primitive");

  for (const FanCone& fc : f.cones) {
    if (!fc.geom.pointed()) {
      diags.push_back("cone " + ray_name(fc) + " not pointed");
      continue;
    }
    std::vector<QVec> listed;
    for (int k : fc.ray_idx) {
      if (k < 0 || k >= static_cast<int>(f.rays.size())) {
        diags.push_back("cone " + ray_name(fc) + " has a bad ray index");
        break;
      }
      listed.push_back(f.rays[static_cast<size_t>(k)]);
    }
    Cone rebuilt = cone_from_rays(rows_from(listed, f.dim), QMat(0, f.dim), f.dim);
    if (!same_cone(rebuilt, fc.geom))
      diags.push_back("cone " + ray_name(fc) + " geometry disagrees with its ray list");
  }
  if (!diags.empty()) return diags;

  std::map<std::vector<int>, int> by_rays;
  for (size_t i = 0; i < f.cones.size(); ++i) {
    if (!by_rays.emplace(f.cones[i].ray_idx, static_cast<int>(i)).second)
      diags.push_back("duplicate cone " + ray_name(f.cones[i]));
  }

  // One-step face closure: every facet of every listed cone must be listed.
  // Facets of a pointed cone are spanned by their incident rays, so the ray
  // subset along each facet inequality identifies the facet without another
  // conversion, and iterating the check over the list closes the whole face
  // lattice.  The subsets double as the ridge data below.
  std::vector<std::vector<std::vector<int>>> facet_sets(f.cones.size());
  for (size_t i = 0; i < f.cones.size(); ++i) {
    const Cone& c = f.cones[i].geom;
    for (Eigen::Index r = 0; r < c.ineqs.rows(); ++r) {
      std::vector<int> sub;
      for (int k : f.cones[i].ray_idx)
        if (c.ineqs.row(r).transpose().dot(f.rays[static_cast<size_t>(k)]) == 0)
          sub.push_back(k);
      if (!by_rays.count(sub))
        diags.push_back("not face-closed: a facet of cone " +
                        ray_name(f.cones[i]) + " is missing");
      facet_sets[i].push_back(std::move(sub));
    }
  }
  if (!diags.empty()) return diags;

  std::vector<int> maximal = f.maximal_cones();
  // Certificate for a maximal pair: with S the shared rays, the sum h of the
  // facet inequalities of A active on S supports A along exactly cone(S) when
  // h is positive on the remaining rays of A; if additionally h <= 0 on B,
  // then A cap B is squeezed onto cone(S).  A symmetric support on the B side
  // makes cone(S) a face of B too.  Falls back to the double description
  // intersection when the certificate is inconclusive.  Rays and facet
  // normals are primitive integer vectors, so the certificate runs in
  // machine integers unless an entry is unexpectedly large.
  const long kSmall = 1L << 20;
  bool small = true;
  auto to_small = [&](const QVec& v, std::vector<long>& out) {
    out.assign(static_cast<size_t>(v.size()), 0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const Rational& q = v(i);
      if (denominator(q) != 1 || abs(numerator(q)) > kSmall) return false;
      out[static_cast<size_t>(i)] = numerator(q).convert_to<long>();
    }
    return true;
  };
  auto idot = [](const std::vector<long>& a, const std::vector<long>& b) {
    long s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  std::vector<std::vector<long>> iray(f.rays.size());
  for (size_t i = 0; i < f.rays.size() && small; ++i)
    small = to_small(f.rays[i], iray[i]);
  std::vector<std::vector<std::vector<long>>> iineq(maximal.size());
  for (size_t a = 0; a < maximal.size() && small; ++a) {
    const QMat& in = f.cones[static_cast<size_t>(maximal[a])].geom.ineqs;
    iineq[a].resize(static_cast<size_t>(in.rows()));
    for (Eigen::Index i = 0; i < in.rows() && small; ++i)
      small = to_small(in.row(i).transpose(), iineq[a][static_cast<size_t>(i)]);
  }
  auto exact_support = [&](size_t which, const std::vector<int>& own,
                           const std::vector<int>& shared, std::vector<long>& h,
                           std::vector<const std::vector<long>*>& act) {
    h.assign(static_cast<size_t>(f.dim), 0);
    act.clear();
    for (const std::vector<long>& row : iineq[which]) {
      bool active = true;
      for (int k : shared)
        if (idot(row, iray[static_cast<size_t>(k)]) != 0) {
          active = false;
          break;
        }
      if (active) {
        act.push_back(&row);
        for (size_t j = 0; j < h.size(); ++j) h[j] += row[j];
      }
    }
    for (int k : own) {
      if (std::binary_search(shared.begin(), shared.end(), k)) continue;
      if (idot(h, iray[static_cast<size_t>(k)]) <= 0) return false;
    }
    return true;
  };
  // When the plain sums fail to separate, search for a strictly positive
  // combination of the active rows of A that is nonpositive on B; one exists
  // whenever the pair genuinely meets along cone(shared).  The variables are
  // eliminated Fourier-Motzkin style and the candidate is then checked
  // outright, so this can only promote pairs the conversion fallback would
  // also accept.
  auto combo_separates = [&](const std::vector<const std::vector<long>*>& act,
                             const std::vector<int>& own,
                             const std::vector<int>& other,
                             const std::vector<int>& shared) {
    const size_t k = act.size();
    if (k < 2 || k > 8) return false;
    using Big = __int128;
    using Row = std::vector<Big>;
    const Big cap = Big(1) << 61;
    std::vector<Row> cons;
    for (int bray : other) {
      Row r(k + 1, 0);
      bool nonzero = false;
      for (size_t i = 0; i < k; ++i) {
        r[i] = idot(*act[i], iray[static_cast<size_t>(bray)]);
        if (r[i] != 0) nonzero = true;
      }
      if (nonzero) cons.push_back(std::move(r));
    }
    for (size_t i = 0; i < k; ++i) {
      Row r(k + 1, 0);
      r[i] = -1;
      r[k] = -1;
      cons.push_back(std::move(r));
    }
    auto big_abs = [](Big v) { return v < 0 ? -v : v; };
    std::vector<std::vector<Row>> layer(k);
    for (size_t j = k; j-- > 0;) {
      layer[j] = cons;
      std::set<Row> next;
      std::vector<size_t> pos, neg;
      for (size_t r = 0; r < cons.size(); ++r) {
        if (cons[r][j] > 0) pos.push_back(r);
        else if (cons[r][j] < 0) neg.push_back(r);
        else next.insert(cons[r]);
      }
      for (size_t p : pos)
        for (size_t n : neg) {
          Big cp = cons[p][j], cn = -cons[n][j];
          if (cp > cap || cn > cap) return false;
          Row merged(k + 1);
          Big g = 0;
          for (size_t t = 0; t <= k; ++t) {
            if (big_abs(cons[p][t]) > cap || big_abs(cons[n][t]) > cap)
              return false;
            merged[t] = cons[p][t] * cn + cons[n][t] * cp;
            Big a = big_abs(merged[t]);
            while (a) {
              Big tmp = g % a;
              g = a;
              a = tmp;
            }
          }
          if (g > 1)
            for (size_t t = 0; t <= k; ++t) merged[t] /= g;
          merged[j] = 0;
          next.insert(std::move(merged));
          if (next.size() > 2000) return false;
        }
      cons.assign(next.begin(), next.end());
    }
    for (const Row& r : cons)
      if (r[k] < 0) return false;
    auto verify = [&](const std::vector<Rational>& c) {
      QVec psi = QVec::Zero(f.dim);
      for (size_t i = 0; i < k; ++i) {
        if (!(c[i] > 0)) return false;
        for (int t = 0; t < f.dim; ++t) {
          Rational add = c[i] * Rational((*act[i])[static_cast<size_t>(t)]);
          psi(t) += add;
        }
      }
      for (int aray : own) {
        if (std::binary_search(shared.begin(), shared.end(), aray)) continue;
        if (!(psi.dot(f.rays[static_cast<size_t>(aray)]) > 0)) return false;
      }
      for (int bray : other)
        if (psi.dot(f.rays[static_cast<size_t>(bray)]) > 0) return false;
      return true;
    };
    // the feasibility certificate is the verified functional, so the witness
    // picked out of the bound stack may be approximated first
    {
      std::vector<long double> cl(k, 0.0L);
      bool ok = true;
      for (size_t j = 0; j < k && ok; ++j) {
        long double lo = 1.0L, hi = 0.0L;
        bool has_hi = false;
        for (const Row& r : layer[j]) {
          if (r[j] == 0) continue;
          long double rest = static_cast<long double>(r[k]);
          for (size_t l = 0; l < j; ++l)
            rest -= static_cast<long double>(r[l]) * cl[l];
          long double bound = rest / static_cast<long double>(r[j]);
          if (r[j] > 0) {
            if (!has_hi || bound < hi) {
              hi = bound;
              has_hi = true;
            }
          } else if (bound > lo) {
            lo = bound;
          }
        }
        if (has_hi && hi < lo) ok = false;
        else cl[j] = has_hi ? (lo + hi) / 2 : lo;
        if (cl[j] > 1e12L) ok = false;
      }
      if (ok) {
        std::vector<Rational> c(k);
        bool positive = true;
        for (size_t j = 0; j < k && positive; ++j) {
          long long numq = llroundl(cl[j] * 1048576.0L);
          if (numq <= 0) positive = false;
          else c[j] = Rational(numq, 1048576);
        }
        if (positive && verify(c)) return true;
      }
    }
    auto to_rational = [](Big v) {
      bool negv = v < 0;
      if (negv) v = -v;
      unsigned long long lo64 = static_cast<unsigned long long>(
          v & Big(0xffffffffffffffffULL));
      unsigned long long hi64 = static_cast<unsigned long long>(v >> 64);
      Rational two32(4294967296LL);
      Rational out = Rational(hi64) * two32 * two32 + Rational(lo64);
      if (negv) out = -out;
      return out;
    };
    std::vector<Rational> c(k, Rational(0));
    for (size_t j = 0; j < k; ++j) {
      Rational lo = 1, hi = 0;
      bool has_hi = false;
      for (const Row& r : layer[j]) {
        if (r[j] == 0) continue;
        Rational rest = to_rational(r[k]);
        for (size_t l = 0; l < j; ++l) {
          Rational term = to_rational(r[l]) * c[l];
          rest -= term;
        }
        Rational bound = rest / to_rational(r[j]);
        if (r[j] > 0) {
          if (!has_hi || bound < hi) {
            hi = bound;
            has_hi = true;
          }
        } else if (bound > lo) {
          lo = bound;
        }
      }
      if (has_hi && hi < lo) return false;
      Rational mid = has_hi ? (lo + hi) / 2 : lo;
      c[j] = mid;
    }
    return verify(c);
  };
  std::vector<long> hA, hB;
  std::vector<const std::vector<long>*> actA, actB;
  auto nonpositive_on = [&](const std::vector<long>& h,
                            const std::vector<int>& idx) {
    for (int k : idx)
      if (idot(h, iray[static_cast<size_t>(k)]) > 0) return false;
    return true;
  };
  for (size_t a = 0; a < maximal.size(); ++a)
    for (size_t b = a + 1; b < maximal.size(); ++b) {
      const FanCone& FA = f.cones[static_cast<size_t>(maximal[a])];
      const FanCone& FB = f.cones[static_cast<size_t>(maximal[b])];
      std::vector<int> shared;
      std::set_intersection(FA.ray_idx.begin(), FA.ray_idx.end(),
                            FB.ray_idx.begin(), FB.ray_idx.end(),
                            std::back_inserter(shared));
      if (small && by_rays.count(shared) &&
          exact_support(a, FA.ray_idx, shared, hA, actA) &&
          exact_support(b, FB.ray_idx, shared, hB, actB)) {
        if (nonpositive_on(hA, FB.ray_idx) || nonpositive_on(hB, FA.ray_idx) ||
            combo_separates(actA, FA.ray_idx, FB.ray_idx, shared))
          continue;
      }
      Cone I = intersect_cones(FA.geom, FB.geom);
      // the duplicate and geometry checks above make ray_idx a unique key, so
      // the intersection can be located without scanning the cone list
      std::vector<int> iidx;
      bool listed = true;
      for (int r = 0; r < I.n_rays() && listed; ++r) {
        int gi = f.ray_index(I.rays.row(r).transpose());
        if (gi < 0) listed = false;
        else iidx.push_back(gi);
      }
      std::sort(iidx.begin(), iidx.end());
      auto hit = listed ? by_rays.find(iidx) : by_rays.end();
      if (hit == by_rays.end() ||
          !same_cone(f.cones[static_cast<size_t>(hit->second)].geom, I) ||
          !is_face_of(I, FA.geom) || !is_face_of(I, FB.geom))
        diags.push_back("intersection not a common face: cones " + ray_name(FA) +
                        " and " + ray_name(FB));
    }
  if (!diags.empty()) return diags;

  const int sd = f.support.cone_dim();
  for (const FanCone& fc : f.cones)
    for (int r = 0; r < fc.geom.n_rays(); ++r)
      if (!cone_contains(f.support, fc.geom.rays.row(r).transpose()))
        diags.push_back("cone " + ray_name(fc) + " leaves the support");
  for (int m : maximal)
    if (f.cones[static_cast<size_t>(m)].geom.cone_dim() != sd)
      diags.push_back("maximal cone " + ray_name(f.cones[static_cast<size_t>(m)]) +
                      " has dimension below the support");
  if (!diags.empty()) return diags;

  // ridge test: an interior codim-1 face of a maximal cone must be shared by
  // exactly two maximal cones, a boundary one by exactly one
  std::map<std::vector<int>, std::set<int>> ridge_owners;
  for (int m : maximal)
    for (const std::vector<int>& sub : facet_sets[static_cast<size_t>(m)])
      ridge_owners[sub].insert(m);
  for (auto& [idx, owners] : ridge_owners) {
    bool boundary = false;
    for (Eigen::Index i = 0; i < f.support.ineqs.rows() && !boundary; ++i) {
      bool tight = true;
      for (size_t r = 0; r < idx.size() && tight; ++r)
        if (f.support.ineqs.row(i).transpose().dot(
                f.rays[static_cast<size_t>(idx[r])]) != 0)
          tight = false;
      boundary = tight;
    }
    size_t expected = boundary ? 1 : 2;
    if (owners.size() < expected)
      diags.push_back("support not covered along a ridge of " +
                      std::to_string(owners.size()) + " owner(s)");
    else if (owners.size() > expected)
      diags.push_back("cones overlap along a ridge with " +
                      std::to_string(owners.size()) + " owners");
  }
  return diags;
}

Fan star_subdivide(const Fan& f, const QVec& v) {
  QVec w = primitive(v);
  if (f.relint_locate(w) < 0) throw NotInFan("subdivision point outside the support");
  std::vector<int> maximal = f.maximal_cones();
  std::vector<Cone> next;
  for (int m : maximal) {
    const Cone& M = f.cones[static_cast<size_t>(m)].geom;
    if (!cone_contains(M, w)) {
      next.push_back(M);
      continue;
    }
    for (const Cone& F : faces(M)) {
      if (F.cone_dim() != M.cone_dim() - 1 || cone_contains(F, w)) continue;
      QMat gens = stack_rows(F.rays, QMat(w.transpose()));
      next.push_back(cone_from_rays(gens, QMat(0, f.dim), f.dim));
    }
  }
  return build_fan(f.dim, next, f.support);
}

Fan stellar_refine_to_simplicial(const Fan& f,
                                 const std::vector<std::optional<QVec>>* avoid) {
  if (avoid && avoid->size() != f.cones.size())
    throw DimensionMismatch("avoid list size vs cone count");
  std::vector<Cone> pieces;
  for (int m : f.maximal_cones()) {
    const Cone& M = f.cones[static_cast<size_t>(m)].geom;
    if (M.simplicial()) {
      pieces.push_back(M);
      continue;
    }
    if (!M.pointed())
      throw PointednessViolation("refinement requires pointed cones");
    for (const std::vector<int>& s : pulling_simplices(M)) {
      QMat gens(static_cast<Eigen::Index>(s.size()), f.dim);
      for (size_t r = 0; r < s.size(); ++r)
        gens.row(static_cast<Eigen::Index>(r)) = M.rays.row(s[r]);
      pieces.push_back(cone_from_rays(gens, QMat(0, f.dim), f.dim));
    }
  }
  Fan cur = build_fan(f.dim, pieces, f.support);

  auto all_simplicial = [](const Fan& g) {
    for (int m : g.maximal_cones())
      if (!g.cones[static_cast<size_t>(m)].geom.simplicial()) return false;
    return true;
  };

  int guard = 0;
  while (!all_simplicial(cur)) {
    if (++guard > 64)
      throw RefinementObstruction("refinement failed to terminate");
    int bad = -1;
    for (int m : cur.maximal_cones())
      if (!cur.cones[static_cast<size_t>(m)].geom.simplicial()) { bad = m; break; }
    const Cone& M = cur.cones[static_cast<size_t>(bad)].geom;
    // two rays of M that do not span a 2-face
    auto face_idx = faces(M);
    QVec r1, r2;
    bool found = false;
    for (int a = 0; a < M.n_rays() && !found; ++a)
      for (int b = a + 1; b < M.n_rays() && !found; ++b) {
        Cone edge = cone_from_rays(
            stack_rows(QMat(M.rays.row(a)), QMat(M.rays.row(b))), QMat(0, cur.dim), cur.dim);
        bool is_face = false;
        for (const Cone& F : face_idx)
          if (same_cone(F, edge)) { is_face = true; break; }
        if (!is_face) {
          r1 = M.rays.row(a).transpose();
          r2 = M.rays.row(b).transpose();
          found = true;
        }
      }
    if (!found)
      throw RefinementObstruction("non-simplicial cone without a splitting ray pair");
    QVec w;
    bool picked = false;
    for (int a = 1; a <= 3 && !picked; ++a)
      for (int b = 1; b <= 3 && !picked; ++b) {
        QVec cand = primitive(Rational(a) * r1 + Rational(b) * r2);
        int src = f.relint_locate(cand);
        const QVec* constraint =
            (avoid && src >= 0) ? (((*avoid)[static_cast<size_t>(src)]) ? &*(*avoid)[static_cast<size_t>(src)] : nullptr)
                                : nullptr;
        if (constraint && constraint->dot(cand) == 0) continue;
        w = cand;
        picked = true;
      }
    if (!picked)
      throw RefinementObstruction("every candidate ray lies in the avoid kernel");
    cur = star_subdivide(cur, w);
  }
  return cur;
}

StarFan star_fan(const Fan& f, const Cone& d) {
  int di = f.cone_index_of(d);
  if (di < 0) throw NotInFan("star centre is not a cone of the fan");
  StarFan out;
  if (d.is_zero()) {
    out.fan = f;
    out.projection = QMat::Zero(f.dim, f.dim);
    for (int i = 0; i < f.dim; ++i) out.projection(i, i) = 1;
    out.source_cone.resize(f.cones.size());
    for (size_t i = 0; i < f.cones.size(); ++i) out.source_cone[i] = static_cast<int>(i);
    return out;
  }

  QMat span_basis = row_space_basis(d.rays);
  std::vector<int> pivots;
  for (Eigen::Index i = 0; i < span_basis.rows(); ++i)
    for (Eigen::Index j = 0; j < span_basis.cols(); ++j)
      if (span_basis(i, j) != 0) { pivots.push_back(static_cast<int>(j)); break; }
  std::vector<bool> is_pivot(static_cast<size_t>(f.dim), false);
  for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;
  const int qdim = f.dim - static_cast<int>(span_basis.rows());
  QMat proj(qdim, f.dim);
  {
    int row = 0;
    QMat reduce = QMat::Zero(f.dim, f.dim);
    for (int i = 0; i < f.dim; ++i) reduce(i, i) = 1;
    for (int j = 0; j < f.dim; ++j) {
      QVec col = reduce_mod_rows(QVec(reduce.col(j)), span_basis, pivots);
      reduce.col(j) = col;
    }
    for (int j = 0; j < f.dim; ++j) {
      if (is_pivot[static_cast<size_t>(j)]) continue;
      proj.row(row++) = reduce.row(j);
    }
  }

  const std::vector<int>& d_rays = f.cones[static_cast<size_t>(di)].ray_idx;
  std::vector<Cone> images;
  std::vector<int> sources;
  std::set<std::string> seen;
  for (size_t ci = 0; ci < f.cones.size(); ++ci) {
    const FanCone& fc = f.cones[ci];
    if (!std::includes(fc.ray_idx.begin(), fc.ray_idx.end(), d_rays.begin(), d_rays.end()))
      continue;
    QMat gens(fc.geom.n_rays(), qdim);
    for (int r = 0; r < fc.geom.n_rays(); ++r)
      gens.row(r) = (proj * fc.geom.rays.row(r).transpose()).transpose();
    Cone img = cone_from_rays(gens, QMat(0, qdim), qdim);
    if (!img.pointed())
      throw PointednessViolation("quotient image of a star cone is not pointed");
    std::string key = std::to_string(img.n_rays());
    for (int r = 0; r < img.n_rays(); ++r)
      for (int j = 0; j < qdim; ++j) key += "," + to_string(img.rays(r, j));
    if (!seen.insert(key).second) continue;
    images.push_back(std::move(img));
    sources.push_back(static_cast<int>(ci));
  }

  Fan sf;
  sf.dim = qdim;
  std::vector<QVec> rays;
  for (const Cone& c : images)
    for (int r = 0; r < c.n_rays(); ++r) rays.push_back(c.rays.row(r).transpose());
  std::sort(rays.begin(), rays.end(), lex_less);
  rays.erase(std::unique(rays.begin(), rays.end(), vec_eq), rays.end());
  sf.rays = std::move(rays);
  {
    QMat all = rows_from(sf.rays, qdim);
    sf.support = cone_from_rays(all, QMat(0, qdim), qdim);
  }
  std::vector<size_t> order(images.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::vector<int>> idx(images.size());
  for (size_t i = 0; i < images.size(); ++i) idx[i] = sorted_ray_indices(images[i], sf.rays);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    int da = images[a].cone_dim(), db = images[b].cone_dim();
    if (da != db) return da < db;
    return idx[a] < idx[b];
  });
  for (size_t i : order) {
    FanCone fc;
    fc.ray_idx = idx[i];
    fc.geom = images[i];
    sf.cones.push_back(fc);
    out.source_cone.push_back(sources[i]);
  }
  out.fan = std::move(sf);
  return out;
}

}  // namespace critfan

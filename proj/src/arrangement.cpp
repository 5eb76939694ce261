#include "critfan/arrangement.hpp"

#include <algorithm>
#include <map>

namespace critfan {

namespace {

// canonical orientation for a hyperplane normal: primitive with positive
// leading entry
QVec hyperplane_rep(const QVec& h) {
  QVec p = primitive(h);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (p[i] < 0) p = -p;
    break;
  }
  return p;
}

}  // namespace

ExponentArrangement build_arrangement(const RootDatum& rd, const WeightMultiset& w) {
  ExponentArrangement a;
  a.datum = rd;
  a.weights = w;
  a.kernel = action_kernel(w, rd);
  if (a.kernel.verdict == KernelVerdict::CentralTrivial)
    throw CentralTorusActsTrivially(
        "the weights annihilate a central direction; no arrangement exists");
  if (a.kernel.verdict == KernelVerdict::Irregular)
    throw IrregularKernel("the action kernel is not a sum of simple factor spans");

  std::vector<QVec> walls;
  for (const QVec& s : rd.simple_roots) walls.push_back(-s);
  QMat base_eqs(0, rd.dim);
  if (a.kernel.a0.rows() > 0) base_eqs = kernel_basis(a.kernel.a_prime);
  Cone base = dd_convert(rows_from(walls, rd.dim), base_eqs, rd.dim);

  std::vector<QVec> hyps;
  for (const auto& [v, m] : w.entries)
    if (!is_zero_vec(v)) hyps.push_back(hyperplane_rep(v));
  for (const QVec& s : rd.simple_roots) hyps.push_back(hyperplane_rep(s));
  std::sort(hyps.begin(), hyps.end(), lex_less);
  hyps.erase(std::unique(hyps.begin(), hyps.end(), vec_eq), hyps.end());

  a.fan = fan_from_hyperplanes(base, hyps);

  a.exponents.reserve(a.fan.cones.size());
  for (const FanCone& fc : a.fan.cones) {
    QVec chi = QVec::Zero(rd.dim);
    for (const auto& [v, m] : w.entries)
      if (relint_sign(v, fc.geom) == Sign::Positive) chi -= Rational(m) * v;
    a.exponents.push_back({{chi, 1}});
  }
  return a;
}

namespace {

// pairing profile of a functional against the rays of a cone
std::vector<Rational> restriction_key(const QVec& chi, const Cone& c) {
  std::vector<Rational> key;
  key.reserve(static_cast<size_t>(c.n_rays()));
  for (int r = 0; r < c.n_rays(); ++r)
    key.push_back(chi.dot(QVec(c.rays.row(r).transpose())));
  return key;
}

}  // namespace

std::vector<std::string> check_compatibility(const ExponentArrangement& a) {
  std::vector<std::string> diags;
  const auto& cones = a.fan.cones;
  for (size_t i = 0; i < cones.size(); ++i) {
    for (size_t j = 0; j < cones.size(); ++j) {
      if (i == j) continue;
      if (!std::includes(cones[j].ray_idx.begin(), cones[j].ray_idx.end(),
                         cones[i].ray_idx.begin(), cones[i].ray_idx.end()))
        continue;
      // cones[i] is a face of cones[j]; group the big cone's exponents by
      // their restriction, coinciding ones counting by max multiplicity
      std::map<std::vector<Rational>, long> demand;
      for (const auto& [chi, m] : a.exponents[j]) {
        auto key = restriction_key(chi, cones[i].geom);
        demand[key] = std::max(demand[key], m);
      }
      std::map<std::vector<Rational>, long> avail;
      for (const auto& [chi, m] : a.exponents[i])
        avail[restriction_key(chi, cones[i].geom)] += m;
      for (const auto& [key, need] : demand) {
        auto it = avail.find(key);
        long have = it == avail.end() ? 0 : it->second;
        if (have < need)
          diags.push_back("restriction of an exponent of cone " + std::to_string(j) +
                          " is missing on its face " + std::to_string(i));
      }
    }
  }
  return diags;
}

ExponentArrangement shift_arrangement(const ExponentArrangement& a, const QVec& d) {
  if (d.size() != a.fan.dim) throw DimensionMismatch("shift size vs fan dim");
  ExponentArrangement out = a;
  for (auto& ms : out.exponents) {
    for (auto& [chi, m] : ms) chi += d;
    std::sort(ms.begin(), ms.end(),
              [](const auto& x, const auto& y) { return lex_less(x.first, y.first); });
  }
  return out;
}

Rational eval_exponent(const ExponentArrangement& a, const QVec& lambda) {
  int idx = a.fan.relint_locate(lambda);
  if (idx < 0)
    throw OutsideSupport("the point lies outside the support of the fan");
  const ExponentMultiset& ms = a.exponents[static_cast<size_t>(idx)];
  if (ms.size() != 1)
    throw Error("AmbiguousExponent", "cone carries more than one exponent");
  return ms[0].first.dot(lambda);
}

DerivativeArrangement derivative_arrangement(const ExponentArrangement& a, const Cone& d) {
  DerivativeArrangement out;
  out.base_cone = d;
  out.star = star_fan(a.fan, d);
  out.exponents.reserve(out.star.fan.cones.size());
  for (int src : out.star.source_cone)
    out.exponents.push_back(a.exponents[static_cast<size_t>(src)]);
  return out;
}

}  // namespace critfan

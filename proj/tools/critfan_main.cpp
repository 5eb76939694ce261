#include "critfan/asymlab.hpp"
#include "critfan/report.hpp"
#include "critfan/specfile.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using critfan::AnalysisResult;
using critfan::AnalysisSpecFile;
using critfan::Family;
using critfan::QVec;
using critfan::Rational;
using critfan::ShiftMode;
using critfan::ShiftSpec;
using critfan::Verdict;
using nlohmann::ordered_json;

int max_rank_env() {
  if (const char* e = std::getenv("CRITFAN_MAX_RANK")) {
    int v = std::atoi(e);
    if (v >= 1) return v;
  }
  return 12;
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::NonCritical:
      return 0;
    case Verdict::Critical:
      return 3;
    default:
      return 4;
  }
}

ShiftSpec apply_shift_flag(ShiftSpec spec, const std::string& flag) {
  if (flag == "none") return {ShiftMode::None, {}};
  if (flag == "haar") return {ShiftMode::Haar, {}};
  return spec;
}

struct CmdResult {
  ordered_json report;
  int exit_code = 0;
};

struct LoadedSpec {
  AnalysisSpecFile spec;
  std::string hash;
};

LoadedSpec load_spec(const std::string& path, const std::string& shift_flag) {
  std::string text = critfan::slurp_file(path);
  bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
  AnalysisSpecFile spec = critfan::parse_spec_text(text, toml);
  spec.shift = apply_shift_flag(spec.shift, shift_flag);
  return {std::move(spec), critfan::sha256_hex(text)};
}

CmdResult do_analyze(const std::string& path, const std::string& shift_flag) {
  LoadedSpec in = load_spec(path, shift_flag);
  AnalysisResult res = critfan::analyze(in.spec.group, in.spec.representation,
                                        in.spec.shift, max_rank_env());
  return {critfan::analysis_json(res, in.hash), exit_for(res.report.verdict)};
}

// Rational relative-interior direction for a fan cone, rescaled so that no
// weight pairs with it beyond 2 in absolute value (keeps lattice sums cheap).
QVec tempered_direction(const critfan::ExponentArrangement& a, int cone) {
  QVec lambda = a.fan.cones[cone].geom.relint_point();
  Rational biggest = 0;
  for (const auto& [w, mult] : a.weights.entries) {
    Rational p = abs(w.dot(lambda));
    if (p > biggest) biggest = p;
  }
  if (biggest > 2) {
    Rational c = Rational(2) / biggest;
    lambda = c * lambda;
  }
  return lambda;
}

CmdResult do_simulate(const std::string& path, const std::string& shift_flag) {
  LoadedSpec in = load_spec(path, shift_flag);
  AnalysisResult res = critfan::analyze(in.spec.group, in.spec.representation,
                                        in.spec.shift, max_rank_env());
  ordered_json rep = critfan::analysis_json(res, in.hash);
  if (!res.arrangement) return {rep, exit_for(res.report.verdict)};
  const critfan::ExponentArrangement& a = *res.arrangement;

  // Torus model: one lattice coordinate per weight occurrence.
  long d = 0;
  for (const auto& [w, mult] : a.weights.entries) d += mult;
  if (d > 8)
    throw critfan::UnsupportedForSimulation(
        "weight multiset has " + std::to_string(d) +
        " coordinates; the lattice model supports at most 8");
  Eigen::MatrixXi wm(d, a.datum.dim);
  long row = 0;
  for (const auto& [w, mult] : a.weights.entries) {
    for (long k = 0; k < mult; ++k) {
      for (int i = 0; i < a.datum.dim; ++i) {
        if (boost::multiprecision::denominator(w[i]) != 1)
          throw critfan::UnsupportedForSimulation(
              "non-integer weight entries cannot be simulated");
        wm(row, i) =
            int(boost::multiprecision::numerator(w[i]).convert_to<long long>());
      }
      ++row;
    }
  }
  critfan::TorusAction action = critfan::make_action(wm);

  ordered_json numeric;
  Eigen::VectorXd t_half = Eigen::VectorXd::Constant(a.datum.dim, 0.5);
  numeric["poisson_residual"] =
      critfan::poisson_identity_check(action, critfan::gaussian(), t_half);
  auto cones = ordered_json::array();
  for (int ci : a.fan.maximal_cones()) {
    QVec lambda = tempered_direction(a, ci);
    critfan::LatticeSumProbe probe{action, critfan::gaussian(), lambda,
                                   in.spec.grid};
    double slope = critfan::fit_exponent(probe);
    double predicted = critfan::to_double(critfan::eval_exponent(a, lambda));
    ordered_json jc;
    jc["cone"] = ci;
    jc["lambda"] = critfan::rational_row_json(lambda);
    jc["fitted_slope"] = slope;
    jc["predicted"] = predicted;
    jc["gap"] = std::abs(slope - predicted);
    jc["scaled_residual"] =
        critfan::residual_check(probe, &a.fan.cones[ci].geom);
    cones.push_back(jc);
  }
  numeric["cones"] = cones;
  rep["numeric"] = numeric;
  return {rep, exit_for(res.report.verdict)};
}

CmdResult do_refine(const std::string& path, const std::string& shift_flag) {
  LoadedSpec in = load_spec(path, shift_flag);
  AnalysisResult res = critfan::analyze(in.spec.group, in.spec.representation,
                                        in.spec.shift, max_rank_env());
  if (!res.arrangement)
    return {critfan::analysis_json(res, in.hash), exit_for(res.report.verdict)};
  const critfan::ExponentArrangement& a = *res.arrangement;

  // New rays must stay off the critical locus chi + shift = 2rho.
  QVec two_rho = critfan::modular_character(a.datum);
  std::vector<std::optional<QVec>> avoid(a.fan.cones.size());
  for (size_t i = 0; i < a.fan.cones.size(); ++i) {
    QVec functional = a.exponents[i][0].first - two_rho;
    if (res.report.shift.size() > 0) functional += res.report.shift;
    if (!critfan::is_zero_vec(functional)) avoid[i] = functional;
  }
  critfan::Fan refined = critfan::stellar_refine_to_simplicial(a.fan, &avoid);

  critfan::ExponentArrangement ra = a;
  ra.fan = refined;
  ra.exponents.assign(refined.cones.size(), {});
  for (size_t i = 0; i < refined.cones.size(); ++i) {
    QVec probe = refined.cones[i].geom.relint_point();
    int src = a.fan.relint_locate(probe);
    ra.exponents[i] = a.exponents[src];
  }
  critfan::CriticalityReport report = critfan::criticality_report(ra, in.spec.shift);

  AnalysisResult out = res;
  out.arrangement = ra;
  out.report = report;
  ordered_json rep = critfan::analysis_json(out, in.hash);
  ordered_json info;
  info["source_cones"] = a.fan.cones.size();
  info["refined_cones"] = refined.cones.size();
  info["new_rays"] = refined.rays.size() - a.fan.rays.size();
  rep["refinement"] = info;
  return {rep, exit_for(report.verdict)};
}

CmdResult do_derivative(const std::string& path, const std::string& shift_flag) {
  LoadedSpec in = load_spec(path, shift_flag);
  if (!in.spec.derivative_of)
    throw critfan::InvalidSpecFile("spec.options.derivative_of: missing");
  AnalysisResult res = critfan::analyze(in.spec.group, in.spec.representation,
                                        in.spec.shift, max_rank_env());
  if (!res.arrangement)
    return {critfan::analysis_json(res, in.hash), exit_for(res.report.verdict)};
  const critfan::ExponentArrangement& a = *res.arrangement;

  const QVec& v = *in.spec.derivative_of;
  critfan::Cone base;
  if (critfan::is_zero_vec(v)) {
    base = critfan::zero_cone(a.datum.dim);
  } else {
    critfan::QMat row = v.transpose();
    base = critfan::cone_from_rays(row, critfan::QMat(0, a.datum.dim),
                                   a.datum.dim);
  }
  critfan::DerivativeArrangement der = critfan::derivative_arrangement(a, base);

  ordered_json rep;
  rep["tool"] = critfan::kToolVersion;
  rep["input_sha256"] = in.hash;
  auto grp = ordered_json::array();
  for (const critfan::GroupFactor& f : res.group.factors) {
    ordered_json jf;
    jf["family"] = critfan::family_name(f.family);
    jf["rank"] = f.rank;
    grp.push_back(jf);
  }
  rep["group"] = grp;
  rep["derivative_of"] = critfan::rational_row_json(v);
  ordered_json star;
  star["quotient_dim"] = der.star.fan.dim;
  auto proj = ordered_json::array();
  for (Eigen::Index r = 0; r < der.star.projection.rows(); ++r)
    proj.push_back(critfan::rational_row_json(der.star.projection.row(r)));
  star["projection"] = proj;
  star["fan"] = critfan::fan_json(der.star.fan);
  star["source_cones"] = der.star.source_cone;
  rep["star"] = star;
  rep["exponents"] = critfan::exponents_json(der.exponents);
  return {rep, 0};
}

// ---- selftest -------------------------------------------------------------

critfan::RepExpr pair_weights_rep(int n) {
  std::vector<std::pair<QVec, long>> ws;
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) {
      QVec w(2);
      w[0] = s1;
      w[1] = s2;
      ws.emplace_back(w, n);
    }
  return critfan::rep_weights(ws);
}

std::string check_kudla_rallis_D() {
  for (int m = 3; m <= 5; ++m)
    for (int n = 1; n <= 10; ++n) {
      AnalysisResult r =
          critfan::analyze({{{Family::SO_even, m}}},
                           critfan::rep_mult(critfan::rep_std(0), n),
                           {ShiftMode::None, {}});
      bool expect = m - 1 <= n && n <= 2 * (m - 1);
      bool got = r.report.verdict == Verdict::Critical;
      if (expect != got)
        return "row m=" + std::to_string(m) + " n=" + std::to_string(n) +
               ": expected " + (expect ? "Critical" : "NonCritical");
    }
  return "";
}

std::string check_kudla_rallis_m2() {
  for (int n = 1; n <= 10; ++n) {
    AnalysisResult r =
        critfan::analyze({{{Family::Sp, 1}, {Family::Sp, 1}}},
                         pair_weights_rep(n), {ShiftMode::None, {}});
    bool expect = n <= 2;
    bool got = r.report.verdict == Verdict::Critical;
    if (expect != got)
      return "row m=2 n=" + std::to_string(n) + ": expected " +
             (expect ? "Critical" : "NonCritical");
  }
  return "";
}

std::string check_gross_prasad() {
  auto gp = [](Family fam, int m) {
    return critfan::analyze(
        {{{fam, m}}},
        critfan::rep_sum({critfan::rep_adjoint(0), critfan::rep_std(0)}),
        {ShiftMode::None, {}});
  };
  for (int m = 1; m <= 5; ++m) {
    AnalysisResult r = gp(Family::SO_odd, m);
    if (r.report.verdict != Verdict::NonCritical)
      return "B_" + std::to_string(m) + ": expected NonCritical";
  }
  for (int m = 3; m <= 5; ++m) {
    AnalysisResult r = gp(Family::SO_even, m);
    if (r.report.verdict != Verdict::NonCritical)
      return "D_" + std::to_string(m) + ": expected NonCritical";
    int nmax = int(r.arrangement->fan.maximal_cones().size());
    if (nmax != 2)
      return "D_" + std::to_string(m) + ": expected 2 maximal cones, got " +
             std::to_string(nmax);
  }
  return "";
}

std::string check_tate() {
  AnalysisResult r = critfan::analyze({{{Family::GL, 1}}}, critfan::rep_std(0),
                                      {ShiftMode::None, {}});
  if (r.report.verdict != Verdict::Critical || r.report.witnesses.size() != 1 ||
      r.report.witnesses[0][0] != -1)
    return "unshifted: expected the single witness ray -1";
  AnalysisResult rh = critfan::analyze({{{Family::GL, 1}}}, critfan::rep_std(0),
                                       {ShiftMode::Haar, {}});
  if (rh.report.verdict != Verdict::Critical ||
      rh.report.witnesses.size() != 1 || rh.report.witnesses[0][0] != 1)
    return "haar-shifted: expected the single witness ray +1";
  return "";
}

std::string check_slopes() {
  Eigen::MatrixXi w1(1, 1);
  w1 << 1;
  QVec lam(1);
  lam[0] = 1;
  critfan::FitGrid grid{1e-3, 1e-1, 12};
  critfan::LatticeSumProbe p{critfan::make_action(w1), critfan::gaussian(), lam,
                             grid};
  double s = critfan::fit_exponent(p);
  if (std::abs(s + 1.0) > 0.05)
    return "rank-1 slope " + std::to_string(s) + " not within 0.05 of -1";
  Eigen::MatrixXi wpm(2, 1);
  wpm << 1, -1;
  for (int sign : {1, -1}) {
    QVec l(1);
    l[0] = sign;
    critfan::LatticeSumProbe q{critfan::make_action(wpm), critfan::gaussian(), l,
                               grid};
    double sl = critfan::fit_exponent(q);
    if (std::abs(sl + 1.0) > 0.05)
      return "pair slope at lambda=" + std::to_string(sign) + " is " +
             std::to_string(sl);
  }
  return "";
}

std::string check_poisson() {
  Eigen::MatrixXi w1(1, 1);
  w1 << 1;
  Eigen::VectorXd t1(1);
  t1 << 0.5;
  if (critfan::poisson_identity_check(critfan::make_action(w1),
                                      critfan::gaussian(), t1) > 1e-10)
    return "rank-1 residual exceeds 1e-10";
  Eigen::MatrixXi w2(2, 2);
  w2 << 1, 0, 0, 1;
  Eigen::VectorXd t2(2);
  t2 << 1.0 / 3.0, 3.0;
  if (critfan::poisson_identity_check(critfan::make_action(w2),
                                      critfan::gaussian(), t2) > 1e-10)
    return "rank-2 residual exceeds 1e-10";
  Eigen::VectorXd sc(1);
  sc << 1.7;
  t1 << 0.2;
  if (critfan::poisson_identity_check(critfan::make_action(w1),
                                      critfan::scaled_gaussian(sc), t1) > 1e-10)
    return "scaled residual exceeds 1e-10";
  return "";
}

std::string check_mellin() {
  double v = critfan::mellin_regularize(critfan::builtin_function("t_exp"));
  if (std::abs(v - 1.0) > 1e-8) return "t_exp value " + std::to_string(v);
  double b = critfan::mellin_regularize(critfan::builtin_function("bessel"));
  if (std::abs(b - 0.227787745499066871) > 1e-9)
    return "bessel value " + std::to_string(b);
  try {
    critfan::mellin_regularize(critfan::builtin_function("exp"));
    return "constant tail did not raise CriticalExponent";
  } catch (const critfan::CriticalExponent&) {
  }
  double q = critfan::mellin_regularize(critfan::builtin_function("sqrt_cut"));
  if (std::abs(q - 2.217930892155907879) > 1e-8)
    return "sqrt_cut value " + std::to_string(q);
  return "";
}

std::string check_invariance() {
  for (const char* name : {"t_exp", "bessel", "sqrt_cut"})
    for (double u : {0.1, 0.5, 2.0, 10.0}) {
      double d = critfan::invariance_check(critfan::builtin_function(name), u);
      if (d > 1e-7)
        return std::string(name) + " at u=" + std::to_string(u) + ": defect " +
               std::to_string(d);
    }
  return "";
}

std::string check_random_fans() {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> rank_pick(1, 3);
  std::uniform_int_distribution<int> entry(-2, 2);
  std::uniform_int_distribution<int> mult(1, 2);
  std::uniform_int_distribution<int> count(1, 6);
  int done = 0, guard = 0;
  while (done < 20 && ++guard < 400) {
    int rank = rank_pick(rng);
    std::vector<Family> fams{Family::GL, Family::SO_odd, Family::Sp,
                             Family::Torus};
    if (rank >= 3) fams.push_back(Family::SO_even);
    Family fam = fams[std::uniform_int_distribution<size_t>(0, fams.size() - 1)(rng)];
    int nw = count(rng);
    std::vector<std::pair<QVec, long>> ws;
    for (int k = 0; k < nw; ++k) {
      QVec w(rank);
      bool zero = true;
      for (int i = 0; i < rank; ++i) {
        w[i] = entry(rng);
        zero = zero && w[i] == 0;
      }
      if (zero) w[0] = 1;
      ws.emplace_back(w, mult(rng));
    }
    try {
      AnalysisResult r = critfan::analyze(
          {{{fam, rank}}}, critfan::rep_weights(ws), {ShiftMode::None, {}});
      if (!r.arrangement) continue;
      auto bad = critfan::is_valid_fan(r.arrangement->fan);
      if (!bad.empty())
        return "instance " + std::to_string(done) + ": " + bad.front();
      auto diag = critfan::check_compatibility(*r.arrangement);
      if (!diag.empty())
        return "instance " + std::to_string(done) +
               ": compatibility: " + diag[0];
      ++done;
    } catch (const critfan::CentralTorusActsTrivially&) {
    } catch (const critfan::IrregularKernel&) {
    }
  }
  if (done < 20) return "generator starved";
  return "";
}

std::string check_refinement() {
  AnalysisResult r =
      critfan::analyze({{{Family::SO_even, 4}}},
                       critfan::rep_mult(critfan::rep_std(0), 7),
                       {ShiftMode::None, {}});
  const critfan::ExponentArrangement& a = *r.arrangement;
  critfan::Fan refined = critfan::stellar_refine_to_simplicial(a.fan, nullptr);
  auto bad = critfan::is_valid_fan(refined);
  if (!bad.empty()) return bad.front();
  for (const critfan::FanCone& fc : refined.cones)
    if (fc.geom.cone_dim() == refined.dim && !fc.geom.simplicial())
      return "a maximal refined cone is not simplicial";
  if (refined.rays.size() != a.fan.rays.size())
    return "refinement introduced new rays on a pullable fan";
  for (const critfan::FanCone& fc : refined.cones) {
    if (fc.geom.is_zero()) continue;
    QVec pt = fc.geom.relint_point();
    if (critfan::eval_exponent(a, pt) !=
        a.exponents[a.fan.relint_locate(pt)][0].first.dot(pt))
      return "exponent mismatch after refinement";
  }
  return "";
}

std::string check_derivative() {
  AnalysisResult r =
      critfan::analyze({{{Family::SO_even, 4}}},
                       critfan::rep_mult(critfan::rep_std(0), 2),
                       {ShiftMode::None, {}});
  QVec v(4);
  v[0] = -1;
  v[1] = 0;
  v[2] = 0;
  v[3] = 0;
  critfan::Cone ray = critfan::cone_from_rays(
      critfan::QMat(v.transpose()), critfan::QMat(0, 4), 4);
  critfan::DerivativeArrangement d =
      critfan::derivative_arrangement(*r.arrangement, ray);
  if (d.star.fan.dim != 3) return "quotient dimension is not 3";
  auto bad = critfan::is_valid_fan(d.star.fan);
  if (!bad.empty()) return bad.front();
  return "";
}

CmdResult do_selftest(const std::string& filter) {
  std::vector<std::pair<std::string, std::function<std::string()>>> cases = {
      {"kudla_rallis_D", check_kudla_rallis_D},
      {"kudla_rallis_m2", check_kudla_rallis_m2},
      {"gross_prasad", check_gross_prasad},
      {"tate", check_tate},
      {"torus_slopes", check_slopes},
      {"poisson", check_poisson},
      {"mellin", check_mellin},
      {"invariance", check_invariance},
      {"random_fans", check_random_fans},
      {"refinement", check_refinement},
      {"derivative", check_derivative},
  };
  ordered_json rep;
  rep["tool"] = critfan::kToolVersion;
  auto jcases = ordered_json::array();
  int failed = 0, ran = 0;
  for (auto& [name, fn] : cases) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    ++ran;
    std::string detail;
    try {
      detail = fn();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    ordered_json jc;
    jc["name"] = name;
    jc["status"] = detail.empty() ? "ok" : "fail: " + detail;
    jcases.push_back(jc);
    if (detail.empty()) {
      std::cout << "ok   " << name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << ": " << detail << "\n";
    }
  }
  rep["cases"] = jcases;
  rep["ran"] = ran;
  rep["failed"] = failed;
  std::cout << ran - failed << "/" << ran << " passed\n";
  return {rep, (failed > 0 || ran == 0) ? 2 : 0};
}

void emit(const std::string& out_path, const std::string& format,
          const ordered_json& report, bool to_stdout) {
  std::string body = format == "text" ? critfan::render_text(report)
                                      : report.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw critfan::Error("Io", "cannot write \"" + out_path + "\"");
    f << body;
  } else if (to_stdout) {
    std::cout << body;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weight fans, exponent arrangements, criticality, and numeric "
               "asymptotics for regularized orbital integrals"};
  app.set_version_flag("--version", critfan::kToolVersion);
  app.require_subcommand(1);

  std::string spec_path, out_path, format = "json", shift_flag, filter,
                          builtin_name;
  bool seedless = false;

  auto add_common = [&](CLI::App* cmd, bool with_spec) {
    if (with_spec)
      cmd->add_option("spec", spec_path, "analysis spec file (JSON or TOML)")
          ->required();
    cmd->add_option("--out", out_path, "write the report to PATH");
    cmd->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_flag("--seedless", seedless,
                  "run twice and require byte-identical reports");
  };

  CLI::App* c_analyze = app.add_subcommand("analyze", "exact criticality analysis");
  add_common(c_analyze, true);
  c_analyze->add_option("--shift", shift_flag, "override the spec shift")
      ->check(CLI::IsMember({"none", "haar"}));

  CLI::App* c_simulate =
      app.add_subcommand("simulate", "lattice-sum verification of the exponents");
  add_common(c_simulate, true);
  c_simulate->add_option("--shift", shift_flag)
      ->check(CLI::IsMember({"none", "haar"}));

  CLI::App* c_refine =
      app.add_subcommand("refine", "simplicial refinement of the weight fan");
  add_common(c_refine, true);
  c_refine->add_option("--shift", shift_flag)
      ->check(CLI::IsMember({"none", "haar"}));

  CLI::App* c_derivative = app.add_subcommand(
      "derivative", "star fan and exponents at a boundary cone");
  add_common(c_derivative, true);
  c_derivative->add_option("--shift", shift_flag)
      ->check(CLI::IsMember({"none", "haar"}));

  CLI::App* c_regularize =
      app.add_subcommand("regularize", "regularized 1-D Mellin integral");
  c_regularize->add_option("builtin", builtin_name,
                           "t_exp | bessel | exp | sqrt_cut")
      ->required();
  c_regularize->add_option("--out", out_path);
  c_regularize->add_option("--format", format)
      ->check(CLI::IsMember({"json", "text"}));

  CLI::App* c_selftest = app.add_subcommand("selftest", "regression tables");
  c_selftest->add_option("--out", out_path);
  c_selftest->add_option("--format", format)
      ->check(CLI::IsMember({"json", "text"}));
  c_selftest->add_flag("--seedless", seedless);
  c_selftest->add_option("--filter", filter, "run only matching cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    std::function<CmdResult()> run;
    bool report_to_stdout = true;
    if (app.got_subcommand(c_analyze)) {
      run = [&] { return do_analyze(spec_path, shift_flag); };
    } else if (app.got_subcommand(c_simulate)) {
      run = [&] { return do_simulate(spec_path, shift_flag); };
    } else if (app.got_subcommand(c_refine)) {
      run = [&] { return do_refine(spec_path, shift_flag); };
    } else if (app.got_subcommand(c_derivative)) {
      run = [&] { return do_derivative(spec_path, shift_flag); };
    } else if (app.got_subcommand(c_regularize)) {
      run = [&] {
        critfan::AsymFun1D g = critfan::builtin_function(builtin_name);
        double value = critfan::mellin_regularize(g);
        double defect = critfan::invariance_check(g, 2.0);
        ordered_json rep;
        rep["tool"] = critfan::kToolVersion;
        rep["builtin"] = builtin_name;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9f", value);
        rep["value"] = std::string(buf);
        rep["invariance_defect_u2"] = defect;
        std::printf("value: %.9f\ninvariance defect at u=2: %.3e\n", value,
                    defect);
        return CmdResult{rep, 0};
      };
      report_to_stdout = false;
    } else {
      run = [&] { return do_selftest(filter); };
      report_to_stdout = false;
    }

    CmdResult first = run();
    if (seedless) {
      CmdResult second = run();
      if (first.report.dump() != second.report.dump()) {
        std::cerr << "determinism check failed: reports differ between runs\n";
        return 2;
      }
    }
    if (app.got_subcommand(c_selftest))
      std::cout << "report sha256: " << critfan::sha256_hex(first.report.dump(2))
                << "\n";
    emit(out_path, format, first.report, report_to_stdout);
    return first.exit_code;
  } catch (const critfan::CriticalExponent& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const critfan::CentralTorusActsTrivially& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const critfan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

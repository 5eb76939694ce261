#include "critfan/asymlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace critfan {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long kRadiusBudget = 200000000L;

long adaptive_radius(double x) {
  // exp(-pi * 4^2) < 2e-22, far inside the 1e-14 certificate.
  double r = std::ceil(4.0 / x) + 2.0;
  if (r > double(kRadiusBudget))
    throw Overflow("theta truncation radius " + std::to_string(r) +
                   " exceeds the term budget at scale " + std::to_string(x));
  return long(r);
}

// Kahan-compensated sum of 2*exp(-pi x^2 n^2) for n = 1..R.
double theta_half(double x, long R) {
  double s = 0.0, c = 0.0;
  for (long n = 1; n <= R; ++n) {
    double nn = double(n);
    double term = 2.0 * std::exp(-kPi * x * x * nn * nn);
    double y = term - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

void check_scale(double x) {
  if (!(x > 0.0))
    throw Overflow("nonpositive coordinate scale " + std::to_string(x));
  if (x > 1e12)
    throw Overflow("coordinate scale " + std::to_string(x) + " exceeds 1e12");
}

Eigen::VectorXd coordinate_scales(const TorusAction& action,
                                  const ProbeFunction& f,
                                  const Eigen::VectorXd& t) {
  if (t.size() != action.rank())
    throw DimensionMismatch("parameter vector has " + std::to_string(t.size()) +
                            " entries for a rank-" +
                            std::to_string(action.rank()) + " torus");
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (!(t[i] > 0.0)) throw Overflow("nonpositive torus parameter");
  Eigen::VectorXd x(action.dim());
  for (int j = 0; j < action.dim(); ++j) {
    double s = f.scale(j);
    for (int i = 0; i < action.rank(); ++i)
      s *= std::pow(t[i], double(action.weights(j, i)));
    check_scale(s);
    x[j] = s;
  }
  return x;
}

std::vector<double> pairings(const TorusAction& action, const QVec& lambda) {
  if (lambda.size() != action.rank())
    throw DimensionMismatch("direction has " + std::to_string(lambda.size()) +
                            " entries for a rank-" +
                            std::to_string(action.rank()) + " torus");
  std::vector<double> p(action.dim());
  for (int j = 0; j < action.dim(); ++j) {
    Rational acc = 0;
    for (int i = 0; i < action.rank(); ++i)
      acc += Rational(action.weights(j, i)) * lambda[i];
    p[j] = to_double(acc);
  }
  return p;
}

// theta(x) - 1/x, the deviation of the contracting-coordinate sum from its
// Gaussian integral, computed without cancellation: for small x through the
// dual-side series (2/x) sum exp(-pi k^2 / x^2), for large x directly.
double theta_minus_integral(double x) {
  if (x <= 3.0) {
    double s = 0.0;
    for (long k = 1;; ++k) {
      double kk = double(k);
      double term = std::exp(-kPi * kk * kk / (x * x));
      s += term;
      if (term < 1e-300 || k > 64) break;
    }
    return (2.0 / x) * s;
  }
  return theta_sum(x) - 1.0 / x;
}

// theta(x) - 1, the deviation of the expanding-coordinate sum from the single
// gamma = 0 term.
double theta_minus_one(double x) { return theta_half(x, adaptive_radius(x)); }

double slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  double n = double(xs.size());
  double mx = 0, my = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    num += (xs[k] - mx) * (ys[k] - my);
    den += (xs[k] - mx) * (xs[k] - mx);
  }
  return num / den;
}

// Adaptive Simpson on [a, b] with terminal Richardson correction.
double simpson_adapt(const std::function<double(double)>& h, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth, bool& ok) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = h(lm), frm = h(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (!std::isfinite(delta)) {
    ok = false;
    return whole;
  }
  if (std::abs(delta) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && std::abs(delta) > 15.0 * tol) ok = false;
    return left + right + delta / 15.0;
  }
  return simpson_adapt(h, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok) +
         simpson_adapt(h, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok);
}

double integrate01(const std::function<double(double)>& h, double tol) {
  double fa = h(0.0), fm = h(0.5), fb = h(1.0);
  double whole = (fa + 4.0 * fm + fb) / 6.0;
  bool ok = true;
  double v = simpson_adapt(h, 0.0, 1.0, fa, fm, fb, whole, tol, 48, ok);
  if (!ok || !std::isfinite(v))
    throw QuadratureFailure("adaptive Simpson did not reach tolerance " +
                            std::to_string(tol));
  return v;
}

}  // namespace

TorusAction make_action(const Eigen::MatrixXi& weights) {
  TorusAction a{weights};
  if (a.dim() < 1 || a.dim() > 8 || a.rank() < 1 || a.rank() > 4)
    throw UnsupportedForSimulation("torus model limited to d <= 8, r <= 4; got d=" +
                                   std::to_string(a.dim()) + " r=" +
                                   std::to_string(a.rank()));
  for (int j = 0; j < a.dim(); ++j)
    for (int i = 0; i < a.rank(); ++i)
      if (std::abs(weights(j, i)) > 20)
        throw UnsupportedForSimulation("weight entry exceeds 20");
  return a;
}

ProbeFunction gaussian() { return {ProbeFunction::Kind::Gaussian, {}}; }

ProbeFunction scaled_gaussian(const Eigen::VectorXd& scales) {
  for (Eigen::Index j = 0; j < scales.size(); ++j)
    if (!(scales[j] > 0.0))
      throw Overflow("probe scales must be positive");
  return {ProbeFunction::Kind::ScaledGaussian, scales};
}

std::vector<double> grid_points(const FitGrid& grid) {
  if (grid.points < 2 || !(grid.t_min > 0.0) || !(grid.t_max > grid.t_min))
    throw GridTooShort("grid needs t_max > t_min > 0 and at least 2 points");
  std::vector<double> ts(grid.points);
  double q = std::log(grid.t_max / grid.t_min) / double(grid.points - 1);
  for (int k = 0; k < grid.points; ++k)
    ts[k] = grid.t_min * std::exp(q * double(k));
  ts.back() = grid.t_max;
  return ts;
}

double theta_sum(double x, long radius) {
  check_scale(x);
  long R = radius >= 0 ? radius : adaptive_radius(x);
  return 1.0 + theta_half(x, R);
}

double theta_tail_bound(double x, long radius) {
  check_scale(x);
  if (radius < 0) radius = adaptive_radius(x);
  double r1 = double(radius + 1);
  double head = 2.0 * std::exp(-kPi * x * x * r1 * r1);
  double q = std::exp(-kPi * x * x * double(2 * radius + 3));
  return head / (1.0 - std::min(q, 0.5));
}

double lattice_sum(const TorusAction& action, const ProbeFunction& f,
                   const Eigen::VectorXd& t, long radius) {
  Eigen::VectorXd x = coordinate_scales(action, f, t);
  double prod = 1.0;
  for (int j = 0; j < action.dim(); ++j) prod *= theta_sum(x[j], radius);
  return prod;
}

double poisson_identity_check(const TorusAction& action,
                              const ProbeFunction& f,
                              const Eigen::VectorXd& t) {
  Eigen::VectorXd x = coordinate_scales(action, f, t);
  double direct = 1.0, dual = 1.0;
  for (int j = 0; j < action.dim(); ++j) {
    direct *= theta_sum(x[j]);
    dual *= theta_sum(1.0 / x[j]) / x[j];
  }
  return std::abs(direct - dual);
}

double fit_exponent(const LatticeSumProbe& probe) {
  std::vector<double> ts = grid_points(probe.grid);
  if (int(ts.size()) < 8)
    throw GridTooShort("exponent fit needs at least 8 grid points");
  if (probe.grid.t_max / probe.grid.t_min < 100.0 * (1.0 - 1e-12))
    throw GridTooShort("exponent fit needs a grid spanning two decades");
  std::vector<double> p = pairings(probe.action, probe.lambda);
  std::vector<double> logt(ts.size()), logS(ts.size());
  for (size_t k = 0; k < ts.size(); ++k) {
    double acc = 0.0;
    for (int j = 0; j < probe.action.dim(); ++j) {
      double x = probe.f.scale(j) * std::pow(ts[k], p[j]);
      check_scale(x);
      acc += std::log(theta_sum(x));
    }
    if (!std::isfinite(acc)) throw Overflow("grid sum is not finite");
    logt[k] = std::log(ts[k]);
    logS[k] = acc;
  }
  return slope_fit(logt, logS);
}

double residual_check(const LatticeSumProbe& probe, const Cone* cone) {
  const QVec& lambda = probe.lambda;
  if (is_zero_vec(lambda))
    throw OutsideRelint("residual direction is zero");
  if (cone && !cone_relint_contains(*cone, lambda))
    throw OutsideRelint("direction is not in the relative interior of the cone");
  std::vector<double> p = pairings(probe.action, probe.lambda);
  double chi = 0.0;
  for (double pj : p)
    if (pj > 0.0) chi -= pj;
  std::vector<double> ts = grid_points(probe.grid);
  double worst = 0.0;
  for (double t : ts) {
    // S - f_C = prod_j (m_j + d_j) - prod_j m_j, expanded so every term is a
    // positive product of the per-coordinate deviations d_j.
    double diff = 0.0, prod_m = 1.0;
    for (int j = 0; j < probe.action.dim(); ++j) {
      double x = probe.f.scale(j) * std::pow(t, p[j]);
      check_scale(x);
      double m, d;
      if (p[j] > 0.0) {
        m = 1.0 / x;
        d = theta_minus_integral(x);
      } else if (p[j] < 0.0) {
        m = 1.0;
        d = theta_minus_one(x);
      } else {
        m = theta_sum(x);
        d = 0.0;
      }
      diff = diff * (m + d) + prod_m * d;
      prod_m *= m;
    }
    worst = std::max(worst, diff * std::pow(t, -(chi + 10.0)));
  }
  return worst;
}

double mellin_regularize(const AsymFun1D& g) {
  if (g.critical())
    throw CriticalExponent("constant tail: the regularized integral diverges");
  double c0 = g.c0, a0 = g.a0, ci = g.c_inf, ai = g.a_inf;
  auto low = [&](double t) {
    if (t <= 0.0) return 0.0;
    double v = g.core(t) - (c0 == 0.0 ? 0.0 : c0 * std::pow(t, a0));
    return v / t;
  };
  auto high = [&](double u) {
    if (u <= 0.0) return 0.0;
    double t = 1.0 / u;
    double v = g.core(t) - (ci == 0.0 ? 0.0 : ci * std::pow(t, ai));
    return v / u;
  };
  double value = integrate01(low, 5e-10) + integrate01(high, 5e-10);
  if (c0 != 0.0) value += c0 / a0;
  if (ci != 0.0) value -= ci / ai;
  return value;
}

double invariance_check(const AsymFun1D& g, double u) {
  if (!(u > 0.0)) throw Overflow("dilation factor must be positive");
  AsymFun1D gu;
  auto core = g.core;
  gu.core = [core, u](double t) { return core(u * t); };
  gu.a0 = g.a0;
  gu.c0 = g.c0 * std::pow(u, g.a0);
  gu.a_inf = g.a_inf;
  gu.c_inf = g.c_inf * std::pow(u, g.a_inf);
  return std::abs(mellin_regularize(gu) - mellin_regularize(g));
}

AsymFun1D builtin_function(const std::string& name) {
  AsymFun1D g;
  if (name == "t_exp") {
    g.core = [](double t) { return t * std::exp(-t); };
    g.a0 = 1.0;
    g.c0 = 1.0;
  } else if (name == "bessel") {
    g.core = [](double t) { return std::exp(-t - 1.0 / t); };
  } else if (name == "exp") {
    g.core = [](double t) { return std::exp(-t); };
    g.a0 = 0.0;
    g.c0 = 1.0;
  } else if (name == "sqrt_cut") {
    // sqrt(t) cut smoothly to 0 between 1/2 and 2.
    auto h = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    g.core = [h](double t) {
      double phi;
      if (t <= 0.5)
        phi = 1.0;
      else if (t >= 2.0)
        phi = 0.0;
      else
        phi = h(2.0 - t) / (h(2.0 - t) + h(t - 0.5));
      return std::sqrt(t) * phi;
    };
    g.a0 = 0.5;
    g.c0 = 1.0;
  } else {
    throw InvalidSpecFile("unknown builtin function \"" + name + "\"");
  }
  return g;
}

}  // namespace critfan

#pragma once

#include "critfan/cone.hpp"
#include "critfan/errors.hpp"
#include "critfan/scalar.hpp"

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace critfan {

// Numeric laboratory at desk scale: a rank-r split torus acts diagonally on
// R^d through integer weights, the lattice Z^d stands in for the rational
// points, and Gaussian probes keep every sum and Fourier transform in closed
// form.  The routines here verify the exponent predictions of the exact layer
// and evaluate regularized 1-D Mellin integrals.

struct TorusAction {
  Eigen::MatrixXi weights;  // row j = weight of coordinate j

  int dim() const { return int(weights.rows()); }
  int rank() const { return int(weights.cols()); }
};

TorusAction make_action(const Eigen::MatrixXi& weights);

struct ProbeFunction {
  enum class Kind { Gaussian, ScaledGaussian };
  Kind kind = Kind::Gaussian;
  Eigen::VectorXd scales;  // per coordinate, ScaledGaussian only

  double scale(int j) const {
    return kind == Kind::Gaussian ? 1.0 : scales[j];
  }
};

ProbeFunction gaussian();
ProbeFunction scaled_gaussian(const Eigen::VectorXd& scales);

struct FitGrid {
  double t_min = 1e-4;
  double t_max = 1.0;
  int points = 16;
};

// Geometric grid from t_min to t_max, ascending.
std::vector<double> grid_points(const FitGrid& grid);

struct LatticeSumProbe {
  TorusAction action;
  ProbeFunction f;
  QVec lambda;  // direction in the cocharacter space, one entry per torus rank
  FitGrid grid;
};

// theta(x) = sum_{n in Z} exp(-pi x^2 n^2), truncated at a radius whose
// certified tail is below 1e-14, or at the caller's radius when given.
double theta_sum(double x, long radius = -1);

// Upper bound for the truncation error of theta_sum at the given radius.
double theta_tail_bound(double x, long radius);

// Sum of f over Z^d with coordinate j scaled by prod_i t_i^{w_ji}.
// Factorizes into 1-D theta sums for the Gaussian probe family; the optional
// radius overrides the adaptive truncation in every coordinate.
double lattice_sum(const TorusAction& action, const ProbeFunction& f,
                   const Eigen::VectorXd& t, long radius = -1);

// |direct sum - dual-side sum| using the closed-form Fourier transform.
double poisson_identity_check(const TorusAction& action,
                              const ProbeFunction& f,
                              const Eigen::VectorXd& t);

// Least-squares slope of log S(t^lambda) against log t over the grid, where
// t^lambda scales coordinate j by t^{<w_j, lambda>}.
double fit_exponent(const LatticeSumProbe& probe);

// Comparison term f_C for the cone containing lambda: coordinates pairing
// positively with lambda contribute their full Gaussian integral, expanding
// ones their value at 0, zero-weight ones their lattice sum.  Returns the max
// over the grid of |S(t^lambda) - f_C(t^lambda)| * t^{-(<chi,lambda>+10)}
// with chi = -(sum of positively pairing weights).  The difference is
// accumulated cancellation-free so the rapid decay is measured rather than
// rounded away.
double residual_check(const LatticeSumProbe& probe, const Cone* cone = nullptr);

struct AsymFun1D {
  std::function<double(double)> core;
  double a0 = 0, c0 = 0;        // g(t) - c0 t^{a0} rapid-decay as t -> 0
  double a_inf = 0, c_inf = 0;  // likewise at infinity

  bool critical() const {
    return (c0 != 0 && a0 == 0) || (c_inf != 0 && a_inf == 0);
  }
};

// Regularized Mellin integral at s = 0:
//   int_0^1 (g - c0 t^{a0}) dt/t + int_1^inf (g - c_inf t^{a_inf}) dt/t
//     + c0/a0 - c_inf/a_inf.
// This closed form is the analytic continuation of the twisted integral: for
// the pure tail c t^{a}, int_eps^1 c t^{a+s} dt/t -> c/(a+s) as eps -> 0,
// which at s = 0 is the c0/a0 term; the end at infinity contributes with the
// opposite sign.
double mellin_regularize(const AsymFun1D& g);

// |mellin_regularize(g(u .)) - mellin_regularize(g)|; the dilated function
// carries c0 u^{a0}, c_inf u^{a_inf}.
double invariance_check(const AsymFun1D& g, double u);

// Named 1-D examples: "t_exp", "bessel", "exp", "sqrt_cut".
AsymFun1D builtin_function(const std::string& name);

}  // namespace critfan

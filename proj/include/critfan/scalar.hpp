#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <string>

namespace critfan {

// Exact scalar used throughout the geometric core.  All cone, fan and
// arrangement computations are done over the rationals; floating point
// only appears in the numeric lab.
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using QVec = Vec<Rational>;
using QMat = Mat<Rational>;

inline std::string to_string(const Rational& q) { return q.str(); }

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

// Parses "p", "-p" or "p/q"; throws std::runtime_error on malformed input.
Rational rational_from_string(const std::string& s);

}  // namespace critfan

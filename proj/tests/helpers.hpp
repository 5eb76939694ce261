#pragma once

#include "critfan/scalar.hpp"

#include <initializer_list>
#include <vector>

namespace critfan::testing {

inline QVec qvec(std::initializer_list<Rational> xs) {
  QVec v(Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (const Rational& x : xs) v[i++] = x;
  return v;
}

inline QMat qmat(std::initializer_list<std::initializer_list<Rational>> rows) {
  Eigen::Index nr = Eigen::Index(rows.size());
  Eigen::Index nc = nr ? Eigen::Index(rows.begin()->size()) : 0;
  QMat m(nr, nc);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (const Rational& x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

}  // namespace critfan::testing

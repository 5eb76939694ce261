#include "critfan/linalg.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <numeric>

namespace critfan {

bool is_zero_vec(const QVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0) return false;
  return true;
}

bool mat_eq(const QMat& a, const QMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

bool vec_eq(const QVec& a, const QVec& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

QVec primitive(QVec v) {
  Integer g = 0, l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    g = gcd(g, numerator(v[i]));
    l = lcm(l, denominator(v[i]));
  }
  if (g == 0) return v;
  Rational scale{l, g};
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= scale;
  return v;
}

bool lex_less(const QVec& a, const QVec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

int rref_in_place(QMat& m, std::vector<int>* pivots) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index sel = -1;
    for (Eigen::Index i = r; i < rows; ++i)
      if (m(i, c) != 0) { sel = i; break; }
    if (sel < 0) continue;
    if (sel != r) m.row(sel).swap(m.row(r));
    Rational piv = m(r, c);
    m.row(r) /= piv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      m.row(i) -= f * m.row(r);
    }
    if (pivots) pivots->push_back(static_cast<int>(c));
    ++r;
  }
  return static_cast<int>(r);
}

int rank_of(QMat m) { return rref_in_place(m); }

QMat row_space_basis(const QMat& m) {
  QMat work = m;
  int rank = rref_in_place(work);
  QMat out(rank, m.cols());
  for (int i = 0; i < rank; ++i) out.row(i) = primitive(QVec(work.row(i).transpose())).transpose();
  return out;
}

QMat kernel_basis(const QMat& m) {
  const Eigen::Index cols = m.cols();
  QMat work = m;
  std::vector<int> pivots;
  int rank = rref_in_place(work, &pivots);
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;
  QMat out(cols - rank, cols);
  Eigen::Index row = 0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (is_pivot[j]) continue;
    QVec v = QVec::Zero(cols);
    v[j] = 1;
    for (int i = 0; i < rank; ++i) v[pivots[i]] = -work(i, j);
    out.row(row++) = v.transpose();
  }
  return row_space_basis(out);
}

QVec reduce_mod_rows(QVec v, const QMat& rref_rows, const std::vector<int>& pivots) {
  for (Eigen::Index i = 0; i < rref_rows.rows(); ++i) {
    int p = pivots[static_cast<size_t>(i)];
    if (v[p] == 0) continue;
    // materialize the coefficient: a lazy multiprecision expression would
    // still reference v[p] while the subtraction overwrites it
    Rational coef = v[p] / rref_rows(i, p);
    v -= coef * rref_rows.row(i).transpose();
  }
  return v;
}

bool in_row_space(const QVec& v, const QMat& m) {
  if (is_zero_vec(v)) return true;
  QMat stacked(m.rows() + 1, m.cols());
  stacked.topRows(m.rows()) = m;
  stacked.bottomRows(1) = v.transpose();
  return rank_of(stacked) == rank_of(m);
}

bool subspace_of(const QMat& a, const QMat& b) {
  if (a.rows() == 0) return true;
  QMat stacked = stack_rows(a, b);
  return rank_of(stacked) == rank_of(b);
}

QMat stack_rows(const QMat& a, const QMat& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  QMat out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

QMat rows_from(const std::vector<QVec>& rows, int cols) {
  QMat out(static_cast<Eigen::Index>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

Rational rational_from_string(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw std::runtime_error("empty rational literal");
  auto slash = t.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(t));
    Integer num(t.substr(0, slash)), den(t.substr(slash + 1));
    if (den == 0) throw std::runtime_error("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::runtime_error("malformed rational literal: " + s);
  }
}

}  // namespace critfan

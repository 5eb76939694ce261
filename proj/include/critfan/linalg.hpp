#pragma once

#include "critfan/scalar.hpp"

#include <vector>

namespace critfan {

bool is_zero_vec(const QVec& v);

// Shape-safe exact equality (Eigen's operator== asserts on shape mismatch).
bool mat_eq(const QMat& a, const QMat& b);
bool vec_eq(const QVec& a, const QVec& b);

// Scales v by a positive rational so its entries become coprime integers.
// The zero vector is returned unchanged.
QVec primitive(QVec v);

bool lex_less(const QVec& a, const QVec& b);

// Reduced row echelon form in place; returns the rank.  Pivot column
// indices are appended to *pivots when given.
int rref_in_place(QMat& m, std::vector<int>* pivots = nullptr);

int rank_of(QMat m);

// Canonical basis of the row space: RREF rows scaled to primitive integer
// vectors.  Depends only on the row space, not on the presentation.
QMat row_space_basis(const QMat& m);

// Canonical primitive basis of {x : m x = 0}.
QMat kernel_basis(const QMat& m);

// Canonical representative of v modulo the row space of an RREF basis:
// subtracts multiples of the rows to clear the pivot coordinates.
QVec reduce_mod_rows(QVec v, const QMat& rref_rows, const std::vector<int>& pivots);

bool in_row_space(const QVec& v, const QMat& m);

// span(rows of a) contained in span(rows of b)
bool subspace_of(const QMat& a, const QMat& b);

QMat stack_rows(const QMat& a, const QMat& b);

QMat rows_from(const std::vector<QVec>& rows, int cols);

}  // namespace critfan

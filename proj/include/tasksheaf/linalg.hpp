#pragma once

#include <cstddef>
#include <vector>

#include "tasksheaf/errors.hpp"
#include "tasksheaf/value.hpp"

namespace tasksheaf {

// Dense exact-rational linear algebra. Only what the kernel computation
// needs; everything is deterministic in the entries, no pivoting heuristics.

using RatMatrix = std::vector<std::vector<Rat>>;

// Reduced row echelon form in place. Returns the pivot column of each pivot
// row, strictly increasing. Pivot choice: first row with a nonzero entry.
inline std::vector<size_t> rref(RatMatrix& m) {
  std::vector<size_t> pivots;
  if (m.empty()) return pivots;
  size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t pivot = r;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[r], m[pivot]);
    Rat inv = m[r][c];
    for (size_t j = c; j < cols; ++j) m[r][j] /= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Basis of {x : m x = 0}, one vector per free column in ascending column
// order, with the free variable set to 1. The zero-row matrix yields the
// standard basis.
inline std::vector<std::vector<Rat>> nullspace_basis(RatMatrix m, size_t cols) {
  for (const auto& row : m)
    if (row.size() != cols) throw InternalError("ragged matrix");
  std::vector<size_t> pivots = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rat>> basis;
  for (size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[f] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

struct AffineSolution {
  bool consistent = false;
  std::vector<Rat> particular;          // free variables pinned to 0
  std::vector<std::vector<Rat>> basis;  // nullspace of the homogeneous part
};

// Exact solve of a x = b over `cols` unknowns. The full solution set is
// particular + span(basis). cols is explicit so a zero-row system still
// knows its width.
inline AffineSolution solve_affine(RatMatrix a, std::vector<Rat> b, size_t cols) {
  if (a.size() != b.size()) throw InternalError("solve_affine: row count mismatch");
  for (const auto& row : a)
    if (row.size() != cols) throw InternalError("solve_affine: width mismatch");
  AffineSolution out;
  out.basis = nullspace_basis(a, cols);
  RatMatrix aug = std::move(a);
  for (size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  std::vector<size_t> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == cols) {
    out.consistent = false;
    return out;
  }
  out.consistent = true;
  out.particular.assign(cols, Rat(0));
  for (size_t r = 0; r < pivots.size(); ++r) out.particular[pivots[r]] = aug[r][cols];
  return out;
}

// a x for a row-major matrix.
inline std::vector<Rat> mat_apply(const RatMatrix& a, const std::vector<Rat>& x) {
  std::vector<Rat> y(a.size(), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) throw InternalError("mat_apply: width mismatch");
    for (size_t j = 0; j < x.size(); ++j)
      if (a[i][j] != 0 && x[j] != 0) y[i] += a[i][j] * x[j];
  }
  return y;
}

}  // namespace tasksheaf

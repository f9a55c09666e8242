#include "gigmatch/simplex.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace gigmatch {

DenseSimplex::DenseSimplex(std::size_t rows, std::size_t cols, std::span<const double> a,
                           std::span<const double> b, std::span<const double> c)
    : rows_(rows), cols_(cols), width_(cols + rows + 1), tableau_((rows + 1) * width_, 0.0),
      basis_(rows) {
  assert(a.size() == rows * cols && b.size() == rows && c.size() == cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) at(r, j) = a[r * cols + j];
    at(r, cols + r) = 1.0;
    at(r, width_ - 1) = b[r];
    basis_[r] = cols + r;
  }
  // Objective row holds -c so that a negative entry marks an improving column.
  for (std::size_t j = 0; j < cols; ++j) at(rows, j) = -c[j];
}

void DenseSimplex::pivot(std::size_t row, std::size_t col) {
  const double inv = 1.0 / at(row, col);
  double* prow = &at(row, 0);
  for (std::size_t j = 0; j < width_; ++j) prow[j] *= inv;
  prow[col] = 1.0;
  for (std::size_t r = 0; r <= rows_; ++r) {
    if (r == row) continue;
    double* cur = &at(r, 0);
    const double factor = cur[col];
    if (factor == 0.0) continue;
    for (std::size_t j = 0; j < width_; ++j) cur[j] -= factor * prow[j];
    cur[col] = 0.0;
  }
  basis_[row] = col;
}

DenseSimplex::Result DenseSimplex::solve(std::size_t max_iterations, double tol) {
  Result res;
  const std::size_t nvars = cols_ + rows_;
  const std::size_t rhs = width_ - 1;
  for (;;) {
    // Bland: lowest-index improving column.
    std::size_t enter = nvars;
    for (std::size_t j = 0; j < nvars; ++j) {
      if (at(rows_, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter == nvars) break;
    if (res.iterations >= max_iterations) {
      res.status = Status::iteration_limit;
      break;
    }

    // Ratio test; ties go to the lowest-index basic variable.
    std::size_t leave = rows_;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows_; ++r) {
      const double coef = at(r, enter);
      if (coef <= tol) continue;
      const double ratio = at(r, rhs) / coef;
      if (leave == rows_ || ratio < best - tol ||
          (std::abs(ratio - best) <= tol && basis_[r] < basis_[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave == rows_) {
      res.status = Status::unbounded;
      break;
    }
    pivot(leave, enter);
    ++res.iterations;
  }

  res.x.assign(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (basis_[r] < cols_) res.x[basis_[r]] = at(r, rhs);
  }
  res.objective = at(rows_, rhs);
  return res;
}

}  // namespace gigmatch

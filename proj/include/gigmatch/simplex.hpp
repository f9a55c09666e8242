#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gigmatch {

// Dense-tableau primal simplex for
//   max c'x  s.t.  A x <= b,  x >= 0,  with b >= 0,
// started from the all-slack basis and pivoted with Bland's rule.
class DenseSimplex {
 public:
  enum class Status { optimal, unbounded, iteration_limit };

  struct Result {
    Status status = Status::optimal;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
  };

  // a is row-major rows x cols.
  DenseSimplex(std::size_t rows, std::size_t cols, std::span<const double> a,
               std::span<const double> b, std::span<const double> c);

  Result solve(std::size_t max_iterations, double tol = 1e-12);

 private:
  double& at(std::size_t r, std::size_t c) { return tableau_[r * width_ + c]; }
  void pivot(std::size_t row, std::size_t col);

  std::size_t rows_;
  std::size_t cols_;
  std::size_t width_;  // cols + rows slacks + rhs
  std::vector<double> tableau_;
  std::vector<std::size_t> basis_;
};

}  // namespace gigmatch

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "gigmatch/instance.hpp"

namespace gigmatch {

// Benchmark LP over variables x_{f,t}:
//   max  sum x_{f,t} p_{f,t} w_{f,t}
//   s.t. sum_{f in F_j} x_{f,t} <= q_{j,t}           (arrival rows)
//        sum_t sum_{f in F_i} x_{f,t} p_{f,t} <= b_i (capacity rows)
//        x >= 0
// Columns exist only where q_{j,t} > 0; ordered by round, then edge, then price.
struct LpColumn {
  std::size_t assignment = 0;
  int t = 0;
  double objective = 0.0;
};

struct LpRow {
  enum class Kind { arrival, capacity };
  Kind kind = Kind::arrival;
  std::size_t agent = 0;  // online index for arrival rows, offline index for capacity rows
  int t = 0;              // 0 on capacity rows
  double rhs = 0.0;
  std::vector<std::pair<std::size_t, double>> coeffs;  // (column, coefficient)
};

struct LpProblem {
  std::size_t num_assignments = 0;
  int horizon = 0;
  std::vector<LpColumn> columns;
  std::vector<LpRow> rows;

  std::size_t count_rows(LpRow::Kind kind) const;
};

struct LpOptions {
  // Capacity rows with rhs b_i > 1 are only allowed when this is false; the
  // policies always run on unit-capacity instances.
  bool require_unit_capacity = true;
  std::size_t max_columns = 5000;
  double feasibility_tol = 1e-9;
};

// Throws ContractError for non-unit capacities (when required) and
// SizeError past max_columns.
LpProblem build_lp(const Instance& inst, const LpOptions& options = {});

enum class LpStatus { optimal, infeasible, unbounded_guard };

// x is dense, x[(t - 1) * num_assignments + f]; zero for omitted columns.
struct LpSolution {
  LpStatus status = LpStatus::optimal;
  std::size_t num_assignments = 0;
  int horizon = 0;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;

  double value(std::size_t f, int t) const {
    return x[static_cast<std::size_t>(t - 1) * num_assignments + f];
  }
};

// Throws SolverError when the iteration cap 50 * (rows + cols) is hit.
LpSolution solve_lp(const LpProblem& prob, double tol = 1e-9);

// build_lp + solve_lp; throws SolverError unless the status is optimal.
LpSolution solve_benchmark_lp(const Instance& inst, const LpOptions& options = {});

// Rules: arrival-row, capacity-row, nonnegativity, shape.
ValidationReport check_feasibility(const Instance& inst, std::span<const double> x,
                                   double tol = 1e-9);

// Recomputes sum x_{f,t} p_{f,t} w_{f,t}.
double lp_objective(const Instance& inst, std::span<const double> x);

// CPLEX LP text format, one variable x_<edge>_<price>_<t> per column.
void write_lp(std::ostream& out, const Instance& inst, const LpProblem& prob);

}  // namespace gigmatch

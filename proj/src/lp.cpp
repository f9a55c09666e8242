#include "gigmatch/lp.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gigmatch/error.hpp"
#include "gigmatch/simplex.hpp"

namespace gigmatch {

std::size_t LpProblem::count_rows(LpRow::Kind kind) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [kind](const LpRow& r) { return r.kind == kind; }));
}

LpProblem build_lp(const Instance& inst, const LpOptions& options) {
  require_valid(inst);
  if (options.require_unit_capacity && !inst.unit_capacity()) {
    throw ContractError("build_lp needs unit capacities; run expand_capacities first");
  }

  LpProblem prob;
  prob.num_assignments = inst.num_assignments();
  prob.horizon = inst.horizon();

  std::vector<std::vector<std::size_t>> cols_of_offline(inst.num_offline());
  for (int t = 1; t <= inst.horizon(); ++t) {
    for (std::size_t f = 0; f < inst.num_assignments(); ++f) {
      if (inst.arrival(inst.online_of(f), t) <= 0.0) continue;
      cols_of_offline[inst.offline_of(f)].push_back(prob.columns.size());
      prob.columns.push_back({f, t, inst.accept_prob(f, t) * inst.profit(f, t)});
    }
  }
  if (prob.columns.size() > options.max_columns) {
    throw SizeError(fmt::format("LP has {} columns, above the cap of {}", prob.columns.size(),
                                options.max_columns));
  }

  // Columns are grouped by round, so each arrival row is a contiguous scan.
  std::size_t c = 0;
  for (int t = 1; t <= inst.horizon(); ++t) {
    const std::size_t begin = c;
    while (c < prob.columns.size() && prob.columns[c].t == t) ++c;
    for (std::size_t j = 0; j < inst.num_online(); ++j) {
      const double q = inst.arrival(j, t);
      if (q <= 0.0) continue;
      LpRow row{LpRow::Kind::arrival, j, t, q, {}};
      for (std::size_t k = begin; k < c; ++k) {
        if (inst.online_of(prob.columns[k].assignment) == j) row.coeffs.emplace_back(k, 1.0);
      }
      if (!row.coeffs.empty()) prob.rows.push_back(std::move(row));
    }
  }
  for (std::size_t i = 0; i < inst.num_offline(); ++i) {
    LpRow row{LpRow::Kind::capacity, i, 0, static_cast<double>(inst.offline(i).capacity), {}};
    for (std::size_t k : cols_of_offline[i]) {
      const LpColumn& col = prob.columns[k];
      row.coeffs.emplace_back(k, inst.accept_prob(col.assignment, col.t));
    }
    prob.rows.push_back(std::move(row));
  }
  return prob;
}

LpSolution solve_lp(const LpProblem& prob, double tol) {
  const std::size_t m = prob.rows.size();
  const std::size_t n = prob.columns.size();
  std::vector<double> a(m * n, 0.0);
  std::vector<double> b(m);
  std::vector<double> c(n);
  for (std::size_t r = 0; r < m; ++r) {
    b[r] = prob.rows[r].rhs;
    for (const auto& [col, coef] : prob.rows[r].coeffs) a[r * n + col] = coef;
  }
  for (std::size_t j = 0; j < n; ++j) c[j] = prob.columns[j].objective;

  DenseSimplex simplex(m, n, a, b, c);
  const std::size_t cap = 50 * (m + n);
  auto res = simplex.solve(cap, std::min(tol, 1e-12));
  if (res.status == DenseSimplex::Status::iteration_limit) {
    throw SolverError(fmt::format("simplex hit the iteration cap {} ({} rows, {} columns)", cap, m, n));
  }

  LpSolution sol;
  sol.num_assignments = prob.num_assignments;
  sol.horizon = prob.horizon;
  sol.iterations = res.iterations;
  sol.status = res.status == DenseSimplex::Status::optimal ? LpStatus::optimal : LpStatus::unbounded_guard;
  sol.x.assign(prob.num_assignments * static_cast<std::size_t>(prob.horizon), 0.0);
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = std::max(0.0, res.x[j]);
    const LpColumn& col = prob.columns[j];
    sol.x[static_cast<std::size_t>(col.t - 1) * prob.num_assignments + col.assignment] = v;
    sol.objective += v * col.objective;
  }
  return sol;
}

LpSolution solve_benchmark_lp(const Instance& inst, const LpOptions& options) {
  auto sol = solve_lp(build_lp(inst, options), options.feasibility_tol);
  if (sol.status != LpStatus::optimal) throw SolverError("benchmark LP reported as unbounded");
  return sol;
}

ValidationReport check_feasibility(const Instance& inst, std::span<const double> x, double tol) {
  ValidationReport rep;
  const std::size_t na = inst.num_assignments();
  const int horizon = inst.horizon();
  if (x.size() != na * static_cast<std::size_t>(horizon)) {
    rep.add("shape", "x", fmt::format("{} entries, expected |F|*T = {}", x.size(), na * horizon));
    return rep;
  }
  auto val = [&](std::size_t f, int t) { return x[static_cast<std::size_t>(t - 1) * na + f]; };

  for (int t = 1; t <= horizon; ++t) {
    for (std::size_t f = 0; f < na; ++f) {
      if (val(f, t) < -tol) {
        rep.add("nonnegativity", fmt::format("f={} t={}", f, t), fmt::format("x = {}", val(f, t)));
      }
    }
    for (std::size_t j = 0; j < inst.num_online(); ++j) {
      double lhs = 0.0;
      for (std::size_t f : inst.assignments_of_online(j)) lhs += val(f, t);
      if (lhs > inst.arrival(j, t) + tol) {
        rep.add("arrival-row", fmt::format("j={} t={}", inst.online(j).id, t),
                fmt::format("sum x = {:.12g} exceeds q = {:.12g}", lhs, inst.arrival(j, t)));
      }
    }
  }
  for (std::size_t i = 0; i < inst.num_offline(); ++i) {
    double lhs = 0.0;
    for (int t = 1; t <= horizon; ++t) {
      for (std::size_t f : inst.assignments_of_offline(i)) lhs += val(f, t) * inst.accept_prob(f, t);
    }
    const double cap = inst.offline(i).capacity;
    if (lhs > cap + tol) {
      rep.add("capacity-row", fmt::format("i={}", inst.offline(i).id),
              fmt::format("sum x p = {:.12g} exceeds b = {}", lhs, cap));
    }
  }
  return rep;
}

double lp_objective(const Instance& inst, std::span<const double> x) {
  const std::size_t na = inst.num_assignments();
  double total = 0.0;
  for (int t = 1; t <= inst.horizon(); ++t) {
    for (std::size_t f = 0; f < na; ++f) {
      const double v = x[static_cast<std::size_t>(t - 1) * na + f];
      if (v != 0.0) total += v * inst.accept_prob(f, t) * inst.profit(f, t);
    }
  }
  return total;
}

namespace {

std::string column_name(const Instance& inst, const LpColumn& col) {
  return fmt::format("x_{}_{}_{}", inst.edge_of(col.assignment), inst.price_of(col.assignment), col.t);
}

}  // namespace

void write_lp(std::ostream& out, const Instance& inst, const LpProblem& prob) {
  fmt::print(out, "\\ benchmark LP: {} columns, {} rows\n", prob.columns.size(), prob.rows.size());
  fmt::print(out, "Maximize\n obj:");
  bool any = false;
  for (const auto& col : prob.columns) {
    if (col.objective == 0.0) continue;
    fmt::print(out, " + {:.17g} {}", col.objective, column_name(inst, col));
    any = true;
  }
  if (!any) fmt::print(out, " 0");
  fmt::print(out, "\nSubject To\n");
  for (const auto& row : prob.rows) {
    if (row.coeffs.empty()) continue;
    if (row.kind == LpRow::Kind::arrival) {
      fmt::print(out, " arr_j{}_t{}:", row.agent, row.t);
    } else {
      fmt::print(out, " cap_i{}:", row.agent);
    }
    for (const auto& [c, coef] : row.coeffs) {
      fmt::print(out, " + {:.17g} {}", coef, column_name(inst, prob.columns[c]));
    }
    fmt::print(out, " <= {:.17g}\n", row.rhs);
  }
  fmt::print(out, "End\n");
}

}  // namespace gigmatch

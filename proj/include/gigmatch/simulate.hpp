#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gigmatch/exec.hpp"
#include "gigmatch/policy.hpp"
#include "gigmatch/rng.hpp"

namespace gigmatch {

struct Trajectory {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<RoundOutcome> rounds;
  double profit = 0.0;
  int matches = 0;
  // Successful assignments per original offline type (capacity copies merged).
  std::vector<int> matches_by_type;
};

// One run of the policy. Every round consumes exactly three uniforms from
// the stream: arrival, sampling, acceptance. With record_rounds = false
// only the totals are kept.
Trajectory run_trajectory(const Policy& policy, Stream& stream, bool record_rounds = true);
Trajectory run_trajectory(const Policy& policy, std::uint64_t master_seed, std::uint64_t index = 0,
                          bool record_rounds = true);

struct McSummary {
  std::size_t n = 0;
  std::uint64_t master_seed = 0;
  double mean_profit = 0.0;
  double mean_matches = 0.0;
  std::optional<double> var_profit;
  std::optional<double> var_matches;
  std::optional<double> se_profit;
  std::optional<double> se_matches;
  std::optional<double> se_var_matches;
  std::vector<double> mean_matches_by_type;
  // Per-replication values, in replication order.
  std::vector<double> profits;
  std::vector<int> matches;
};

// Aggregates per-replication values in index order.
McSummary summarize(std::vector<double> profits, std::vector<int> matches,
                    const std::vector<std::vector<int>>& by_type, std::uint64_t master_seed);

// Replication r uses Stream(master_seed, r). Results land in pre-assigned
// slots and are reduced in index order, so the summary is bit-identical for
// both execution modes and any thread count.
McSummary monte_carlo(const Policy& policy, std::size_t n, std::uint64_t master_seed,
                      Exec exec = Exec::parallel);

// CSV header: replication,t,arrival,sampled_edge,price_index,safe,accepted,profit
void write_events_csv_header(std::ostream& out);
void write_events_csv(std::ostream& out, const Instance& inst, const Trajectory& traj);

// Chebyshev: Pr[X <= threshold] <= min(1, v / (mu - threshold)^2).
// Throws ParameterError when threshold >= mu or v < 0.
double risk_bound(double mean, double variance, double threshold);

}  // namespace gigmatch

#include "gigmatch/simulate.hpp"

#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gigmatch/error.hpp"
#include "gigmatch/stats.hpp"

namespace gigmatch {

namespace {

std::size_t draw_arrival(const Instance& inst, int t, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t j = 0; j < inst.num_online(); ++j) {
    const double q = inst.arrival(j, t);
    if (q <= 0.0) continue;
    acc += q;
    last = j;
    if (u < acc) return j;
  }
  // Only reachable when the column sums to slightly less than one.
  return last;
}

}  // namespace

Trajectory run_trajectory(const Policy& policy, Stream& stream, bool record_rounds) {
  const Instance& inst = policy.instance();
  Trajectory traj;
  traj.matches_by_type.assign(inst.num_original_offline(), 0);
  if (record_rounds) traj.rounds.reserve(static_cast<std::size_t>(inst.horizon()));

  PolicyState state(policy);
  for (int t = 1; t <= inst.horizon(); ++t) {
    const double u_arrival = stream.uniform();
    const double u_sample = stream.uniform();
    const double u_accept = stream.uniform();

    const std::size_t j = draw_arrival(inst, t, u_arrival);
    const auto sampled = policy.sampling_distribution(j, t).pick(u_sample);
    const bool accept = sampled && u_accept < inst.accept_prob(*sampled, t);
    RoundOutcome out = state.step(t, j, sampled, accept);
    if (out.success()) {
      traj.profit += out.profit;
      ++traj.matches;
      ++traj.matches_by_type[inst.origin_of(inst.offline_of(*out.assignment))];
    }
    if (record_rounds) traj.rounds.push_back(out);
  }
  return traj;
}

Trajectory run_trajectory(const Policy& policy, std::uint64_t master_seed, std::uint64_t index,
                          bool record_rounds) {
  Stream stream(master_seed, index);
  Trajectory traj = run_trajectory(policy, stream, record_rounds);
  traj.seed = master_seed;
  traj.index = index;
  return traj;
}

McSummary summarize(std::vector<double> profits, std::vector<int> matches,
                    const std::vector<std::vector<int>>& by_type, std::uint64_t master_seed) {
  McSummary s;
  s.n = profits.size();
  s.master_seed = master_seed;
  Moments mp;
  Moments mh;
  for (std::size_t r = 0; r < s.n; ++r) {
    mp.add(profits[r]);
    mh.add(matches[r]);
  }
  s.mean_profit = mp.mean();
  s.mean_matches = mh.mean();
  s.var_profit = mp.variance();
  s.var_matches = mh.variance();
  s.se_profit = mp.standard_error();
  s.se_matches = mh.standard_error();
  s.se_var_matches = mh.variance_standard_error();
  if (!by_type.empty()) {
    s.mean_matches_by_type.assign(by_type.front().size(), 0.0);
    for (const auto& row : by_type) {
      for (std::size_t i = 0; i < row.size(); ++i) s.mean_matches_by_type[i] += row[i];
    }
    for (double& v : s.mean_matches_by_type) v /= static_cast<double>(by_type.size());
  }
  s.profits = std::move(profits);
  s.matches = std::move(matches);
  return s;
}

McSummary monte_carlo(const Policy& policy, std::size_t n, std::uint64_t master_seed, Exec exec) {
  if (n < 1) throw ParameterError("monte_carlo needs at least one replication");
  std::vector<double> profits(n);
  std::vector<int> matches(n);
  std::vector<std::vector<int>> by_type(n);

  auto replicate = [&](std::size_t r) {
    Trajectory traj = run_trajectory(policy, master_seed, r, false);
    profits[r] = traj.profit;
    matches[r] = traj.matches;
    by_type[r] = std::move(traj.matches_by_type);
  };

  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < count; ++r) replicate(static_cast<std::size_t>(r));
  } else {
    for (std::ptrdiff_t r = 0; r < count; ++r) replicate(static_cast<std::size_t>(r));
  }
  return summarize(std::move(profits), std::move(matches), by_type, master_seed);
}

void write_events_csv_header(std::ostream& out) {
  out << "replication,t,arrival,sampled_edge,price_index,safe,accepted,profit\n";
}

void write_events_csv(std::ostream& out, const Instance& inst, const Trajectory& traj) {
  for (const RoundOutcome& r : traj.rounds) {
    if (r.assignment) {
      fmt::print(out, "{},{},{},{},{},{},{},{}\n", traj.index, r.t, inst.online(r.arrival).id,
                 inst.edge_of(*r.assignment), inst.price_of(*r.assignment), r.safe ? 1 : 0,
                 r.accepted ? 1 : 0, r.profit);
    } else {
      fmt::print(out, "{},{},{},,,0,0,{}\n", traj.index, r.t, inst.online(r.arrival).id, r.profit);
    }
  }
}

double risk_bound(double mean, double variance, double threshold) {
  if (!(variance >= 0.0)) throw ParameterError("variance must be non-negative");
  if (!(threshold < mean)) {
    throw ParameterError(fmt::format("threshold {} must lie below the mean {}", threshold, mean));
  }
  const double gap = mean - threshold;
  return std::min(1.0, variance / (gap * gap));
}

}  // namespace gigmatch

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "gigmatch/instance.hpp"
#include "gigmatch/lp.hpp"

namespace gigmatch {

enum class PolicyKind { att, samp };

std::optional<PolicyKind> parse_policy_kind(std::string_view name);
std::string_view to_string(PolicyKind kind);

// ATT accepts gamma in [0, 1/2], SAMP gamma in [0, 1].
class PolicyConfig {
 public:
  PolicyConfig(PolicyKind kind, double gamma);

  PolicyKind kind() const { return kind_; }
  double gamma() const { return gamma_; }

  // Per-agent match-probability cap min(1/2, gamma) used by SAMP's variance bound.
  double gamma_bar() const;
  // Guaranteed fraction of OPT-LP: gamma (ATT) or gamma (1 - gamma) (SAMP).
  double ratio_bound() const;
  // Per-unit-capacity bound on Var[H]: gamma (1 - gamma) or gamma_bar (1 - gamma_bar).
  double variance_bound_per_unit() const;

 private:
  PolicyKind kind_;
  double gamma_;
};

// beta_{i,t} = 1 - gamma * sum_{t' < t} sum_{f in F_i} x_{f,t'} p_{f,t'},
// stored for t = 1..T+1 (the last row is the end-of-horizon value).
class AttenuationTable {
 public:
  AttenuationTable() = default;
  AttenuationTable(std::size_t num_offline, int horizon, std::vector<double> values)
      : num_offline_(num_offline), horizon_(horizon), values_(std::move(values)) {}

  double at(std::size_t i, int t) const {
    return values_[static_cast<std::size_t>(t - 1) * num_offline_ + i];
  }
  std::size_t num_offline() const { return num_offline_; }
  int horizon() const { return horizon_; }
  double min_value() const;

 private:
  std::size_t num_offline_ = 0;
  int horizon_ = 0;
  std::vector<double> values_;
};

// Throws ParameterError for gamma outside [0, 1/2] and ContractError when sol
// is not LP-feasible for inst.
AttenuationTable precompute_attenuation(const Instance& inst, const LpSolution& sol, double gamma);

struct SamplingDistribution {
  std::vector<std::pair<std::size_t, double>> probs;  // (assignment, probability) in F_j order
  double reject = 1.0;

  // Inverse-CDF pick with one uniform in [0,1); nullopt = nothing sampled.
  std::optional<std::size_t> pick(double u) const;
};

// Binds an instance, its LP solution and a config. The instance must outlive
// the policy; all members are immutable after construction.
class Policy {
 public:
  Policy(const Instance& inst, LpSolution sol, PolicyConfig config);

  const Instance& instance() const { return *inst_; }
  const LpSolution& solution() const { return sol_; }
  const PolicyConfig& config() const { return config_; }
  const AttenuationTable* attenuation() const { return beta_ ? &*beta_ : nullptr; }

  // ATT: (x_{f,t}/q_{j,t}) (gamma/beta_{i,t}); SAMP: gamma x_{f,t}/q_{j,t}.
  // Independent of which agents are still safe. Throws ContractError if q_{j,t} = 0.
  SamplingDistribution sampling_distribution(std::size_t j, int t) const;

 private:
  const Instance* inst_;
  LpSolution sol_;
  PolicyConfig config_;
  std::optional<AttenuationTable> beta_;
};

struct RoundOutcome {
  int t = 0;
  std::size_t arrival = 0;
  std::optional<std::size_t> assignment;
  bool safe = false;      // sampled agent still had capacity
  bool accepted = false;  // offered and accepted
  double profit = 0.0;

  bool success() const { return assignment && safe && accepted; }
};

// Safe set and round counter of one trajectory.
class PolicyState {
 public:
  explicit PolicyState(const Policy& policy);

  int round() const { return t_; }
  bool is_safe(std::size_t i) const { return safe_[i] != 0; }
  std::size_t num_safe() const { return num_safe_; }

  // Applies round t: if f was sampled, its agent is safe and the arrival
  // accepts, the agent leaves the safe set and w_{f,t} is earned. Throws
  // ContractError for t out of order or f not in F_j.
  RoundOutcome step(int t, std::size_t j, std::optional<std::size_t> sampled, bool accept);

 private:
  const Policy* policy_;
  std::vector<char> safe_;
  std::size_t num_safe_;
  int t_ = 1;
};

}  // namespace gigmatch

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gigmatch/exec.hpp"
#include "gigmatch/instance.hpp"
#include "gigmatch/policy.hpp"

namespace gigmatch {

// Size caps for the exact computations. Safe sets are bitmasks, so a
// connected component (or the whole agent set for the bitmask evaluator) may
// hold at most max_bitmask_agents offline agents.
struct OracleLimits {
  std::uint64_t state_budget = 10'000'000;
  int max_bitmask_agents = 16;
  std::uint64_t max_sequences = 1'000'000;

  // GIGMATCH_BUDGET=N sets state_budget = max_sequences = N and
  // max_bitmask_agents = min(30, floor(log2 N)).
  static OracleLimits from_env();
};

// Connected components of G restricted to offline agents with edges. Given
// one arrival per round, decisions in one component never affect another,
// so both optimal-policy DPs decompose over components.
struct Component {
  std::vector<std::size_t> offline;
  std::vector<std::size_t> online;
};
std::vector<Component> connected_components(const Instance& inst);

enum class OracleMethod { exact_enumeration, arrival_sampled };
std::string_view to_string(OracleMethod method);

struct OracleValue {
  double value = 0.0;
  OracleMethod method = OracleMethod::exact_enumeration;
  double standard_error = 0.0;
  std::uint64_t sequences = 0;  // enumerated or sampled arrival sequences
};

enum class OffMode { exact, sampled, automatic };

struct OptOffOptions {
  OffMode mode = OffMode::automatic;
  std::size_t samples = 20000;
  std::uint64_t seed = 42;
  OracleLimits limits{};
  Exec exec = Exec::parallel;
};

// Clairvoyant optimum: foresees the arrival sequence, not the acceptance
// coins. Exact by enumerating positive-probability sequences, or a seeded
// sample mean with standard error. Throws SizeError when exact mode is
// requested past the budget or a component exceeds the bitmask cap.
OracleValue opt_off(const Instance& inst, const OptOffOptions& options = {});

// Optimal online policy by backward DP over (round, safe set).
OracleValue opt_on(const Instance& inst, const OracleLimits& limits = {});

enum class EvalEngine {
  automatic,  // bitmask when it fits, factored otherwise
  bitmask,    // forward recursion on the distribution over safe sets
  factored,   // product form; exact because ATT/SAMP sample independently of the safe set
};
std::string_view to_string(EvalEngine engine);

struct ExactEval {
  EvalEngine engine = EvalEngine::bitmask;
  std::size_t num_offline = 0;
  std::size_t num_assignments = 0;
  int horizon = 0;
  double expected_profit = 0.0;
  // E[chi_{f,t}] at [(t-1) * |F| + f].
  std::vector<double> success;
  // alpha_{i,t} = Pr[i safe at the start of t] at [(t-1) * |I| + i], t = 1..T+1.
  std::vector<double> safe;
  // Pr[final safe set = S] indexed by bitmask S; empty for the factored engine.
  std::vector<double> final_safe_distribution;
  double expected_matches = 0.0;
  double variance_matches = 0.0;

  double success_prob(std::size_t f, int t) const {
    return success[static_cast<std::size_t>(t - 1) * num_assignments + f];
  }
  double safe_prob(std::size_t i, int t) const {
    return safe[static_cast<std::size_t>(t - 1) * num_offline + i];
  }
};

// Throws SizeError when the chosen engine exceeds the limits.
ExactEval exact_policy_eval(const Policy& policy, EvalEngine engine = EvalEngine::automatic,
                            const OracleLimits& limits = {}, Exec exec = Exec::parallel);

}  // namespace gigmatch

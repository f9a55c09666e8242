#include "gigmatch/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gigmatch/error.hpp"
#include "gigmatch/rng.hpp"
#include "gigmatch/stats.hpp"

namespace gigmatch {

OracleLimits OracleLimits::from_env() {
  OracleLimits limits;
  if (const char* env = std::getenv("GIGMATCH_BUDGET")) {
    char* end = nullptr;
    const unsigned long long n = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || n == 0) {
      throw ParameterError(fmt::format("GIGMATCH_BUDGET='{}' is not a positive integer", env));
    }
    limits.state_budget = n;
    limits.max_sequences = n;
    limits.max_bitmask_agents = std::min(30, static_cast<int>(std::bit_width(n)) - 1);
  }
  return limits;
}

std::string_view to_string(OracleMethod method) {
  return method == OracleMethod::exact_enumeration ? "exact-enumeration" : "arrival-sampled";
}

std::string_view to_string(EvalEngine engine) {
  switch (engine) {
    case EvalEngine::automatic: return "automatic";
    case EvalEngine::bitmask: return "bitmask";
    case EvalEngine::factored: return "factored";
  }
  return "?";
}

std::vector<Component> connected_components(const Instance& inst) {
  const std::size_t ni = inst.num_offline();
  const std::size_t n = ni + inst.num_online();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> linked(n, 0);
  for (std::size_t e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    linked[ed.offline] = linked[ni + ed.online] = 1;
    parent[find(ed.offline)] = find(ni + ed.online);
  }

  std::vector<Component> comps;
  std::vector<std::size_t> slot(n, kNoIndex);
  for (std::size_t v = 0; v < n; ++v) {
    if (!linked[v]) continue;
    const std::size_t root = find(v);
    if (slot[root] == kNoIndex) {
      slot[root] = comps.size();
      comps.emplace_back();
    }
    Component& c = comps[slot[root]];
    if (v < ni) {
      c.offline.push_back(v);
    } else {
      c.online.push_back(v - ni);
    }
  }
  return comps;
}

namespace {

// Component with lookup tables for the bitmask DPs.
struct LocalComponent {
  std::vector<std::size_t> offline;
  std::vector<char> has_online;          // indexed by global online id
  std::vector<unsigned> bit_of_offline;  // global offline id -> local bit

  std::size_t states() const { return std::size_t{1} << offline.size(); }
};

std::vector<LocalComponent> local_components(const Instance& inst, const OracleLimits& limits) {
  std::vector<LocalComponent> out;
  for (const Component& c : connected_components(inst)) {
    if (c.offline.size() > static_cast<std::size_t>(limits.max_bitmask_agents)) {
      throw SizeError(fmt::format("a connected component has {} offline agents; the exact oracle "
                                  "handles at most {} (raise GIGMATCH_BUDGET)",
                                  c.offline.size(), limits.max_bitmask_agents));
    }
    LocalComponent lc;
    lc.offline = c.offline;
    lc.has_online.assign(inst.num_online(), 0);
    for (std::size_t j : c.online) lc.has_online[j] = 1;
    lc.bit_of_offline.assign(inst.num_offline(), 0);
    for (std::size_t b = 0; b < c.offline.size(); ++b) lc.bit_of_offline[c.offline[b]] = static_cast<unsigned>(b);
    out.push_back(std::move(lc));
  }
  return out;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

// max(skip, best assignment of j to an agent in S), given next-round values.
double best_action(const Instance& inst, const LocalComponent& comp, std::size_t j, int t,
                   std::size_t mask, const std::vector<double>& next) {
  double best = next[mask];
  for (std::size_t f : inst.assignments_of_online(j)) {
    const std::size_t bit = std::size_t{1} << comp.bit_of_offline[inst.offline_of(f)];
    if (!(mask & bit)) continue;
    const double p = inst.accept_prob(f, t);
    const double v = p * (inst.profit(f, t) + next[mask ^ bit]) + (1.0 - p) * next[mask];
    best = std::max(best, v);
  }
  return best;
}

// Clairvoyant value of one component for a fixed arrival sequence.
double clairvoyant_value(const Instance& inst, const LocalComponent& comp,
                         const std::vector<std::size_t>& seq, std::vector<double>& v,
                         std::vector<double>& w) {
  const std::size_t states = comp.states();
  v.assign(states, 0.0);
  w.resize(states);
  for (int t = inst.horizon(); t >= 1; --t) {
    const std::size_t j = seq[static_cast<std::size_t>(t - 1)];
    if (!comp.has_online[j]) continue;
    for (std::size_t s = 0; s < states; ++s) w[s] = best_action(inst, comp, j, t, s, v);
    v.swap(w);
  }
  return v[states - 1];
}

struct ArrivalCells {
  // Positive-probability (online type, q) per round.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_round;
  std::uint64_t sequences = 1;
};

ArrivalCells arrival_cells(const Instance& inst) {
  ArrivalCells cells;
  for (int t = 1; t <= inst.horizon(); ++t) {
    auto& row = cells.by_round.emplace_back();
    for (std::size_t j = 0; j < inst.num_online(); ++j) {
      if (inst.arrival(j, t) > 0.0) row.emplace_back(j, inst.arrival(j, t));
    }
    cells.sequences = saturating_mul(cells.sequences, row.size());
  }
  return cells;
}

double sequence_value(const Instance& inst, const std::vector<LocalComponent>& comps,
                      const std::vector<std::size_t>& seq, std::vector<double>& v,
                      std::vector<double>& w) {
  double total = 0.0;
  for (const auto& c : comps) total += clairvoyant_value(inst, c, seq, v, w);
  return total;
}

}  // namespace

OracleValue opt_off(const Instance& inst, const OptOffOptions& options) {
  require_valid(inst);
  if (!inst.unit_capacity()) throw ContractError("opt_off needs a unit-capacity instance");
  const auto comps = local_components(inst, options.limits);
  const ArrivalCells cells = arrival_cells(inst);

  std::uint64_t per_sequence = 0;
  for (const auto& c : comps) {
    per_sequence = saturating_add(per_sequence, saturating_mul(inst.horizon(), c.states()));
  }
  const std::uint64_t cost = saturating_mul(cells.sequences, std::max<std::uint64_t>(per_sequence, 1));
  const bool fits = cells.sequences <= options.limits.max_sequences && cost <= options.limits.state_budget;

  bool exact = options.mode == OffMode::exact || (options.mode == OffMode::automatic && fits);
  if (options.mode == OffMode::exact && !fits) {
    throw SizeError(fmt::format("exact OPT-OFF needs {} arrival sequences (cost {}), over the budget "
                                "{}; use sampled mode",
                                cells.sequences, cost, options.limits.state_budget));
  }

  const auto horizon = static_cast<std::size_t>(inst.horizon());
  OracleValue out;
  if (exact) {
    const auto count = static_cast<std::ptrdiff_t>(cells.sequences);
    std::vector<double> slots(cells.sequences);
    auto evaluate = [&](std::size_t r, std::vector<std::size_t>& seq, std::vector<double>& v,
                        std::vector<double>& w) {
      // Mixed-radix decode, round 1 is the least significant digit.
      double prob = 1.0;
      std::size_t rest = r;
      for (std::size_t t = 0; t < horizon; ++t) {
        const auto& row = cells.by_round[t];
        const auto& [j, q] = row[rest % row.size()];
        rest /= row.size();
        seq[t] = j;
        prob *= q;
      }
      slots[r] = prob * sequence_value(inst, comps, seq, v, w);
    };
    if (options.exec == Exec::parallel) {
#pragma omp parallel
      {
        std::vector<std::size_t> seq(horizon);
        std::vector<double> v;
        std::vector<double> w;
#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t r = 0; r < count; ++r) evaluate(static_cast<std::size_t>(r), seq, v, w);
      }
    } else {
      std::vector<std::size_t> seq(horizon);
      std::vector<double> v;
      std::vector<double> w;
      for (std::ptrdiff_t r = 0; r < count; ++r) evaluate(static_cast<std::size_t>(r), seq, v, w);
    }
    out.value = std::accumulate(slots.begin(), slots.end(), 0.0);
    out.method = OracleMethod::exact_enumeration;
    out.sequences = cells.sequences;
    return out;
  }

  if (options.samples < 2) throw ParameterError("sampled OPT-OFF needs at least two samples");
  const auto count = static_cast<std::ptrdiff_t>(options.samples);
  std::vector<double> slots(options.samples);
  auto evaluate = [&](std::size_t r, std::vector<std::size_t>& seq, std::vector<double>& v,
                      std::vector<double>& w) {
    Stream stream(options.seed, r);
    for (std::size_t t = 0; t < horizon; ++t) {
      const auto& row = cells.by_round[t];
      const double u = stream.uniform();
      double acc = 0.0;
      seq[t] = row.back().first;
      for (const auto& [j, q] : row) {
        acc += q;
        if (u < acc) {
          seq[t] = j;
          break;
        }
      }
    }
    slots[r] = sequence_value(inst, comps, seq, v, w);
  };
  if (options.exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<std::size_t> seq(horizon);
      std::vector<double> v;
      std::vector<double> w;
#pragma omp for schedule(dynamic, 64)
      for (std::ptrdiff_t r = 0; r < count; ++r) evaluate(static_cast<std::size_t>(r), seq, v, w);
    }
  } else {
    std::vector<std::size_t> seq(horizon);
    std::vector<double> v;
    std::vector<double> w;
    for (std::ptrdiff_t r = 0; r < count; ++r) evaluate(static_cast<std::size_t>(r), seq, v, w);
  }
  Moments m;
  for (double s : slots) m.add(s);
  out.value = m.mean();
  out.standard_error = m.standard_error().value_or(0.0);
  out.method = OracleMethod::arrival_sampled;
  out.sequences = options.samples;
  return out;
}

OracleValue opt_on(const Instance& inst, const OracleLimits& limits) {
  require_valid(inst);
  if (!inst.unit_capacity()) throw ContractError("opt_on needs a unit-capacity instance");
  const auto comps = local_components(inst, limits);
  std::uint64_t cost = 0;
  for (const auto& c : comps) {
    cost = saturating_add(cost, saturating_mul(saturating_mul(inst.horizon(), c.states()),
                                               std::max<std::size_t>(inst.num_assignments(), 1)));
  }
  if (cost > limits.state_budget) {
    throw SizeError(fmt::format("OPT-ON DP needs about {} steps, over the budget {}", cost, limits.state_budget));
  }

  OracleValue out;
  std::vector<double> v;
  std::vector<double> w;
  for (const auto& c : comps) {
    const std::size_t states = c.states();
    v.assign(states, 0.0);
    w.resize(states);
    for (int t = inst.horizon(); t >= 1; --t) {
      double outside = 1.0;
      for (std::size_t j = 0; j < inst.num_online(); ++j) {
        if (c.has_online[j]) outside -= inst.arrival(j, t);
      }
      for (std::size_t s = 0; s < states; ++s) {
        double acc = outside * v[s];
        for (std::size_t j = 0; j < inst.num_online(); ++j) {
          const double q = inst.arrival(j, t);
          if (!c.has_online[j] || q <= 0.0) continue;
          acc += q * best_action(inst, c, j, t, s, v);
        }
        w[s] = acc;
      }
      v.swap(w);
    }
    out.value += v[states - 1];
  }
  out.method = OracleMethod::exact_enumeration;
  out.sequences = 0;
  return out;
}

namespace {

// Per-round law of the policy: success rate q s p of each assignment and the
// resulting per-agent hit rate r_i = sum_{f in F_i} q s p.
struct RoundLaw {
  std::vector<std::pair<std::size_t, double>> rate;
  std::vector<double> hit;
};

RoundLaw round_law(const Policy& policy, int t) {
  const Instance& inst = policy.instance();
  RoundLaw law;
  law.hit.assign(inst.num_offline(), 0.0);
  for (std::size_t j = 0; j < inst.num_online(); ++j) {
    const double q = inst.arrival(j, t);
    if (q <= 0.0) continue;
    for (const auto& [f, s] : policy.sampling_distribution(j, t).probs) {
      const double r = q * s * inst.accept_prob(f, t);
      law.rate.emplace_back(f, r);
      law.hit[inst.offline_of(f)] += r;
    }
  }
  return law;
}

void finish_from_distribution(ExactEval& ev, const std::vector<double>& pi) {
  const auto n = static_cast<double>(ev.num_offline);
  double mean = 0.0;
  for (std::size_t s = 0; s < pi.size(); ++s) mean += pi[s] * (n - std::popcount(s));
  double var = 0.0;
  for (std::size_t s = 0; s < pi.size(); ++s) {
    const double d = (n - std::popcount(s)) - mean;
    var += pi[s] * d * d;
  }
  ev.expected_matches = mean;
  ev.variance_matches = var;
  ev.final_safe_distribution = pi;
}

void fill_expected_profit(const Instance& inst, ExactEval& ev) {
  ev.expected_profit = 0.0;
  for (int t = 1; t <= ev.horizon; ++t) {
    for (std::size_t f = 0; f < ev.num_assignments; ++f) {
      const double chi = ev.success_prob(f, t);
      if (chi != 0.0) ev.expected_profit += inst.profit(f, t) * chi;
    }
  }
}

// Reference: scatter each state's mass through arrival, sampling, acceptance.
void bitmask_push(const Policy& policy, ExactEval& ev) {
  const Instance& inst = policy.instance();
  const std::size_t ni = inst.num_offline();
  const std::size_t states = std::size_t{1} << ni;
  std::vector<double> pi(states, 0.0);
  std::vector<double> next(states);
  pi[states - 1] = 1.0;

  for (int t = 1; t <= inst.horizon() + 1; ++t) {
    double* alpha = ev.safe.data() + static_cast<std::size_t>(t - 1) * ni;
    for (std::size_t s = 0; s < states; ++s) {
      if (pi[s] == 0.0) continue;
      for (std::size_t i = 0; i < ni; ++i) {
        if (s >> i & 1) alpha[i] += pi[s];
      }
    }
    if (t > inst.horizon()) break;

    double* chi = ev.success.data() + static_cast<std::size_t>(t - 1) * ev.num_assignments;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      if (pi[s] == 0.0) continue;
      double stay = 1.0;
      for (std::size_t j = 0; j < inst.num_online(); ++j) {
        const double q = inst.arrival(j, t);
        if (q <= 0.0) continue;
        for (const auto& [f, prob] : policy.sampling_distribution(j, t).probs) {
          const std::size_t i = inst.offline_of(f);
          if (!(s >> i & 1)) continue;
          const double moved = pi[s] * q * prob * inst.accept_prob(f, t);
          chi[f] += moved;
          next[s & ~(std::size_t{1} << i)] += moved;
          stay -= q * prob * inst.accept_prob(f, t);
        }
      }
      next[s] += pi[s] * stay;
    }
    pi.swap(next);
  }
  finish_from_distribution(ev, pi);
}

// Gather form: next[S] = pi[S] (1 - sum_{i in S} r_i) + sum_{i not in S} pi[S + i] r_i.
// Uses that the sampling law does not depend on the safe set.
void bitmask_pull(const Policy& policy, ExactEval& ev) {
  const Instance& inst = policy.instance();
  const std::size_t ni = inst.num_offline();
  const std::size_t states = std::size_t{1} << ni;
  const auto nstates = static_cast<std::ptrdiff_t>(states);
  const auto nagents = static_cast<std::ptrdiff_t>(ni);
  std::vector<double> pi(states, 0.0);
  std::vector<double> next(states);
  pi[states - 1] = 1.0;

  for (int t = 1; t <= inst.horizon() + 1; ++t) {
    double* alpha = ev.safe.data() + static_cast<std::size_t>(t - 1) * ni;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nagents; ++i) {
      double acc = 0.0;
      for (std::size_t s = 0; s < states; ++s) {
        if (s >> i & 1) acc += pi[s];
      }
      alpha[i] = acc;
    }
    if (t > inst.horizon()) break;

    const RoundLaw law = round_law(policy, t);
    double* chi = ev.success.data() + static_cast<std::size_t>(t - 1) * ev.num_assignments;
    for (const auto& [f, r] : law.rate) chi[f] += r * alpha[inst.offline_of(f)];

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t sv = 0; sv < nstates; ++sv) {
      const auto s = static_cast<std::size_t>(sv);
      double leave = 0.0;
      double gain = 0.0;
      for (std::size_t i = 0; i < ni; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        if (s & bit) {
          leave += law.hit[i];
        } else {
          gain += pi[s | bit] * law.hit[i];
        }
      }
      next[s] = pi[s] * (1.0 - leave) + gain;
    }
    pi.swap(next);
  }
  finish_from_distribution(ev, pi);
}

// Closed product form: agent i stays safe through round t with probability
// prod_{t' < t} (1 - r_{i,t'}); two agents are never hit in the same round,
// so Pr[both stay safe] = prod_t (1 - r_{i,t} - r_{k,t}).
void factored(const Policy& policy, ExactEval& ev) {
  const Instance& inst = policy.instance();
  const std::size_t ni = inst.num_offline();
  const auto horizon = static_cast<std::size_t>(inst.horizon());
  std::vector<double> hits(horizon * ni);
  std::vector<double> survive(ni, 1.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const RoundLaw law = round_law(policy, static_cast<int>(t + 1));
    std::copy(law.hit.begin(), law.hit.end(), hits.begin() + static_cast<std::ptrdiff_t>(t * ni));
    std::copy(survive.begin(), survive.end(), ev.safe.begin() + static_cast<std::ptrdiff_t>(t * ni));
    double* chi = ev.success.data() + t * ev.num_assignments;
    for (const auto& [f, r] : law.rate) chi[f] += r * survive[inst.offline_of(f)];
    for (std::size_t i = 0; i < ni; ++i) survive[i] *= 1.0 - law.hit[i];
  }
  std::copy(survive.begin(), survive.end(), ev.safe.begin() + static_cast<std::ptrdiff_t>(horizon * ni));

  double mean = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < ni; ++i) {
    mean += 1.0 - survive[i];
    var += survive[i] * (1.0 - survive[i]);
  }
  const auto nagents = static_cast<std::ptrdiff_t>(ni);
#pragma omp parallel for schedule(dynamic) reduction(+ : var)
  for (std::ptrdiff_t iv = 0; iv < nagents; ++iv) {
    const auto i = static_cast<std::size_t>(iv);
    for (std::size_t k = i + 1; k < ni; ++k) {
      double both = 1.0;
      for (std::size_t t = 0; t < horizon; ++t) both *= 1.0 - hits[t * ni + i] - hits[t * ni + k];
      var += 2.0 * (both - survive[i] * survive[k]);
    }
  }
  ev.expected_matches = mean;
  ev.variance_matches = var;
}

}  // namespace

ExactEval exact_policy_eval(const Policy& policy, EvalEngine engine, const OracleLimits& limits, Exec exec) {
  const Instance& inst = policy.instance();
  const std::size_t ni = inst.num_offline();
  const auto horizon = static_cast<std::uint64_t>(inst.horizon());

  const bool bitmask_fits = ni <= static_cast<std::size_t>(limits.max_bitmask_agents) &&
                            saturating_mul(std::uint64_t{1} << std::min<std::size_t>(ni, 63), horizon) <=
                                limits.state_budget;
  if (engine == EvalEngine::automatic) engine = bitmask_fits ? EvalEngine::bitmask : EvalEngine::factored;
  if (engine == EvalEngine::bitmask && !bitmask_fits) {
    throw SizeError(fmt::format("bitmask evaluation of {} agents over {} rounds exceeds the limits "
                                "({} agents, budget {})",
                                ni, horizon, limits.max_bitmask_agents, limits.state_budget));
  }
  if (engine == EvalEngine::factored && saturating_mul(saturating_mul(ni, ni), horizon) > limits.state_budget) {
    throw SizeError(fmt::format("factored evaluation needs |I|^2 T = {} steps, over the budget {}",
                                saturating_mul(saturating_mul(ni, ni), horizon), limits.state_budget));
  }

  ExactEval ev;
  ev.engine = engine;
  ev.num_offline = ni;
  ev.num_assignments = inst.num_assignments();
  ev.horizon = inst.horizon();
  ev.success.assign(ev.num_assignments * horizon, 0.0);
  ev.safe.assign(ni * (horizon + 1), 0.0);

  if (engine == EvalEngine::bitmask) {
    if (exec == Exec::serial) {
      bitmask_push(policy, ev);
    } else {
      bitmask_pull(policy, ev);
    }
  } else {
    factored(policy, ev);
  }
  fill_expected_profit(inst, ev);
  return ev;
}

}  // namespace gigmatch

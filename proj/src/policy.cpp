#include "gigmatch/policy.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "gigmatch/error.hpp"

namespace gigmatch {

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "att" || name == "ATT") return PolicyKind::att;
  if (name == "samp" || name == "SAMP") return PolicyKind::samp;
  return std::nullopt;
}

std::string_view to_string(PolicyKind kind) { return kind == PolicyKind::att ? "att" : "samp"; }

PolicyConfig::PolicyConfig(PolicyKind kind, double gamma) : kind_(kind), gamma_(gamma) {
  const double hi = kind == PolicyKind::att ? 0.5 : 1.0;
  if (!(gamma >= 0.0 && gamma <= hi)) {
    throw ParameterError(fmt::format("{} needs gamma in [0, {}], got {}", to_string(kind), hi, gamma));
  }
}

double PolicyConfig::gamma_bar() const { return std::min(0.5, gamma_); }

double PolicyConfig::ratio_bound() const {
  return kind_ == PolicyKind::att ? gamma_ : gamma_ * (1.0 - gamma_);
}

double PolicyConfig::variance_bound_per_unit() const {
  const double g = kind_ == PolicyKind::att ? gamma_ : gamma_bar();
  return g * (1.0 - g);
}

double AttenuationTable::min_value() const {
  return values_.empty() ? 1.0 : *std::min_element(values_.begin(), values_.end());
}

namespace {

void require_feasible(const Instance& inst, const LpSolution& sol) {
  const auto rep = check_feasibility(inst, sol.x);
  if (rep.ok) return;
  std::ostringstream os;
  os << "LP solution is not feasible for this instance:";
  for (const auto& v : rep.violations) os << "\n  [" << v.rule << "] " << v.location << ": " << v.message;
  throw ContractError(os.str());
}

}  // namespace

AttenuationTable precompute_attenuation(const Instance& inst, const LpSolution& sol, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 0.5)) {
    throw ParameterError(fmt::format("attenuation needs gamma in [0, 1/2], got {}", gamma));
  }
  if (!inst.unit_capacity()) throw ContractError("attenuation needs a unit-capacity instance");
  require_feasible(inst, sol);

  const std::size_t ni = inst.num_offline();
  const int horizon = inst.horizon();
  std::vector<double> values(ni * static_cast<std::size_t>(horizon + 1));
  std::vector<double> used(ni, 0.0);  // running sum_{t' < t} x p per agent
  for (int t = 1; t <= horizon + 1; ++t) {
    for (std::size_t i = 0; i < ni; ++i) {
      values[static_cast<std::size_t>(t - 1) * ni + i] = 1.0 - gamma * used[i];
    }
    if (t > horizon) break;
    for (std::size_t f = 0; f < inst.num_assignments(); ++f) {
      const double x = sol.value(f, t);
      if (x != 0.0) used[inst.offline_of(f)] += x * inst.accept_prob(f, t);
    }
  }
  return AttenuationTable(ni, horizon, std::move(values));
}

std::optional<std::size_t> SamplingDistribution::pick(double u) const {
  double acc = 0.0;
  for (const auto& [f, p] : probs) {
    acc += p;
    if (u < acc) return f;
  }
  return std::nullopt;
}

Policy::Policy(const Instance& inst, LpSolution sol, PolicyConfig config)
    : inst_(&inst), sol_(std::move(sol)), config_(config) {
  if (!inst.unit_capacity()) throw ContractError("policies run on unit-capacity instances");
  if (config_.kind() == PolicyKind::att) {
    beta_ = precompute_attenuation(inst, sol_, config_.gamma());
  } else {
    require_feasible(inst, sol_);
  }
}

SamplingDistribution Policy::sampling_distribution(std::size_t j, int t) const {
  const double q = inst_->arrival(j, t);
  if (!(q > 0.0)) {
    throw ContractError(fmt::format("online type {} cannot arrive at t={}", inst_->online(j).id, t));
  }
  const double gamma = config_.gamma();
  SamplingDistribution dist;
  double mass = 0.0;
  for (std::size_t f : inst_->assignments_of_online(j)) {
    double p = gamma * sol_.value(f, t) / q;
    if (beta_) p /= beta_->at(inst_->offline_of(f), t);
    dist.probs.emplace_back(f, p);
    mass += p;
  }
  dist.reject = std::max(0.0, 1.0 - mass);
  return dist;
}

PolicyState::PolicyState(const Policy& policy)
    : policy_(&policy),
      safe_(policy.instance().num_offline(), 1),
      num_safe_(policy.instance().num_offline()) {}

RoundOutcome PolicyState::step(int t, std::size_t j, std::optional<std::size_t> sampled, bool accept) {
  const Instance& inst = policy_->instance();
  if (t != t_ || t > inst.horizon()) {
    throw ContractError(fmt::format("step for round {} but the state is at round {}", t, t_));
  }
  RoundOutcome out;
  out.t = t;
  out.arrival = j;
  if (sampled) {
    const std::size_t f = *sampled;
    if (f >= inst.num_assignments() || inst.online_of(f) != j) {
      throw ContractError(fmt::format("assignment {} does not serve online type {}", f, inst.online(j).id));
    }
    out.assignment = f;
    const std::size_t i = inst.offline_of(f);
    out.safe = safe_[i] != 0;
    if (out.safe && accept) {
      out.accepted = true;
      out.profit = inst.profit(f, t);
      safe_[i] = 0;
      --num_safe_;
    }
  }
  ++t_;
  return out;
}

}  // namespace gigmatch

#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gigmatch {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();
inline constexpr double kProbabilityTolerance = 1e-9;

struct OfflineType {
  std::string id;
  int capacity = 1;
  friend bool operator==(const OfflineType&, const OfflineType&) = default;
};

struct OnlineType {
  std::string id;
  friend bool operator==(const OnlineType&, const OnlineType&) = default;
};

struct Edge {
  std::size_t offline = kNoIndex;
  std::size_t online = kNoIndex;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// A per-round value: an optional constant for every round plus per-round
// overrides. Rounds are 1-based.
class RoundSeries {
 public:
  RoundSeries() = default;
  explicit RoundSeries(double constant) : constant_(constant) {}

  void set_constant(double v) { constant_ = v; }
  void set(int t, double v) { overrides_[t] = v; }

  std::optional<double> at(int t) const {
    if (auto it = overrides_.find(t); it != overrides_.end()) return it->second;
    return constant_;
  }

  const std::optional<double>& constant() const { return constant_; }
  const std::map<int, double>& overrides() const { return overrides_; }

  friend bool operator==(const RoundSeries&, const RoundSeries&) = default;

 private:
  std::optional<double> constant_;
  std::map<int, double> overrides_;
};

// Raw fields of an instance. Assignment f = (edge e, price k) has index
// e * K + k; accept_prob and profit are indexed by assignment.
struct InstanceData {
  std::vector<OfflineType> offline;
  std::vector<OnlineType> online;
  std::vector<double> prices;
  std::vector<Edge> edges;
  int horizon = 0;
  // Row-major by round: arrival[(t - 1) * |J| + j].
  std::vector<double> arrival;
  std::vector<RoundSeries> accept_prob;
  std::vector<RoundSeries> profit;
  // Filled by expand_capacities: origin[i] is the original offline index of
  // unit copy i, original_offline the pre-expansion types. Empty = identity.
  std::vector<std::size_t> origin;
  std::vector<OfflineType> original_offline;

  friend bool operator==(const InstanceData&, const InstanceData&) = default;
};

// Immutable MP-KHD instance. Construction never throws on invalid content so
// that validate() can report on arbitrary candidates; accessors assume a
// valid instance.
class Instance {
 public:
  Instance() = default;
  explicit Instance(InstanceData data);

  const InstanceData& data() const { return data_; }

  std::size_t num_offline() const { return data_.offline.size(); }
  std::size_t num_online() const { return data_.online.size(); }
  std::size_t num_prices() const { return data_.prices.size(); }
  std::size_t num_edges() const { return data_.edges.size(); }
  std::size_t num_assignments() const { return num_edges() * num_prices(); }
  int horizon() const { return data_.horizon; }

  const OfflineType& offline(std::size_t i) const { return data_.offline[i]; }
  const OnlineType& online(std::size_t j) const { return data_.online[j]; }
  const Edge& edge(std::size_t e) const { return data_.edges[e]; }

  std::size_t edge_of(std::size_t a) const { return a / num_prices(); }
  std::size_t price_of(std::size_t a) const { return a % num_prices(); }
  std::size_t offline_of(std::size_t a) const { return data_.edges[edge_of(a)].offline; }
  std::size_t online_of(std::size_t a) const { return data_.edges[edge_of(a)].online; }

  double arrival(std::size_t j, int t) const {
    return data_.arrival[static_cast<std::size_t>(t - 1) * num_online() + j];
  }
  double accept_prob(std::size_t a, int t) const;
  double profit(std::size_t a, int t) const;

  // Assignments in deterministic (edge, price) order.
  const std::vector<std::size_t>& assignments_of_online(std::size_t j) const {
    return by_online_[j];
  }
  const std::vector<std::size_t>& assignments_of_offline(std::size_t i) const {
    return by_offline_[i];
  }

  int total_capacity() const;
  bool unit_capacity() const;

  // Capacity-copy bookkeeping; identity for unexpanded instances.
  std::size_t origin_of(std::size_t i) const {
    return data_.origin.empty() ? i : data_.origin[i];
  }
  std::size_t num_original_offline() const {
    return data_.origin.empty() ? num_offline() : data_.original_offline.size();
  }
  const OfflineType& original_offline(std::size_t i) const {
    return data_.origin.empty() ? data_.offline[i] : data_.original_offline[i];
  }

  friend bool operator==(const Instance& a, const Instance& b) { return a.data_ == b.data_; }

 private:
  InstanceData data_;
  std::vector<std::vector<std::size_t>> by_online_;
  std::vector<std::vector<std::size_t>> by_offline_;
};

struct Violation {
  std::string rule;
  std::string location;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  void add(std::string rule, std::string location, std::string message) {
    ok = false;
    violations.push_back({std::move(rule), std::move(location), std::move(message)});
  }
  bool has(const std::string& rule) const;
};

// Lists every broken invariant. Rule ids:
//   horizon, no-prices, negative-price, capacity, duplicate-id, edge-ref,
//   duplicate-edge, price-index (loader only),
//   arrival-shape, arrival-range, arrival-mass, series-shape, missing-value,
//   round-index, accept-prob-range, negative-profit.
ValidationReport validate(const Instance& inst);

// Throws ContractError listing the violations when inst is invalid.
void require_valid(const Instance& inst);

// Replaces each offline type of capacity b by b unit copies "id#1".."id#b".
// Already unit-capacity instances come back unchanged.
Instance expand_capacities(const Instance& inst);

}  // namespace gigmatch

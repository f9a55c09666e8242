#include "gigmatch/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gigmatch/error.hpp"

namespace gigmatch {

Instance::Instance(InstanceData data) : data_(std::move(data)) {
  by_online_.assign(num_online(), {});
  by_offline_.assign(num_offline(), {});
  const std::size_t k = num_prices();
  for (std::size_t e = 0; e < num_edges(); ++e) {
    const Edge& ed = data_.edges[e];
    for (std::size_t p = 0; p < k; ++p) {
      if (ed.online < num_online()) by_online_[ed.online].push_back(e * k + p);
      if (ed.offline < num_offline()) by_offline_[ed.offline].push_back(e * k + p);
    }
  }
}

double Instance::accept_prob(std::size_t a, int t) const {
  auto v = data_.accept_prob[a].at(t);
  if (!v) throw ContractError(fmt::format("no acceptance probability for assignment {} at t={}", a, t));
  return *v;
}

double Instance::profit(std::size_t a, int t) const {
  auto v = data_.profit[a].at(t);
  if (!v) throw ContractError(fmt::format("no profit for assignment {} at t={}", a, t));
  return *v;
}

int Instance::total_capacity() const {
  return std::accumulate(data_.offline.begin(), data_.offline.end(), 0,
                         [](int acc, const OfflineType& o) { return acc + o.capacity; });
}

bool Instance::unit_capacity() const {
  return std::all_of(data_.offline.begin(), data_.offline.end(),
                     [](const OfflineType& o) { return o.capacity == 1; });
}

bool ValidationReport::has(const std::string& rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

namespace {

template <typename Items>
void check_unique_ids(const Items& items, const char* what, ValidationReport& rep) {
  std::set<std::string> seen;
  for (std::size_t n = 0; n < items.size(); ++n) {
    if (!seen.insert(items[n].id).second) {
      rep.add("duplicate-id", fmt::format("{}[{}]", what, n),
              fmt::format("id '{}' appears more than once", items[n].id));
    }
  }
}

void check_series(const InstanceData& d, const std::vector<RoundSeries>& series,
                  const char* what, bool is_prob, ValidationReport& rep) {
  const std::size_t k = d.prices.size();
  const std::size_t expected = d.edges.size() * k;
  if (series.size() != expected) {
    rep.add("series-shape", what,
            fmt::format("{} has {} entries, expected |E|*K = {}", what, series.size(), expected));
    return;
  }
  for (std::size_t a = 0; a < series.size(); ++a) {
    const std::size_t e = a / k;
    const std::size_t p = a % k;
    const auto& s = series[a];
    for (const auto& [t, v] : s.overrides()) {
      if (t < 1 || t > d.horizon) {
        rep.add("round-index", fmt::format("{} edge={} k={} t={}", what, e, p, t),
                fmt::format("round outside 1..{}", d.horizon));
      }
    }
    for (int t = 1; t <= d.horizon; ++t) {
      const auto v = s.at(t);
      const std::string loc = fmt::format("{} edge={} k={} t={}", what, e, p, t);
      if (!v) {
        rep.add("missing-value", loc, "no value for this round");
        // One report per assignment is enough.
        break;
      }
      if (is_prob) {
        if (!(*v > 0.0 && *v <= 1.0)) {
          rep.add("accept-prob-range", loc, fmt::format("p = {} outside (0,1]", *v));
        }
      } else if (!(*v >= 0.0) || !std::isfinite(*v)) {
        rep.add("negative-profit", loc, fmt::format("w = {} is not a finite non-negative value", *v));
      }
    }
  }
}

}  // namespace

ValidationReport validate(const Instance& inst) {
  ValidationReport rep;
  const InstanceData& d = inst.data();

  if (d.horizon < 1) rep.add("horizon", "horizon", fmt::format("T = {} must be >= 1", d.horizon));
  if (d.prices.empty()) rep.add("no-prices", "prices", "at least one price level is required");
  for (std::size_t k = 0; k < d.prices.size(); ++k) {
    if (!(d.prices[k] >= 0.0)) {
      rep.add("negative-price", fmt::format("prices[{}]", k), fmt::format("a = {}", d.prices[k]));
    }
  }
  for (std::size_t i = 0; i < d.offline.size(); ++i) {
    if (d.offline[i].capacity < 1) {
      rep.add("capacity", fmt::format("offline {}", d.offline[i].id),
              fmt::format("b = {} must be >= 1", d.offline[i].capacity));
    }
  }
  check_unique_ids(d.offline, "offline", rep);
  check_unique_ids(d.online, "online", rep);

  std::set<std::pair<std::size_t, std::size_t>> seen_edges;
  for (std::size_t e = 0; e < d.edges.size(); ++e) {
    const Edge& ed = d.edges[e];
    if (ed.offline >= d.offline.size() || ed.online >= d.online.size()) {
      rep.add("edge-ref", fmt::format("edges[{}]", e), "edge references an unknown agent");
    } else if (!seen_edges.insert({ed.offline, ed.online}).second) {
      rep.add("duplicate-edge", fmt::format("edges[{}]", e), "edge listed twice");
    }
  }

  if (d.horizon >= 1) {
    const std::size_t nj = d.online.size();
    if (d.arrival.size() != nj * static_cast<std::size_t>(d.horizon)) {
      rep.add("arrival-shape", "arrival",
              fmt::format("{} entries, expected |J|*T = {}", d.arrival.size(), nj * d.horizon));
    } else {
      for (int t = 1; t <= d.horizon; ++t) {
        double mass = 0.0;
        for (std::size_t j = 0; j < nj; ++j) {
          const double q = d.arrival[(t - 1) * nj + j];
          if (!(q >= 0.0 && q <= 1.0)) {
            rep.add("arrival-range", fmt::format("arrival j={} t={}", d.online[j].id, t),
                    fmt::format("q = {} outside [0,1]", q));
          }
          mass += q;
        }
        if (std::abs(mass - 1.0) > kProbabilityTolerance) {
          rep.add("arrival-mass", fmt::format("arrival t={}", t),
                  fmt::format("arrival probabilities sum to {:.12g}, expected 1", mass));
        }
      }
    }
    check_series(d, d.accept_prob, "accept_prob", true, rep);
    check_series(d, d.profit, "profit", false, rep);
  }
  return rep;
}

void require_valid(const Instance& inst) {
  const auto rep = validate(inst);
  if (rep.ok) return;
  std::ostringstream os;
  os << "invalid instance:";
  for (const auto& v : rep.violations) os << "\n  [" << v.rule << "] " << v.location << ": " << v.message;
  throw ContractError(os.str());
}

Instance expand_capacities(const Instance& inst) {
  require_valid(inst);
  if (inst.unit_capacity()) return inst;

  const InstanceData& src = inst.data();
  InstanceData out;
  out.online = src.online;
  out.prices = src.prices;
  out.horizon = src.horizon;
  out.arrival = src.arrival;
  out.original_offline = src.offline;

  std::vector<std::size_t> first_copy(src.offline.size());
  for (std::size_t i = 0; i < src.offline.size(); ++i) {
    first_copy[i] = out.offline.size();
    for (int c = 1; c <= src.offline[i].capacity; ++c) {
      const std::string& id = src.offline[i].id;
      out.offline.push_back({src.offline[i].capacity == 1 ? id : fmt::format("{}#{}", id, c), 1});
      out.origin.push_back(i);
    }
  }

  const std::size_t k = src.prices.size();
  for (std::size_t e = 0; e < src.edges.size(); ++e) {
    const Edge& ed = src.edges[e];
    for (int c = 0; c < src.offline[ed.offline].capacity; ++c) {
      out.edges.push_back({first_copy[ed.offline] + static_cast<std::size_t>(c), ed.online});
      for (std::size_t p = 0; p < k; ++p) {
        out.accept_prob.push_back(src.accept_prob[e * k + p]);
        out.profit.push_back(src.profit[e * k + p]);
      }
    }
  }
  return Instance(std::move(out));
}

}  // namespace gigmatch

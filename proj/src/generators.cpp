#include "gigmatch/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <fmt/format.h>

#include "gigmatch/error.hpp"

namespace gigmatch {

std::optional<ReferenceKind> parse_reference_kind(std::string_view name) {
  if (name == "att-cr") return ReferenceKind::att_cr;
  if (name == "att-var") return ReferenceKind::att_var;
  if (name == "samp-cr") return ReferenceKind::samp_cr;
  if (name == "samp-var") return ReferenceKind::samp_var;
  return std::nullopt;
}

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::att_cr: return "att-cr";
    case ReferenceKind::att_var: return "att-var";
    case ReferenceKind::samp_cr: return "samp-cr";
    case ReferenceKind::samp_var: return "samp-var";
  }
  return "?";
}

namespace {

// One offline agent, online types j1..j3, T=2, q_1 = (1,0,0), q_2 = (0,1-eps,eps).
Instance two_round_instance(double eps, double top_profit) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError(fmt::format("eps = {} must lie in (0,1)", eps));
  InstanceData d;
  d.offline = {{"i1", 1}};
  d.online = {{"j1"}, {"j2"}, {"j3"}};
  d.prices = {1.0};
  d.edges = {{0, 0}, {0, 1}, {0, 2}};
  d.horizon = 2;
  d.arrival = {1.0, 0.0, 0.0, 0.0, 1.0 - eps, eps};
  d.accept_prob.assign(3, RoundSeries(1.0));
  d.profit = {RoundSeries(1.0), RoundSeries(0.0), RoundSeries(top_profit)};
  return Instance(std::move(d));
}

Instance diagonal_instance(int m, double p) {
  if (m < 1) throw ParameterError(fmt::format("m = {} must be >= 1", m));
  InstanceData d;
  d.prices = {1.0};
  d.horizon = m;
  const auto n = static_cast<std::size_t>(m);
  d.arrival.assign(n * n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    d.offline.push_back({fmt::format("i{}", t + 1), 1});
    d.online.push_back({fmt::format("j{}", t + 1)});
    d.edges.push_back({t, t});
    d.arrival[t * n + t] = 1.0;
  }
  d.accept_prob.assign(n, RoundSeries(p));
  d.profit.assign(n, RoundSeries(1.0));
  return Instance(std::move(d));
}

}  // namespace

Instance build_reference_instance(ReferenceKind kind, const ReferenceParams& params) {
  switch (kind) {
    case ReferenceKind::att_cr:
      return two_round_instance(params.eps, 1.0 / params.eps);
    case ReferenceKind::samp_cr:
      return two_round_instance(params.eps, 1.0 / (params.eps * params.eps));
    case ReferenceKind::att_var:
      return diagonal_instance(params.m, 1.0);
    case ReferenceKind::samp_var: {
      const double g = params.gamma;
      if (!(g >= 0.0 && g <= 1.0)) throw ParameterError(fmt::format("gamma = {} must lie in [0,1]", g));
      return diagonal_instance(params.m, g == 0.0 ? 1.0 : std::min(1.0, 0.5 / g));
    }
  }
  throw ParameterError("unknown reference kind");
}

Instance from_prophet(const std::vector<double>& values,
                      const std::vector<std::vector<double>>& arrival) {
  if (values.empty()) throw ParameterError("at least one value is required");
  if (arrival.size() != values.size()) {
    throw ParameterError(fmt::format("arrival has {} rows, expected one per value ({})",
                                     arrival.size(), values.size()));
  }
  const std::size_t horizon = arrival.front().size();
  if (horizon == 0) throw ParameterError("arrival must cover at least one round");
  for (const auto& row : arrival) {
    if (row.size() != horizon) throw ParameterError("arrival rows differ in length");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError(fmt::format("value {} is negative", v));
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    double mass = 0.0;
    for (const auto& row : arrival) {
      if (!(row[t] >= 0.0 && row[t] <= 1.0)) throw ParameterError("arrival probability outside [0,1]");
      mass += row[t];
    }
    if (std::abs(mass - 1.0) > kProbabilityTolerance) {
      throw ParameterError(fmt::format("arrival at t={} sums to {}, expected 1", t + 1, mass));
    }
  }

  InstanceData d;
  d.offline = {{"i1", 1}};
  d.prices = {1.0};
  d.horizon = static_cast<int>(horizon);
  const std::size_t nj = values.size();
  d.arrival.assign(horizon * nj, 0.0);
  for (std::size_t j = 0; j < nj; ++j) {
    d.online.push_back({fmt::format("j{}", j + 1)});
    d.edges.push_back({0, j});
    d.accept_prob.emplace_back(1.0);
    d.profit.emplace_back(values[j]);
    for (std::size_t t = 0; t < horizon; ++t) d.arrival[t * nj + j] = arrival[j][t];
  }
  return Instance(std::move(d));
}

Instance random_instance(std::uint64_t seed, const RandomDims& dims) {
  if (dims.offline < 1 || dims.online < 1 || dims.prices < 1 || dims.horizon < 1) {
    throw ParameterError("random instance dimensions must be positive");
  }
  if (!(dims.density > 0.0 && dims.density <= 1.0)) throw ParameterError("density must lie in (0,1]");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  InstanceData d;
  const auto ni = static_cast<std::size_t>(dims.offline);
  const auto nj = static_cast<std::size_t>(dims.online);
  for (std::size_t i = 0; i < ni; ++i) d.offline.push_back({fmt::format("i{}", i + 1), 1});
  for (std::size_t j = 0; j < nj; ++j) d.online.push_back({fmt::format("j{}", j + 1)});
  for (int k = 0; k < dims.prices; ++k) d.prices.push_back(unit(rng));
  std::sort(d.prices.begin(), d.prices.end());
  d.horizon = dims.horizon;

  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < nj; ++j) {
      if (unit(rng) < dims.density) d.edges.push_back({i, j});
    }
  }

  // Some cells are zeroed so sparse arrival columns get exercised; the
  // largest cell of each round is kept.
  d.arrival.assign(nj * static_cast<std::size_t>(dims.horizon), 0.0);
  for (int t = 0; t < dims.horizon; ++t) {
    double* col = d.arrival.data() + static_cast<std::size_t>(t) * nj;
    for (std::size_t j = 0; j < nj; ++j) col[j] = 1.0 - unit(rng);
    const std::size_t keep = static_cast<std::size_t>(std::max_element(col, col + nj) - col);
    for (std::size_t j = 0; j < nj; ++j) {
      if (j != keep && unit(rng) < 0.25) col[j] = 0.0;
    }
    double mass = 0.0;
    for (std::size_t j = 0; j < nj; ++j) mass += col[j];
    for (std::size_t j = 0; j < nj; ++j) col[j] /= mass;
  }

  const std::size_t na = d.edges.size() * static_cast<std::size_t>(dims.prices);
  for (std::size_t a = 0; a < na; ++a) {
    RoundSeries p;
    RoundSeries w;
    if (unit(rng) < 0.5) {
      p.set_constant(1.0 - unit(rng));
      w.set_constant(unit(rng));
    } else {
      for (int t = 1; t <= dims.horizon; ++t) {
        p.set(t, 1.0 - unit(rng));
        w.set(t, unit(rng));
      }
    }
    d.accept_prob.push_back(std::move(p));
    d.profit.push_back(std::move(w));
  }
  return Instance(std::move(d));
}

}  // namespace gigmatch

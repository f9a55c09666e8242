#include "gigmatch/instance_json.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "gigmatch/error.hpp"

namespace gigmatch {

using nlohmann::json;

namespace {

const json& require_key(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(fmt::format("missing key '{}'", key));
  return *it;
}

template <typename T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", where, e.what()));
  }
}

void read_series(const json& entries, const char* key, std::size_t num_edges, std::size_t num_prices,
                 std::vector<RoundSeries>& out, std::vector<Violation>& issues) {
  if (!entries.is_array()) throw ParseError(fmt::format("'{}' must be an array", key));
  out.assign(num_edges * num_prices, RoundSeries{});
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const json& en = entries[n];
    const std::string where = fmt::format("{}[{}]", key, n);
    if (!en.is_object()) throw ParseError(where + ": entry must be an object");
    const auto e = get_as<long long>(require_key(en, "edge"), where + ".edge");
    const auto k = get_as<long long>(require_key(en, "price_index"), where + ".price_index");
    const auto value = get_as<double>(require_key(en, "value"), where + ".value");
    if (e < 0 || static_cast<std::size_t>(e) >= num_edges) {
      issues.push_back({"edge-ref", where, fmt::format("edge index {} out of range", e)});
      continue;
    }
    if (k < 0 || static_cast<std::size_t>(k) >= num_prices) {
      issues.push_back({"price-index", where, fmt::format("price index {} out of range", k)});
      continue;
    }
    RoundSeries& s = out[static_cast<std::size_t>(e) * num_prices + static_cast<std::size_t>(k)];
    if (auto t = en.find("t"); t != en.end()) {
      s.set(get_as<int>(*t, where + ".t"), value);
    } else {
      s.set_constant(value);
    }
  }
}

json series_to_json(const Instance& inst, const std::vector<RoundSeries>& series) {
  json out = json::array();
  const std::size_t k = inst.num_prices();
  for (std::size_t a = 0; a < series.size(); ++a) {
    const json base = {{"edge", a / k}, {"price_index", a % k}};
    if (series[a].constant()) {
      json en = base;
      en["value"] = *series[a].constant();
      out.push_back(std::move(en));
    }
    for (const auto& [t, v] : series[a].overrides()) {
      json en = base;
      en["t"] = t;
      en["value"] = v;
      out.push_back(std::move(en));
    }
  }
  return out;
}

}  // namespace

LoadResult instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("instance document must be a JSON object");
  LoadResult res;
  InstanceData d;

  std::map<std::string, std::size_t> offline_index;
  std::map<std::string, std::size_t> online_index;
  const json& offline = require_key(doc, "offline");
  if (!offline.is_array()) throw ParseError("'offline' must be an array");
  for (std::size_t n = 0; n < offline.size(); ++n) {
    const std::string where = fmt::format("offline[{}]", n);
    OfflineType o;
    o.id = get_as<std::string>(require_key(offline[n], "id"), where + ".id");
    if (auto c = offline[n].find("capacity"); c != offline[n].end()) {
      o.capacity = get_as<int>(*c, where + ".capacity");
    }
    offline_index.emplace(o.id, n);
    d.offline.push_back(std::move(o));
  }
  const json& online = require_key(doc, "online");
  if (!online.is_array()) throw ParseError("'online' must be an array");
  for (std::size_t n = 0; n < online.size(); ++n) {
    OnlineType o{get_as<std::string>(require_key(online[n], "id"), fmt::format("online[{}].id", n))};
    online_index.emplace(o.id, n);
    d.online.push_back(std::move(o));
  }

  d.prices = get_as<std::vector<double>>(require_key(doc, "prices"), "prices");
  d.horizon = get_as<int>(require_key(doc, "horizon"), "horizon");

  const json& edges = require_key(doc, "edges");
  if (!edges.is_array()) throw ParseError("'edges' must be an array");
  for (std::size_t n = 0; n < edges.size(); ++n) {
    const auto pair = get_as<std::vector<std::string>>(edges[n], fmt::format("edges[{}]", n));
    if (pair.size() != 2) throw ParseError(fmt::format("edges[{}] must be [offline, online]", n));
    Edge e;
    if (auto it = offline_index.find(pair[0]); it != offline_index.end()) e.offline = it->second;
    if (auto it = online_index.find(pair[1]); it != online_index.end()) e.online = it->second;
    d.edges.push_back(e);
  }

  const json& arrival = require_key(doc, "arrival");
  if (!arrival.is_array()) throw ParseError("'arrival' must be an array");
  const std::size_t nj = d.online.size();
  const std::size_t horizon = d.horizon > 0 ? static_cast<std::size_t>(d.horizon) : 0;
  const bool sparse = !arrival.empty() && arrival.front().is_object();
  if (sparse) {
    d.arrival.assign(nj * horizon, 0.0);
    for (std::size_t n = 0; n < arrival.size(); ++n) {
      const json& en = arrival[n];
      const std::string where = fmt::format("arrival[{}]", n);
      if (!en.is_object()) throw ParseError(where + ": mixed dense and sparse arrival entries");
      const auto id = get_as<std::string>(require_key(en, "online"), where + ".online");
      const auto t = get_as<int>(require_key(en, "t"), where + ".t");
      const auto value = get_as<double>(require_key(en, "value"), where + ".value");
      auto it = online_index.find(id);
      if (it == online_index.end() || t < 1 || static_cast<std::size_t>(t) > horizon) {
        res.issues.push_back({"arrival-shape", where, fmt::format("no cell for online '{}' at t={}", id, t)});
        continue;
      }
      d.arrival[static_cast<std::size_t>(t - 1) * nj + it->second] = value;
    }
  } else {
    const auto rows = get_as<std::vector<std::vector<double>>>(arrival, "arrival");
    bool shaped = rows.size() == nj;
    for (const auto& row : rows) shaped = shaped && row.size() == horizon;
    if (shaped) {
      d.arrival.assign(nj * horizon, 0.0);
      for (std::size_t j = 0; j < nj; ++j) {
        for (std::size_t t = 0; t < horizon; ++t) d.arrival[t * nj + j] = rows[j][t];
      }
    }
  }

  read_series(require_key(doc, "accept_prob"), "accept_prob", d.edges.size(), d.prices.size(),
              d.accept_prob, res.issues);
  read_series(require_key(doc, "profit"), "profit", d.edges.size(), d.prices.size(), d.profit,
              res.issues);

  res.instance = Instance(std::move(d));
  return res;
}

LoadResult load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return instance_from_json(doc);
}

json instance_to_json(const Instance& inst) {
  json doc;
  json offline = json::array();
  for (std::size_t i = 0; i < inst.num_offline(); ++i) {
    offline.push_back({{"id", inst.offline(i).id}, {"capacity", inst.offline(i).capacity}});
  }
  json online = json::array();
  for (std::size_t j = 0; j < inst.num_online(); ++j) online.push_back({{"id", inst.online(j).id}});
  json edges = json::array();
  for (std::size_t e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edge(e);
    edges.push_back({inst.offline(ed.offline).id, inst.online(ed.online).id});
  }
  json arrival = json::array();
  for (std::size_t j = 0; j < inst.num_online(); ++j) {
    json row = json::array();
    for (int t = 1; t <= inst.horizon(); ++t) row.push_back(inst.arrival(j, t));
    arrival.push_back(std::move(row));
  }
  doc["offline"] = std::move(offline);
  doc["online"] = std::move(online);
  doc["prices"] = inst.data().prices;
  doc["edges"] = std::move(edges);
  doc["horizon"] = inst.horizon();
  doc["arrival"] = std::move(arrival);
  doc["accept_prob"] = series_to_json(inst, inst.data().accept_prob);
  doc["profit"] = series_to_json(inst, inst.data().profit);
  return doc;
}

std::string dump_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(fmt::format("cannot write '{}'", path.string()));
  out << dump_instance(inst);
}

}  // namespace gigmatch

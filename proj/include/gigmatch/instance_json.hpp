#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gigmatch/instance.hpp"

namespace gigmatch {

// Instance documents:
//   {
//     "offline":  [{"id": "i1", "capacity": 1}, ...],
//     "online":   [{"id": "j1"}, ...],
//     "prices":   [a_1, ..., a_K],
//     "edges":    [["i1", "j1"], ...],
//     "horizon":  T,
//     "arrival":  dense [[q_{j,1}, ..., q_{j,T}] per online type]
//                 or sparse [{"online": "j1", "t": 1, "value": q}, ...],
//     "accept_prob": [{"edge": e, "price_index": k, "value": p, "t": 3?}, ...],
//     "profit":      same shape as accept_prob
//   }
// Edge and price indices are 0-based, rounds 1-based. An entry without "t"
// applies to every round; entries with "t" override it for that round.

// References that cannot be resolved (unknown ids, indices out of range) are
// returned as violations rather than thrown, so validate() can report them
// next to the ordinary invariant checks.
struct LoadResult {
  Instance instance;
  std::vector<Violation> issues;
};

// Throws ParseError on structurally malformed documents.
LoadResult instance_from_json(const nlohmann::json& doc);
LoadResult load_instance(const std::filesystem::path& path);

// Canonical form: sorted keys, dense arrival, one constant entry per
// assignment followed by its per-round overrides in round order.
nlohmann::json instance_to_json(const Instance& inst);
std::string dump_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::filesystem::path& path);

}  // namespace gigmatch

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gigmatch/instance.hpp"

namespace gigmatch {

// The four tightness instances:
//   att-cr   one offline agent, three online types, T=2, w = (1, 0, 1/eps)
//   samp-cr  same with w_3 = 1/eps^2
//   att-var  m disjoint edges, T=m, type t arrives surely at round t, p=w=1
//   samp-var att-var with p = min(1, (1/2)/gamma) (p=1 at gamma=0)
enum class ReferenceKind { att_cr, att_var, samp_cr, samp_var };

std::optional<ReferenceKind> parse_reference_kind(std::string_view name);
std::string_view to_string(ReferenceKind kind);

struct ReferenceParams {
  double eps = 0.1;
  int m = 3;
  double gamma = 0.5;
};

Instance build_reference_instance(ReferenceKind kind, const ReferenceParams& params);

// Single-item prophet inequality as an instance: one unit-capacity offline
// agent linked to every online type, p = 1, w_{(.,j),t} = values[j].
// arrival is indexed [j][t-1].
Instance from_prophet(const std::vector<double>& values,
                      const std::vector<std::vector<double>>& arrival);

struct RandomDims {
  int offline = 3;
  int online = 3;
  int prices = 2;
  int horizon = 4;
  double density = 0.7;
};

// Deterministic for a fixed seed; always passes validate().
Instance random_instance(std::uint64_t seed, const RandomDims& dims);

}  // namespace gigmatch

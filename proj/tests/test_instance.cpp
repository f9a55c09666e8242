#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gigmatch/error.hpp"
#include "gigmatch/generators.hpp"
#include "gigmatch/instance.hpp"
#include "gigmatch/instance_json.hpp"

using namespace gigmatch;
using nlohmann::json;

namespace {

// Two agents, two online types, K = 2, T = 2.
InstanceData small_data() {
  InstanceData d;
  d.offline = {{"a", 1}, {"b", 1}};
  d.online = {{"x"}, {"y"}};
  d.prices = {0.5, 1.0};
  d.edges = {{0, 0}, {1, 0}, {1, 1}};
  d.horizon = 2;
  d.arrival = {0.6, 0.4, 1.0, 0.0};
  d.accept_prob.assign(6, RoundSeries(0.5));
  d.profit.assign(6, RoundSeries(1.0));
  return d;
}

json small_doc() {
  return json::parse(R"({
    "offline": [{"id": "a", "capacity": 1}, {"id": "b"}],
    "online": [{"id": "x"}, {"id": "y"}],
    "prices": [0.5, 1.0],
    "edges": [["a", "x"], ["b", "x"], ["b", "y"]],
    "horizon": 2,
    "arrival": [[0.6, 1.0], [0.4, 0.0]],
    "accept_prob": [
      {"edge": 0, "price_index": 0, "value": 0.5}, {"edge": 0, "price_index": 1, "value": 0.5},
      {"edge": 1, "price_index": 0, "value": 0.5}, {"edge": 1, "price_index": 1, "value": 0.5},
      {"edge": 2, "price_index": 0, "value": 0.5}, {"edge": 2, "price_index": 1, "value": 0.5}],
    "profit": [
      {"edge": 0, "price_index": 0, "value": 1.0}, {"edge": 0, "price_index": 1, "value": 1.0},
      {"edge": 1, "price_index": 0, "value": 1.0}, {"edge": 1, "price_index": 1, "value": 1.0},
      {"edge": 2, "price_index": 0, "value": 1.0}, {"edge": 2, "price_index": 1, "value": 1.0}]
  })");
}

}  // namespace

TEST(Instance, AssignmentIndexing) {
  const Instance inst(small_data());
  EXPECT_EQ(inst.num_assignments(), 6u);
  EXPECT_EQ(inst.edge_of(5), 2u);
  EXPECT_EQ(inst.price_of(5), 1u);
  EXPECT_EQ(inst.offline_of(5), 1u);
  EXPECT_EQ(inst.online_of(5), 1u);
  EXPECT_EQ(inst.assignments_of_online(0), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(inst.assignments_of_online(1), (std::vector<std::size_t>{4, 5}));
  EXPECT_EQ(inst.assignments_of_offline(1), (std::vector<std::size_t>{2, 3, 4, 5}));
  EXPECT_DOUBLE_EQ(inst.arrival(0, 1), 0.6);
  EXPECT_DOUBLE_EQ(inst.arrival(1, 2), 0.0);
  EXPECT_TRUE(inst.unit_capacity());
  EXPECT_EQ(inst.total_capacity(), 2);
}

TEST(Instance, RoundSeriesOverridesConstant) {
  InstanceData d = small_data();
  d.profit[0].set(2, 7.0);
  const Instance inst(std::move(d));
  EXPECT_DOUBLE_EQ(inst.profit(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(inst.profit(0, 2), 7.0);
}

TEST(Instance, MissingValueThrowsOnAccess) {
  InstanceData d = small_data();
  d.profit[3] = RoundSeries{};
  d.profit[3].set(1, 1.0);
  const Instance inst(std::move(d));
  EXPECT_DOUBLE_EQ(inst.profit(3, 1), 1.0);
  EXPECT_THROW((void)inst.profit(3, 2), ContractError);
  EXPECT_TRUE(validate(inst).has("missing-value"));
}

TEST(Validate, ReferenceInstancesAreValid) {
  for (auto kind : {ReferenceKind::att_cr, ReferenceKind::samp_cr, ReferenceKind::att_var, ReferenceKind::samp_var}) {
    const Instance inst = build_reference_instance(kind, {0.01, 5, 0.8});
    const auto rep = validate(inst);
    EXPECT_TRUE(rep.ok) << to_string(kind) << ": " << (rep.violations.empty() ? "" : rep.violations[0].message);
  }
}

struct RuleCase {
  const char* rule;
  void (*mutate)(InstanceData&);
};

class ValidateRule : public ::testing::TestWithParam<RuleCase> {};

TEST_P(ValidateRule, Detected) {
  InstanceData d = small_data();
  GetParam().mutate(d);
  const Instance inst(std::move(d));
  const auto rep = validate(inst);
  EXPECT_FALSE(rep.ok);
  EXPECT_TRUE(rep.has(GetParam().rule)) << GetParam().rule;
  EXPECT_THROW(require_valid(inst), ContractError);
}

INSTANTIATE_TEST_SUITE_P(
    Rules, ValidateRule,
    ::testing::Values(
        RuleCase{"horizon", [](InstanceData& d) { d.horizon = 0; d.arrival.clear(); }},
        RuleCase{"no-prices", [](InstanceData& d) { d.prices.clear(); }},
        RuleCase{"negative-price", [](InstanceData& d) { d.prices[0] = -1.0; }},
        RuleCase{"capacity", [](InstanceData& d) { d.offline[0].capacity = 0; }},
        RuleCase{"duplicate-id", [](InstanceData& d) { d.online[1].id = "x"; }},
        RuleCase{"edge-ref", [](InstanceData& d) { d.edges[0].online = 9; }},
        RuleCase{"duplicate-edge", [](InstanceData& d) { d.edges[2] = d.edges[1]; }},
        RuleCase{"arrival-shape", [](InstanceData& d) { d.arrival.pop_back(); }},
        RuleCase{"arrival-range", [](InstanceData& d) { d.arrival[0] = 1.2; d.arrival[1] = -0.2; }},
        RuleCase{"arrival-mass", [](InstanceData& d) { d.arrival[0] = 0.5; }},
        RuleCase{"series-shape", [](InstanceData& d) { d.profit.pop_back(); }},
        RuleCase{"missing-value", [](InstanceData& d) { d.accept_prob[1] = RoundSeries{}; }},
        RuleCase{"round-index", [](InstanceData& d) { d.profit[0].set(3, 1.0); }},
        RuleCase{"accept-prob-range", [](InstanceData& d) { d.accept_prob[2] = RoundSeries(1.5); }},
        RuleCase{"negative-profit", [](InstanceData& d) { d.profit[4].set(1, -0.1); }}));

TEST(Validate, ArrivalMassWithinToleranceIsAccepted) {
  InstanceData d = small_data();
  d.arrival[0] += 0.5e-9;
  EXPECT_TRUE(validate(Instance(std::move(d))).ok);
}

TEST(Validate, ZeroEdgeInstanceIsValid) {
  InstanceData d = small_data();
  d.edges.clear();
  d.accept_prob.clear();
  d.profit.clear();
  EXPECT_TRUE(validate(Instance(std::move(d))).ok);
}

TEST(Expand, CapacityCopies) {
  InstanceData d = small_data();
  d.offline[1].capacity = 3;
  d.profit[2].set(2, 4.0);
  const Instance base(std::move(d));
  const Instance inst = expand_capacities(base);

  ASSERT_EQ(inst.num_offline(), 4u);
  EXPECT_EQ(inst.offline(0).id, "a");
  EXPECT_EQ(inst.offline(1).id, "b#1");
  EXPECT_EQ(inst.offline(3).id, "b#3");
  EXPECT_TRUE(inst.unit_capacity());
  EXPECT_EQ(inst.total_capacity(), base.total_capacity());
  EXPECT_EQ(inst.num_original_offline(), 2u);
  EXPECT_EQ(inst.origin_of(0), 0u);
  EXPECT_EQ(inst.origin_of(2), 1u);
  EXPECT_EQ(inst.original_offline(1).id, "b");
  // Edge 0 stays; edges 1 and 2 of "b" become three edges each.
  ASSERT_EQ(inst.num_edges(), 7u);
  for (std::size_t e = 1; e < 7; ++e) EXPECT_EQ(inst.origin_of(inst.edge(e).offline), 1u);
  // Series follow the edges: new edge 1..3 are copies of old edge 1.
  EXPECT_DOUBLE_EQ(inst.profit(1 * 2 + 0, 2), 4.0);
  EXPECT_DOUBLE_EQ(inst.profit(3 * 2 + 0, 2), 4.0);
  EXPECT_DOUBLE_EQ(inst.profit(4 * 2 + 0, 2), 1.0);
  EXPECT_TRUE(validate(inst).ok);
}

TEST(Expand, UnitCapacityUnchanged) {
  const Instance inst(small_data());
  EXPECT_EQ(expand_capacities(inst), inst);
  EXPECT_EQ(inst.origin_of(1), 1u);
}

TEST(Json, LoadsDenseDocument) {
  const LoadResult r = instance_from_json(small_doc());
  EXPECT_TRUE(r.issues.empty());
  EXPECT_EQ(r.instance, Instance(small_data()));
}

TEST(Json, SparseArrivalMatchesDense) {
  json doc = small_doc();
  doc["arrival"] = json::parse(R"([
    {"online": "x", "t": 1, "value": 0.6}, {"online": "y", "t": 1, "value": 0.4},
    {"online": "x", "t": 2, "value": 1.0}])");
  const LoadResult r = instance_from_json(doc);
  EXPECT_TRUE(r.issues.empty());
  EXPECT_EQ(r.instance, Instance(small_data()));
}

TEST(Json, PerRoundOverride) {
  json doc = small_doc();
  doc["profit"].push_back({{"edge", 2}, {"price_index", 1}, {"t", 2}, {"value", 3.0}});
  const Instance inst = instance_from_json(doc).instance;
  EXPECT_DOUBLE_EQ(inst.profit(5, 1), 1.0);
  EXPECT_DOUBLE_EQ(inst.profit(5, 2), 3.0);
}

TEST(Json, UnresolvedReferencesBecomeViolations) {
  json doc = small_doc();
  doc["edges"][0] = {"a", "nobody"};
  doc["profit"].push_back({{"edge", 7}, {"price_index", 0}, {"value", 1.0}});
  doc["accept_prob"].push_back({{"edge", 0}, {"price_index", 5}, {"value", 1.0}});
  const LoadResult r = instance_from_json(doc);
  ASSERT_EQ(r.issues.size(), 2u);
  EXPECT_EQ(r.issues[0].rule, "price-index");
  EXPECT_EQ(r.issues[1].rule, "edge-ref");
  EXPECT_TRUE(validate(r.instance).has("edge-ref"));
}

TEST(Json, MalformedDocumentsThrow) {
  EXPECT_THROW(instance_from_json(json::array()), ParseError);
  json doc = small_doc();
  doc.erase("horizon");
  EXPECT_THROW(instance_from_json(doc), ParseError);
  doc = small_doc();
  doc["prices"] = "cheap";
  EXPECT_THROW(instance_from_json(doc), ParseError);
  EXPECT_THROW(load_instance("/nonexistent/instance.json"), ParseError);

  const auto path = std::filesystem::temp_directory_path() / "gigmatch_bad.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_instance(path), ParseError);
  std::filesystem::remove(path);
}

TEST(Json, RoundTripIsByteIdentical) {
  std::vector<Instance> cases = {
      Instance(small_data()),
      build_reference_instance(ReferenceKind::samp_cr, {0.01, 3, 0.5}),
      build_reference_instance(ReferenceKind::samp_var, {0.1, 4, 0.8}),
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) cases.push_back(random_instance(seed, {4, 3, 2, 4, 0.6}));
  for (const Instance& inst : cases) {
    const std::string text = dump_instance(inst);
    const LoadResult back = instance_from_json(json::parse(text));
    EXPECT_TRUE(back.issues.empty());
    EXPECT_EQ(back.instance, inst);
    EXPECT_EQ(dump_instance(back.instance), text);
  }
}

TEST(Json, SaveAndLoadFile) {
  const auto path = std::filesystem::temp_directory_path() / "gigmatch_roundtrip.json";
  const Instance inst = random_instance(11, {});
  save_instance(inst, path);
  EXPECT_EQ(load_instance(path).instance, inst);
  std::filesystem::remove(path);
}

TEST(Generators, ReferenceShapes) {
  const Instance cr = build_reference_instance(ReferenceKind::att_cr, {0.1, 3, 0.5});
  EXPECT_EQ(cr.num_offline(), 1u);
  EXPECT_EQ(cr.num_online(), 3u);
  EXPECT_EQ(cr.horizon(), 2);
  EXPECT_DOUBLE_EQ(cr.arrival(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(cr.arrival(1, 2), 0.9);
  EXPECT_DOUBLE_EQ(cr.arrival(2, 2), 0.1);
  EXPECT_DOUBLE_EQ(cr.profit(2, 1), 10.0);

  const Instance scr = build_reference_instance(ReferenceKind::samp_cr, {0.1, 3, 0.5});
  EXPECT_NEAR(scr.profit(2, 2), 100.0, 1e-9);

  const Instance sv = build_reference_instance(ReferenceKind::samp_var, {0.1, 40, 0.8});
  EXPECT_EQ(sv.num_offline(), 40u);
  EXPECT_EQ(sv.horizon(), 40);
  EXPECT_DOUBLE_EQ(sv.accept_prob(0, 1), 0.625);
  EXPECT_DOUBLE_EQ(build_reference_instance(ReferenceKind::samp_var, {0.1, 2, 0.3}).accept_prob(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(build_reference_instance(ReferenceKind::samp_var, {0.1, 2, 0.0}).accept_prob(0, 1), 1.0);
}

TEST(Generators, ParameterErrors) {
  EXPECT_THROW(build_reference_instance(ReferenceKind::att_cr, {0.0, 3, 0.5}), ParameterError);
  EXPECT_THROW(build_reference_instance(ReferenceKind::att_cr, {1.0, 3, 0.5}), ParameterError);
  EXPECT_THROW(build_reference_instance(ReferenceKind::att_var, {0.1, 0, 0.5}), ParameterError);
  EXPECT_THROW(build_reference_instance(ReferenceKind::samp_var, {0.1, 3, 1.5}), ParameterError);
  EXPECT_FALSE(parse_reference_kind("fig1").has_value());
  EXPECT_EQ(parse_reference_kind("samp-var"), ReferenceKind::samp_var);
}

TEST(Generators, Prophet) {
  const Instance inst = from_prophet({1.0, 3.0}, {{0.5, 1.0}, {0.5, 0.0}});
  EXPECT_TRUE(validate(inst).ok);
  EXPECT_EQ(inst.num_edges(), 2u);
  EXPECT_DOUBLE_EQ(inst.profit(1, 2), 3.0);
  EXPECT_DOUBLE_EQ(inst.arrival(1, 1), 0.5);
  EXPECT_THROW(from_prophet({1.0}, {{0.5}}), ParameterError);
  EXPECT_THROW(from_prophet({1.0, 2.0}, {{1.0}}), ParameterError);
}

TEST(Generators, RandomInstancesAreValidAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const RandomDims dims{1 + static_cast<int>(seed % 6), 1 + static_cast<int>(seed % 4), 1 + static_cast<int>(seed % 2),
                          1 + static_cast<int>(seed % 5), 0.6};
    const Instance a = random_instance(seed, dims);
    EXPECT_TRUE(validate(a).ok) << "seed " << seed;
    EXPECT_EQ(a, random_instance(seed, dims));
  }
  EXPECT_NE(random_instance(1, {}), random_instance(2, {}));
}

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gigmatch/cli.hpp"
#include "gigmatch/generators.hpp"
#include "gigmatch/instance_json.hpp"

using namespace gigmatch;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Invocation r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

// Header and rows of a CSV document as column-name maps.
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    EXPECT_EQ(cells.size(), header.size()) << line;
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < std::min(cells.size(), header.size()); ++c) row[header[c]] = cells[c];
    rows.push_back(std::move(row));
  }
  return rows;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("gigmatch_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

Instance single_edge() {
  InstanceData d;
  d.offline = {{"i", 1}};
  d.online = {{"j"}};
  d.prices = {1.0};
  d.edges = {{0, 0}};
  d.horizon = 1;
  d.arrival = {1.0};
  d.accept_prob = {RoundSeries(1.0)};
  d.profit = {RoundSeries(2.0)};
  return Instance(std::move(d));
}

}  // namespace

TEST(CliValidate, ExitCodes) {
  TempDir dir;
  save_instance(single_edge(), dir / "ok.json");
  Invocation r = invoke({"validate", (dir / "ok.json").string()});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out.rfind("ok:", 0), 0u);

  auto doc = instance_to_json(build_reference_instance(ReferenceKind::att_cr, {0.1, 3, 0.5}));
  doc["arrival"][1][1] = 0.5;
  std::ofstream(dir / "mass.json") << doc.dump();
  r = invoke({"validate", (dir / "mass.json").string()});
  EXPECT_EQ(r.code, cli::kExitFailed);
  EXPECT_NE(r.out.find("arrival-mass"), std::string::npos);

  std::ofstream(dir / "broken.json") << "{\"offline\": [";
  EXPECT_EQ(invoke({"validate", (dir / "broken.json").string()}).code, cli::kExitParse);
  EXPECT_EQ(invoke({"validate", (dir / "missing.json").string()}).code, cli::kExitParse);
}

TEST(CliLp, Objectives) {
  EXPECT_EQ(invoke({"lp", "--ref", "att-cr", "--eps", "0.1"}).out, "1.900000000\n");
  EXPECT_EQ(invoke({"lp", "--ref", "att-var", "--m", "3"}).out, "3.000000000\n");
  TempDir dir;
  save_instance(single_edge(), dir / "edge.json");
  const Invocation r = invoke({"lp", (dir / "edge.json").string()});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out, "2.000000000\n");
  EXPECT_EQ(invoke({"lp", "--instance", (dir / "edge.json").string()}).out, "2.000000000\n");
}

TEST(CliLp, Dump) {
  Invocation r = invoke({"lp", "--ref", "att-cr", "--dump"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out.rfind("1.900000000\n", 0), 0u);
  EXPECT_NE(r.out.find("Subject To"), std::string::npos);

  TempDir dir;
  r = invoke({"lp", "--ref", "att-cr", "--dump", "--out", (dir / "p.lp").string()});
  EXPECT_EQ(r.out, "1.900000000\n");
  std::ifstream in(dir / "p.lp");
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_NE(text.str().find("Maximize"), std::string::npos);
}

TEST(CliLp, SourceErrors) {
  EXPECT_EQ(invoke({"lp"}).code, cli::kExitParse);
  EXPECT_EQ(invoke({"lp", "--ref", "fig9"}).code, cli::kExitParse);
  EXPECT_EQ(invoke({"lp", "x.json", "--ref", "att-cr"}).code, cli::kExitParse);
  EXPECT_EQ(invoke({"lp", "--ref", "att-cr", "--eps", "2"}).code, cli::kExitFailed);
}

TEST(CliRun, CsvMatchesExactValue) {
  const Invocation r = invoke({"run", "--ref", "att-cr", "--eps", "0.1", "--policy", "att", "--gamma", "0.5", "--n", "20000"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 1u);
  const auto& row = rows[0];
  EXPECT_EQ(row.at("instance"), "att-cr:eps=0.1");
  EXPECT_EQ(row.at("n"), "20000");
  EXPECT_EQ(row.at("seed"), "42");
  EXPECT_NEAR(std::stod(row.at("opt_lp")), 1.9, 1e-9);
  EXPECT_NEAR(std::stod(row.at("exact_profit")), 0.95, 1e-12);
  EXPECT_NEAR(std::stod(row.at("profit_bound")), 0.95, 1e-12);
  EXPECT_LE(std::abs(std::stod(row.at("mean_profit")) - 0.95), 4.0 * std::stod(row.at("se_profit")));
  EXPECT_DOUBLE_EQ(std::stod(row.at("var_bound")), 0.25);
}

TEST(CliRun, SampRatioOnTwoRoundInstance) {
  const Invocation r = invoke({"run", "--ref", "samp-cr", "--eps", "0.01", "--policy", "samp", "--gamma", "0.5", "--n", "20000"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto row = parse_csv(r.out).at(0);
  const double opt = std::stod(row.at("opt_lp"));
  EXPECT_NEAR(std::stod(row.at("exact_profit")) / opt, 0.2549, 1e-4);
  EXPECT_LE(std::abs(std::stod(row.at("ratio")) - 25.745 / 100.99), 4.0 * std::stod(row.at("se_profit")) / opt);
}

TEST(CliRun, GammaZeroAndRangeErrors) {
  const Invocation r = invoke({"run", "--ref", "att-var", "--m", "5", "--gamma", "0", "--n", "100"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const auto row = parse_csv(r.out).at(0);
  EXPECT_EQ(row.at("mean_profit"), "0");
  EXPECT_EQ(row.at("var_matches"), "0");
  EXPECT_EQ(invoke({"run", "--ref", "att-cr", "--policy", "att", "--gamma", "0.7"}).code, cli::kExitFailed);
  EXPECT_EQ(invoke({"run", "--ref", "att-cr", "--policy", "greedy"}).code, cli::kExitParse);
  EXPECT_EQ(invoke({"run", "--ref", "att-cr", "--format", "xml"}).code, cli::kExitParse);
}

TEST(CliRun, SingleReplicationLeavesVarianceEmpty) {
  const auto row = parse_csv(invoke({"run", "--ref", "att-cr", "--n", "1"}).out).at(0);
  EXPECT_EQ(row.at("var_matches"), "");
  EXPECT_EQ(row.at("se_profit"), "");
}

TEST(CliRun, JsonOutputAndEvents) {
  TempDir dir;
  const Invocation r = invoke({"run", "--ref", "samp-var", "--m", "4", "--policy", "samp", "--gamma", "0.8", "--n", "500",
                               "--format", "json", "--out", (dir / "run.json").string(), "--events",
                               (dir / "events.csv").string(), "--events-max", "3"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(dir / "run.json");
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["instance"], "samp-var:m=4:gamma=0.8");
  EXPECT_EQ(doc["policy"], "samp");
  EXPECT_EQ(doc["n"], 500);
  EXPECT_EQ(doc["seed"], 42);
  EXPECT_NEAR(doc["exact"]["mean_matches"].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(doc["exact"]["var_matches"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(doc["reference"]["var_bound"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(doc["summary"]["mean_matches_by_type"].size(), 4u);
  EXPECT_TRUE(doc["summary"]["var_matches"].is_number());

  std::ifstream ev(dir / "events.csv");
  std::string line;
  int lines = 0;
  while (std::getline(ev, line)) ++lines;
  EXPECT_EQ(lines, 1 + 3 * 4);
}

TEST(CliRun, JsonNullsForOneReplication) {
  const Invocation r = invoke({"run", "--ref", "att-cr", "--n", "1", "--format", "json"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_TRUE(doc["summary"]["var_matches"].is_null());
}

TEST(CliRun, SizeBudgetExitCode) {
  TempDir dir;
  save_instance(random_instance(1, {10, 10, 10, 10, 1.0}), dir / "big.json");
  const Invocation r = invoke({"run", (dir / "big.json").string(), "--n", "10"});
  EXPECT_EQ(r.code, cli::kExitSize) << r.err;
}

TEST(CliRun, InvalidInstanceFile) {
  TempDir dir;
  auto doc = instance_to_json(single_edge());
  doc["profit"][0]["value"] = -1.0;
  std::ofstream(dir / "neg.json") << doc.dump();
  const Invocation r = invoke({"run", (dir / "neg.json").string(), "--n", "10"});
  EXPECT_EQ(r.code, cli::kExitFailed);
  EXPECT_NE(r.err.find("negative-profit"), std::string::npos);
}

TEST(CliSweep, AttVarianceGrows) {
  const Invocation r = invoke({"sweep", "--ref", "att-var", "--m", "50", "--policy", "att", "--gammas", "0.1,0.2,0.3,0.4,0.5",
                               "--n", "20000"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 5u);
  double previous = -1.0;
  for (const auto& row : rows) {
    const double g = std::stod(row.at("gamma"));
    const double v = std::stod(row.at("var_matches"));
    EXPECT_GT(v, previous);
    EXPECT_LE(std::abs(v - g * (1 - g) * 50), 4.0 * std::stod(row.at("se_var_matches")));
    EXPECT_NEAR(std::stod(row.at("var_bound")), g * (1 - g) * 50, 1e-9);
    EXPECT_NEAR(std::stod(row.at("cr_bound")), g, 1e-15);
    previous = v;
  }
}

TEST(CliSweep, SampVarianceFlat) {
  const Invocation r = invoke({"sweep", "--ref", "samp-var", "--m", "40", "--policy", "samp", "--gammas", "0.5, 0.7, 0.9",
                               "--n", "20000"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const auto& row : parse_csv(r.out)) {
    EXPECT_LE(std::abs(std::stod(row.at("var_matches")) - 10.0), 4.0 * std::stod(row.at("se_var_matches")));
  }
}

TEST(CliSweep, GridErrors) {
  EXPECT_EQ(invoke({"sweep", "--ref", "att-cr"}).code, cli::kExitFailed);
  EXPECT_EQ(invoke({"sweep", "--ref", "att-cr", "--gammas", ""}).code, cli::kExitFailed);
  EXPECT_EQ(invoke({"sweep", "--ref", "att-cr", "--gammas", "0.1,0.9"}).code, cli::kExitFailed);
  EXPECT_EQ(invoke({"sweep", "--ref", "att-cr", "--gammas", "0.1,abc"}).code, cli::kExitParse);
}

TEST(CliReproduce, SingleFigure) {
  const Invocation r = invoke({"reproduce", "--figure", "2", "--n", "20000"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out;
  EXPECT_NE(r.out.find("m=50 gamma=0.3"), std::string::npos);
  EXPECT_NE(r.out.find("summary: 4/4 checks passed"), std::string::npos);
  EXPECT_EQ(invoke({"reproduce", "--figure", "7"}).code, cli::kExitFailed);
}

TEST(CliReproduce, RowsCarryFormulaAndExactValues) {
  const auto rows = cli::reproduce_figure(3, 2000, 1);
  ASSERT_FALSE(rows.empty());
  for (const auto& c : rows) EXPECT_NEAR(c.exact, c.formula, 5e-4 * std::max(1.0, std::abs(c.formula))) << c.quantity;
  EXPECT_EQ(rows.back().quantity, "ratio limit");
}

TEST(CliInstance, ExportRoundTrips) {
  const Invocation r = invoke({"instance", "--ref", "samp-var", "--m", "3", "--gamma", "0.8"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const auto loaded = instance_from_json(nlohmann::json::parse(r.out));
  EXPECT_EQ(loaded.instance, build_reference_instance(ReferenceKind::samp_var, {0.1, 3, 0.8}));
}

TEST(CliParse, UsageErrorsAndHelp) {
  EXPECT_EQ(invoke({}).code, cli::kExitParse);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitParse);
  EXPECT_EQ(invoke({"run", "--ref", "att-cr", "--n", "many"}).code, cli::kExitParse);
  const Invocation help = invoke({"--help"});
  EXPECT_EQ(help.code, cli::kExitOk);
  EXPECT_NE(help.out.find("reproduce"), std::string::npos);
}

TEST(CliBinary, ProcessExitCodes) {
  const std::string tool = GIGMATCH_TOOL_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("lp --ref att-cr"), 0);
  EXPECT_EQ(status("validate /nonexistent.json"), 2);
  EXPECT_EQ(status("run --ref att-cr --gamma 0.9"), 1);
}

#include "gigmatch/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "gigmatch/error.hpp"
#include "gigmatch/instance_json.hpp"
#include "gigmatch/lp.hpp"
#include "gigmatch/oracle.hpp"
#include "gigmatch/simulate.hpp"

namespace gigmatch::cli {

namespace {

// A loaded instance file that fails validation.
class InvalidInstance : public ContractError {
 public:
  using ContractError::ContractError;
};

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitParse;
  } catch (const SolverError& e) {
    fmt::print(err, "solver error: {}\n", e.what());
    return kExitSolver;
  } catch (const SizeError& e) {
    fmt::print(err, "size error: {}\n", e.what());
    return kExitSize;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailed;
  }
}

// Runs fn on the file at path, or on fallback when no path is given.
void with_output(const std::optional<std::filesystem::path>& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& fn) {
  if (!path) {
    fn(fallback);
    return;
  }
  std::ofstream file(*path);
  if (!file) throw ParseError(fmt::format("cannot open '{}' for writing", path->string()));
  fn(file);
  file.flush();
  if (!file) throw ParseError(fmt::format("failed writing '{}'", path->string()));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string num(double v) { return fmt::format("{}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

nlohmann::ordered_json json_num(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::vector<Violation> collect_violations(const LoadResult& loaded) {
  std::vector<Violation> all = loaded.issues;
  const ValidationReport rep = validate(loaded.instance);
  all.insert(all.end(), rep.violations.begin(), rep.violations.end());
  return all;
}

}  // namespace

Instance InstanceSource::build(double gamma) const {
  if (path.has_value() == reference.has_value()) {
    throw ParameterError("exactly one of --instance and --ref must be given");
  }
  if (reference) return build_reference_instance(*reference, {eps, m, gamma});

  LoadResult loaded = load_instance(*path);
  const auto violations = collect_violations(loaded);
  if (!violations.empty()) {
    std::string msg = fmt::format("'{}' is not a valid instance:", path->string());
    for (const Violation& v : violations) msg += fmt::format("\n  {} at {}: {}", v.rule, v.location, v.message);
    throw InvalidInstance(msg);
  }
  return std::move(loaded.instance);
}

std::string InstanceSource::label(double gamma) const {
  if (path) return path->string();
  if (!reference) return "?";
  switch (*reference) {
    case ReferenceKind::att_cr:
    case ReferenceKind::samp_cr:
      return fmt::format("{}:eps={}", to_string(*reference), eps);
    case ReferenceKind::att_var:
      return fmt::format("att-var:m={}", m);
    case ReferenceKind::samp_var:
      return fmt::format("samp-var:m={}:gamma={}", m, gamma);
  }
  return "?";
}

int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadResult loaded = load_instance(path);
    const auto violations = collect_violations(loaded);
    if (violations.empty()) {
      const Instance& inst = loaded.instance;
      fmt::print(out, "ok: {} (offline={} online={} prices={} edges={} horizon={})\n", path.string(),
                 inst.num_offline(), inst.num_online(), inst.num_prices(), inst.num_edges(), inst.horizon());
      return kExitOk;
    }
    for (const Violation& v : violations) fmt::print(out, "violation {} at {}: {}\n", v.rule, v.location, v.message);
    fmt::print(out, "invalid: {} violation(s)\n", violations.size());
    return kExitFailed;
  });
}

int cmd_lp(const InstanceSource& source, bool dump, const std::optional<std::filesystem::path>& dump_path,
           std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Instance inst = expand_capacities(source.build(0.5));
    const LpProblem prob = build_lp(inst);
    const LpSolution sol = solve_lp(prob);
    if (sol.status != LpStatus::optimal) throw SolverError("the benchmark LP did not reach optimality");
    fmt::print(out, "{:.9f}\n", sol.objective);
    if (dump) with_output(dump_path, out, [&](std::ostream& os) { write_lp(os, inst, prob); });
    return kExitOk;
  });
}

namespace {

struct RunResult {
  std::string label;
  double opt_lp = 0.0;
  McSummary mc;
  double ratio_bound = 0.0;
  double profit_bound = 0.0;
  double var_bound = 0.0;
  std::optional<ExactEval> exact;
};

RunResult execute(const InstanceSource& source, PolicyKind kind, double gamma, std::size_t n,
                  std::uint64_t seed, const std::function<void(const Policy&)>& extra = {}) {
  const PolicyConfig config(kind, gamma);
  const Instance inst = expand_capacities(source.build(gamma));
  LpSolution sol = solve_benchmark_lp(inst);
  const double opt_lp = sol.objective;
  const Policy policy(inst, std::move(sol), config);

  RunResult res;
  res.label = source.label(gamma);
  res.opt_lp = opt_lp;
  res.mc = monte_carlo(policy, n, seed);
  res.ratio_bound = config.ratio_bound();
  res.profit_bound = config.ratio_bound() * opt_lp;
  res.var_bound = config.variance_bound_per_unit() * static_cast<double>(inst.num_offline());
  try {
    res.exact = exact_policy_eval(policy, EvalEngine::automatic, OracleLimits::from_env());
  } catch (const SizeError&) {
  }
  if (extra) extra(policy);
  return res;
}

std::optional<double> ratio_of(double value, double opt) {
  if (opt <= 0.0) return std::nullopt;
  return value / opt;
}

}  // namespace

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto log_events = [&](const Policy& policy) {
      if (!spec.events) return;
      with_output(spec.events, out, [&](std::ostream& os) {
        write_events_csv_header(os);
        const std::size_t count = std::min(spec.n, spec.events_max);
        for (std::size_t r = 0; r < count; ++r) {
          write_events_csv(os, policy.instance(), run_trajectory(policy, spec.seed, r, true));
        }
      });
    };
    const RunResult res = execute(spec.source, spec.policy, spec.gamma, spec.n, spec.seed, log_events);
    const McSummary& mc = res.mc;
    const auto ratio = ratio_of(mc.mean_profit, res.opt_lp);

    with_output(spec.out, out, [&](std::ostream& os) {
      if (spec.format == OutputFormat::csv) {
        os << "instance,policy,gamma,n,seed,opt_lp,mean_profit,se_profit,var_profit,mean_matches,"
              "se_matches,var_matches,se_var_matches,ratio,ratio_bound,profit_bound,var_bound,"
              "exact_profit,exact_mean_matches,exact_var_matches\n";
        std::vector<std::string> row = {
            csv_field(res.label), std::string(to_string(spec.policy)), num(spec.gamma),
            std::to_string(mc.n), std::to_string(mc.master_seed), num(res.opt_lp), num(mc.mean_profit),
            num(mc.se_profit), num(mc.var_profit), num(mc.mean_matches), num(mc.se_matches),
            num(mc.var_matches), num(mc.se_var_matches), num(ratio), num(res.ratio_bound),
            num(res.profit_bound), num(res.var_bound)};
        if (res.exact) {
          row.push_back(num(res.exact->expected_profit));
          row.push_back(num(res.exact->expected_matches));
          row.push_back(num(res.exact->variance_matches));
        } else {
          row.insert(row.end(), 3, std::string());
        }
        os << fmt::format("{}\n", fmt::join(row, ","));
        return;
      }

      nlohmann::ordered_json doc;
      doc["instance"] = res.label;
      doc["policy"] = to_string(spec.policy);
      doc["gamma"] = spec.gamma;
      doc["n"] = mc.n;
      doc["seed"] = mc.master_seed;
      doc["opt_lp"] = res.opt_lp;
      doc["summary"] = {
          {"mean_profit", mc.mean_profit},
          {"se_profit", json_num(mc.se_profit)},
          {"var_profit", json_num(mc.var_profit)},
          {"mean_matches", mc.mean_matches},
          {"se_matches", json_num(mc.se_matches)},
          {"var_matches", json_num(mc.var_matches)},
          {"se_var_matches", json_num(mc.se_var_matches)},
      };
      nlohmann::ordered_json by_type = nlohmann::ordered_json::object();
      const Instance base = spec.source.build(spec.gamma);
      for (std::size_t i = 0; i < mc.mean_matches_by_type.size(); ++i) {
        by_type[base.offline(i).id] = mc.mean_matches_by_type[i];
      }
      doc["summary"]["mean_matches_by_type"] = by_type;
      doc["ratio"] = json_num(ratio);
      doc["reference"] = {
          {"ratio_bound", res.ratio_bound},
          {"profit_bound", res.profit_bound},
          {"var_bound", res.var_bound},
      };
      if (res.exact) {
        doc["exact"] = {
            {"engine", to_string(res.exact->engine)},
            {"expected_profit", res.exact->expected_profit},
            {"mean_matches", res.exact->expected_matches},
            {"var_matches", res.exact->variance_matches},
        };
      } else {
        doc["exact"] = nullptr;
      }
      os << doc.dump(2) << "\n";
    });
    return kExitOk;
  });
}

int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (spec.gammas.empty()) throw ParameterError("the gamma grid is empty");
    for (double g : spec.gammas) (void)PolicyConfig(spec.policy, g);

    std::vector<RunResult> results;
    for (double g : spec.gammas) results.push_back(execute(spec.source, spec.policy, g, spec.n, spec.seed));

    with_output(spec.out, out, [&](std::ostream& os) {
      os << "instance,policy,n,seed,gamma,opt_lp,mean_profit,se_profit,cr_estimate,var_matches,"
            "se_var_matches,cr_bound,var_bound\n";
      for (std::size_t r = 0; r < results.size(); ++r) {
        const RunResult& res = results[r];
        const std::vector<std::string> row = {
            csv_field(res.label), std::string(to_string(spec.policy)), std::to_string(res.mc.n),
            std::to_string(spec.seed), num(spec.gammas[r]), num(res.opt_lp), num(res.mc.mean_profit),
            num(res.mc.se_profit), num(ratio_of(res.mc.mean_profit, res.opt_lp)), num(res.mc.var_matches),
            num(res.mc.se_var_matches), num(res.ratio_bound), num(res.var_bound)};
        os << fmt::format("{}\n", fmt::join(row, ","));
      }
    });
    return kExitOk;
  });
}

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

ReproCheck exact_row(int figure, std::string label, std::string quantity, double formula, double exact,
                     double tol = kFormulaTolerance) {
  ReproCheck c;
  c.figure = figure;
  c.label = std::move(label);
  c.quantity = std::move(quantity);
  c.formula = formula;
  c.exact = exact;
  c.pass = close(exact, formula, tol);
  return c;
}

ReproCheck band_row(int figure, std::string label, std::string quantity, double formula, double exact,
                    double estimate, std::optional<double> se) {
  ReproCheck c = exact_row(figure, std::move(label), std::move(quantity), formula, exact);
  c.estimate = estimate;
  c.se = se.value_or(std::numeric_limits<double>::quiet_NaN());
  const bool in_band = se ? std::abs(estimate - exact) <= kBandSigmas * *se + 1e-12 : false;
  c.pass = c.pass && in_band;
  return c;
}

struct Bench {
  Instance inst;
  LpSolution sol;
  double opt_off = 0.0;
};

Bench make_bench(Instance inst) {
  Bench b{std::move(inst), {}, 0.0};
  b.sol = solve_benchmark_lp(b.inst);
  OptOffOptions opts;
  opts.limits = OracleLimits::from_env();
  b.opt_off = opt_off(b.inst, opts).value;
  return b;
}

void figure1(std::vector<ReproCheck>& rows, std::size_t n, std::uint64_t seed) {
  const double eps = 0.1;
  const Bench b = make_bench(build_reference_instance(ReferenceKind::att_cr, {eps, 3, 0.5}));
  const std::string label = fmt::format("eps={}", eps);
  rows.push_back(exact_row(1, label, "OPT-LP", 2.0 - eps, b.sol.objective));
  rows.push_back(exact_row(1, label, "OPT-OFF", 2.0 - eps, b.opt_off));
  rows.push_back(exact_row(1, label, "OPT-ON", 1.0, opt_on(b.inst, OracleLimits::from_env()).value));
  for (double g : {0.1, 0.3, 0.5}) {
    const Policy pol(b.inst, b.sol, PolicyConfig(PolicyKind::att, g));
    const ExactEval ev = exact_policy_eval(pol);
    const McSummary mc = monte_carlo(pol, n, seed);
    const std::string lg = fmt::format("eps={} gamma={}", eps, g);
    rows.push_back(band_row(1, lg, "E[profit]", g * (2.0 - eps), ev.expected_profit, mc.mean_profit, mc.se_profit));
    std::optional<double> se;
    if (mc.se_profit) se = *mc.se_profit / b.opt_off;
    rows.push_back(band_row(1, lg, "ratio", g, ev.expected_profit / b.opt_off, mc.mean_profit / b.opt_off, se));
  }
}

void variance_figure(std::vector<ReproCheck>& rows, int figure, ReferenceKind kind, PolicyKind policy, int m,
                     double gamma, std::size_t n, std::uint64_t seed) {
  const Bench b = make_bench(build_reference_instance(kind, {0.1, m, gamma}));
  const std::string label = fmt::format("m={} gamma={}", m, gamma);
  const PolicyConfig config(policy, gamma);
  // Per-agent success probability: gamma for ATT (p = 1), gamma p = gamma_bar for SAMP.
  const double p = b.inst.accept_prob(0, 1);
  const double per_agent = policy == PolicyKind::att ? gamma : gamma * p;
  rows.push_back(exact_row(figure, label, "OPT-LP", m * p, b.sol.objective));
  rows.push_back(exact_row(figure, label, "OPT-OFF", m * p, b.opt_off));

  const Policy pol(b.inst, b.sol, config);
  const ExactEval ev = exact_policy_eval(pol, EvalEngine::automatic, OracleLimits::from_env());
  const McSummary mc = monte_carlo(pol, n, seed);
  rows.push_back(band_row(figure, label, "E[H]", per_agent * m, ev.expected_matches, mc.mean_matches, mc.se_matches));
  rows.push_back(band_row(figure, label, "Var[H]", config.variance_bound_per_unit() * m, ev.variance_matches,
                          mc.var_matches.value_or(0.0), mc.se_var_matches));
}

void figure3(std::vector<ReproCheck>& rows, std::size_t n, std::uint64_t seed) {
  const double g = 0.5;
  std::vector<double> ratios;
  for (double eps : {0.1, 0.01, 0.001}) {
    const Bench b = make_bench(build_reference_instance(ReferenceKind::samp_cr, {eps, 3, g}));
    const std::string label = fmt::format("eps={} gamma={}", eps, g);
    const double opt = 1.0 / eps + 1.0 - eps;
    const double profit = g * (1.0 - eps) + g * (1.0 - g + g * eps) / eps;
    rows.push_back(exact_row(3, label, "OPT-LP", opt, b.sol.objective));
    rows.push_back(exact_row(3, label, "OPT-OFF", opt, b.opt_off));

    const Policy pol(b.inst, b.sol, PolicyConfig(PolicyKind::samp, g));
    const ExactEval ev = exact_policy_eval(pol);
    const McSummary mc = monte_carlo(pol, n, seed);
    rows.push_back(band_row(3, label, "E[profit]", profit, ev.expected_profit, mc.mean_profit, mc.se_profit));
    std::optional<double> se;
    if (mc.se_profit) se = *mc.se_profit / b.opt_off;
    const double ratio = ev.expected_profit / b.opt_off;
    rows.push_back(band_row(3, label, "ratio", profit / opt, ratio, mc.mean_profit / b.opt_off, se));
    ratios.push_back(ratio);
  }
  ReproCheck limit = exact_row(3, fmt::format("eps->0 gamma={}", g), "ratio limit", g * (1.0 - g), ratios.back(), 5e-4);
  limit.pass = limit.pass && std::is_sorted(ratios.rbegin(), ratios.rend());
  rows.push_back(limit);
}

std::string cell(double v) { return std::isnan(v) ? "-" : fmt::format("{:.9g}", v); }

void print_rows(std::ostream& out, const std::vector<ReproCheck>& rows) {
  fmt::print(out, "{:<3} {:<20} {:<12} {:>16} {:>16} {:>16} {:>12} {:>8}  {}\n", "fig", "case", "quantity",
             "formula", "exact", "estimate", "se", "z", "status");
  for (const ReproCheck& c : rows) {
    const double z = (std::isnan(c.se) || c.se == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                                        : (c.estimate - c.exact) / c.se;
    fmt::print(out, "{:<3} {:<20} {:<12} {:>16} {:>16} {:>16} {:>12} {:>8}  {}\n", c.figure, c.label, c.quantity,
               cell(c.formula), cell(c.exact), cell(c.estimate), cell(c.se),
               std::isnan(z) ? std::string("-") : fmt::format("{:.2f}", z), c.pass ? "PASS" : "FAIL");
  }
}

constexpr const char* kFigureNotes[] = {
    "",
    "att-cr eps=0.1, ATT gamma in {0.1, 0.3, 0.5}: OPT-LP = OPT-OFF = 2 - eps, OPT-ON = 1, "
    "E[profit] = gamma (2 - eps)",
    "att-var m=50, ATT gamma=0.3: E[H] = gamma m, Var[H] = gamma (1 - gamma) m",
    "samp-cr eps in {0.1, 0.01, 0.001}, SAMP gamma=0.5: OPT-LP = OPT-OFF = 1/eps + 1 - eps, "
    "E[profit] = gamma (1 - eps) + gamma (1 - gamma + gamma eps) / eps, ratio -> gamma (1 - gamma)",
    "samp-var m=40, SAMP gamma=0.8, p = 1/(2 gamma): E[H] = m/2, Var[H] = m/4",
};

}  // namespace

std::vector<ReproCheck> reproduce_figure(int figure, std::size_t n, std::uint64_t seed) {
  std::vector<ReproCheck> rows;
  switch (figure) {
    case 1: figure1(rows, n, seed); break;
    case 2: variance_figure(rows, 2, ReferenceKind::att_var, PolicyKind::att, 50, 0.3, n, seed); break;
    case 3: figure3(rows, n, seed); break;
    case 4: variance_figure(rows, 4, ReferenceKind::samp_var, PolicyKind::samp, 40, 0.8, n, seed); break;
    default: throw ParameterError(fmt::format("figure must be 1, 2, 3 or 4 (got {})", figure));
  }
  return rows;
}

int cmd_reproduce(int figure, std::size_t n, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<int> figures = {1, 2, 3, 4};
    if (figure != 0) {
      if (figure < 1 || figure > 4) throw ParameterError(fmt::format("figure must be 1, 2, 3 or 4 (got {})", figure));
      figures = {figure};
    }
    fmt::print(out, "# reproduce n={} seed={} band={}sigma\n", n, seed, kBandSigmas);
    std::size_t passed = 0;
    std::size_t total = 0;
    for (int f : figures) {
      const auto rows = reproduce_figure(f, n, seed);
      fmt::print(out, "# figure {}: {}\n", f, kFigureNotes[f]);
      print_rows(out, rows);
      total += rows.size();
      passed += static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ReproCheck& c) { return c.pass; }));
    }
    fmt::print(out, "summary: {}/{} checks passed\n", passed, total);
    return passed == total ? kExitOk : kExitFailed;
  });
}

int cmd_instance(const InstanceSource& source, double gamma, const std::optional<std::filesystem::path>& path,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Instance inst = source.build(gamma);
    with_output(path, out, [&](std::ostream& os) { os << dump_instance(inst); });
    return kExitOk;
  });
}

namespace {

struct SourceFlags {
  std::string instance;
  std::string ref;
  double eps = 0.1;
  int m = 3;

  void attach(CLI::App* cmd) {
    auto* inst = cmd->add_option("instance,--instance", instance, "Instance JSON file");
    auto* kind = cmd->add_option("--ref", ref, "Reference instance: att-cr | samp-cr | att-var | samp-var");
    inst->excludes(kind);
    cmd->add_option("--eps", eps, "epsilon for att-cr / samp-cr")->capture_default_str();
    cmd->add_option("--m", m, "size m for att-var / samp-var")->capture_default_str();
  }

  std::optional<InstanceSource> resolve(std::ostream& err) const {
    InstanceSource src;
    src.eps = eps;
    src.m = m;
    if (!instance.empty()) {
      src.path = instance;
    } else if (!ref.empty()) {
      src.reference = parse_reference_kind(ref);
      if (!src.reference) {
        fmt::print(err, "error: unknown reference kind '{}'\n", ref);
        return std::nullopt;
      }
    } else {
      fmt::print(err, "error: give an instance file or --ref KIND\n");
      return std::nullopt;
    }
    return src;
  }
};

std::optional<PolicyKind> resolve_policy(const std::string& name, std::ostream& err) {
  auto kind = parse_policy_kind(name);
  if (!kind) fmt::print(err, "error: unknown policy '{}' (expected att or samp)\n", name);
  return kind;
}

std::optional<std::vector<double>> parse_grid(const std::string& text, std::ostream& err) {
  std::vector<double> grid;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string piece = text.substr(pos, end - pos);
    piece.erase(std::remove_if(piece.begin(), piece.end(), [](unsigned char c) { return std::isspace(c); }),
                piece.end());
    if (!piece.empty()) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
      if (ec != std::errc() || ptr != piece.data() + piece.size()) {
        fmt::print(err, "error: '{}' in --gammas is not a number\n", piece);
        return std::nullopt;
      }
      grid.push_back(v);
    }
    pos = end + 1;
  }
  return grid;
}

std::optional<std::filesystem::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matching-and-pricing policies: LP benchmark, exact oracles, Monte Carlo"};
  app.name("gigmatch");
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check an instance file");
  validate_cmd->add_option("path", validate_path, "Instance JSON file")->required();

  SourceFlags lp_src;
  bool lp_dump = false;
  std::string lp_out;
  auto* lp_cmd = app.add_subcommand("lp", "Solve the benchmark LP and print OPT-LP");
  lp_src.attach(lp_cmd);
  lp_cmd->add_flag("--dump", lp_dump, "Also write the LP in CPLEX LP format");
  lp_cmd->add_option("--out", lp_out, "File for --dump (default: stdout)");

  SourceFlags run_src;
  std::string run_policy = "att";
  double run_gamma = 0.5;
  RunSpec run_spec;
  std::string run_format = "csv";
  std::string run_out;
  std::string run_events;
  auto* run_cmd = app.add_subcommand("run", "Monte Carlo run of one policy");
  run_src.attach(run_cmd);
  run_cmd->add_option("--policy", run_policy, "att | samp")->capture_default_str();
  run_cmd->add_option("--gamma", run_gamma, "Policy parameter")->capture_default_str();
  run_cmd->add_option("--n", run_spec.n, "Replications")->capture_default_str();
  run_cmd->add_option("--seed", run_spec.seed, "Master seed")->capture_default_str();
  run_cmd->add_option("--format", run_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  run_cmd->add_option("--out", run_out, "Output file (default: stdout)");
  run_cmd->add_option("--events", run_events, "Per-round event log CSV");
  run_cmd->add_option("--events-max", run_spec.events_max, "Replications written to the event log")
      ->capture_default_str();

  SourceFlags sweep_src;
  std::string sweep_policy = "att";
  std::string sweep_grid;
  SweepSpec sweep_spec;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo runs over a gamma grid");
  sweep_src.attach(sweep_cmd);
  sweep_cmd->add_option("--policy", sweep_policy, "att | samp")->capture_default_str();
  sweep_cmd->add_option("--gammas", sweep_grid, "Comma-separated gamma values");
  sweep_cmd->add_option("--n", sweep_spec.n, "Replications per gamma")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_spec.seed, "Master seed")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Output file (default: stdout)");

  int repro_figure = 0;
  std::size_t repro_n = 100000;
  std::uint64_t repro_seed = 42;
  auto* repro_cmd = app.add_subcommand("reproduce", "Check the four tightness examples");
  repro_cmd->add_option("--figure", repro_figure, "1-4; 0 runs all")->capture_default_str();
  repro_cmd->add_option("--n", repro_n, "Replications")->capture_default_str();
  repro_cmd->add_option("--seed", repro_seed, "Master seed")->capture_default_str();

  SourceFlags inst_src;
  double inst_gamma = 0.5;
  std::string inst_out;
  auto* inst_cmd = app.add_subcommand("instance", "Write an instance as canonical JSON");
  inst_src.attach(inst_cmd);
  inst_cmd->add_option("--gamma", inst_gamma, "gamma for samp-var")->capture_default_str();
  inst_cmd->add_option("--out", inst_out, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  if (*validate_cmd) return cmd_validate(validate_path, out, err);

  if (*lp_cmd) {
    const auto src = lp_src.resolve(err);
    if (!src) return kExitParse;
    return cmd_lp(*src, lp_dump, optional_path(lp_out), out, err);
  }

  if (*run_cmd) {
    const auto src = run_src.resolve(err);
    const auto kind = resolve_policy(run_policy, err);
    if (!src || !kind) return kExitParse;
    run_spec.source = *src;
    run_spec.policy = *kind;
    run_spec.gamma = run_gamma;
    run_spec.format = run_format == "json" ? OutputFormat::json : OutputFormat::csv;
    run_spec.out = optional_path(run_out);
    run_spec.events = optional_path(run_events);
    return cmd_run(run_spec, out, err);
  }

  if (*sweep_cmd) {
    const auto src = sweep_src.resolve(err);
    const auto kind = resolve_policy(sweep_policy, err);
    const auto grid = parse_grid(sweep_grid, err);
    if (!src || !kind || !grid) return kExitParse;
    sweep_spec.source = *src;
    sweep_spec.policy = *kind;
    sweep_spec.gammas = *grid;
    sweep_spec.out = optional_path(sweep_out);
    return cmd_sweep(sweep_spec, out, err);
  }

  if (*repro_cmd) return cmd_reproduce(repro_figure, repro_n, repro_seed, out, err);

  if (*inst_cmd) {
    const auto src = inst_src.resolve(err);
    if (!src) return kExitParse;
    return cmd_instance(*src, inst_gamma, optional_path(inst_out), out, err);
  }
  return kExitParse;
}

}  // namespace gigmatch::cli

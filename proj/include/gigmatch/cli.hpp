#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gigmatch/generators.hpp"
#include "gigmatch/instance.hpp"
#include "gigmatch/policy.hpp"

namespace gigmatch::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,   // domain violation or failed check
  kExitParse = 2,    // unreadable or malformed input, bad command line
  kExitSolver = 3,
  kExitSize = 4,
};

// Exactly one of path / reference is set.
struct InstanceSource {
  std::optional<std::filesystem::path> path;
  std::optional<ReferenceKind> reference;
  double eps = 0.1;
  int m = 3;

  // samp-var depends on gamma; the other kinds ignore it.
  Instance build(double gamma) const;
  std::string label(double gamma) const;
};

enum class OutputFormat { csv, json };

struct RunSpec {
  InstanceSource source;
  PolicyKind policy = PolicyKind::att;
  double gamma = 0.5;
  std::size_t n = 100000;
  std::uint64_t seed = 42;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> events;
  std::size_t events_max = 1000;
};

struct SweepSpec {
  InstanceSource source;
  PolicyKind policy = PolicyKind::att;
  std::vector<double> gammas;
  std::size_t n = 100000;
  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> out;
};

// One line of the reproduction table. Rows without a Monte Carlo estimate
// carry NaN in estimate/se and are judged on |exact - formula| alone.
struct ReproCheck {
  int figure = 0;
  std::string label;
  std::string quantity;
  double formula = 0.0;
  double exact = 0.0;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

inline constexpr double kFormulaTolerance = 1e-7;
inline constexpr double kBandSigmas = 4.0;

std::vector<ReproCheck> reproduce_figure(int figure, std::size_t n, std::uint64_t seed);

// Every command writes results to `out` and diagnostics to `err` and
// returns an ExitCode; no command throws.
int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err);
int cmd_lp(const InstanceSource& source, bool dump, const std::optional<std::filesystem::path>& dump_path,
           std::ostream& out, std::ostream& err);
int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err);
// figure = 0 runs all four.
int cmd_reproduce(int figure, std::size_t n, std::uint64_t seed, std::ostream& out, std::ostream& err);
int cmd_instance(const InstanceSource& source, double gamma,
                 const std::optional<std::filesystem::path>& path, std::ostream& out, std::ostream& err);

// Parses a full command line (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gigmatch::cli

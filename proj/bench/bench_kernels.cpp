#include <benchmark/benchmark.h>

#include "gigmatch/generators.hpp"
#include "gigmatch/lp.hpp"
#include "gigmatch/oracle.hpp"
#include "gigmatch/policy.hpp"
#include "gigmatch/simulate.hpp"

using namespace gigmatch;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

struct Fixture {
  Instance inst;
  LpSolution sol;
  Policy policy;
  Fixture(Instance i, PolicyKind kind, double gamma)
      : inst(std::move(i)), sol(solve_benchmark_lp(inst)), policy(inst, sol, PolicyConfig(kind, gamma)) {}
};

void BM_MonteCarlo(benchmark::State& state) {
  static const Fixture fx(random_instance(11, {8, 6, 2, 10, 0.6}), PolicyKind::att, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo(fx.policy, 20000, 42, exec_of(state)).mean_profit);
  }
  state.SetLabel(exec_of(state) == Exec::serial ? "serial" : "parallel");
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Serial uses the push recursion, parallel the pull recursion.
void BM_BitmaskEval(benchmark::State& state) {
  static const Fixture fx(random_instance(5, {12, 6, 2, 8, 0.5}), PolicyKind::samp, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        exact_policy_eval(fx.policy, EvalEngine::bitmask, OracleLimits{}, exec_of(state)).variance_matches);
  }
  state.SetLabel(exec_of(state) == Exec::serial ? "push" : "pull");
}
BENCHMARK(BM_BitmaskEval)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OptOff(benchmark::State& state) {
  static const Instance inst = random_instance(3, {5, 3, 2, 5, 0.7});
  OptOffOptions opts;
  opts.mode = OffMode::sampled;
  opts.samples = 2000;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(opt_off(inst, opts).value);
  state.SetLabel(exec_of(state) == Exec::serial ? "serial" : "parallel");
}
BENCHMARK(BM_OptOff)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

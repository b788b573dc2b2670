#include "adess/economics.hpp"
#include "adess/fork_choice.hpp"
#include "adess/net_sim.hpp"

#include <benchmark/benchmark.h>

using namespace adess;

namespace {

// Two competing branches from genesis, the second penalized once the first reaches alpha.
BlockTree two_branch_tree(int length) {
  BlockTree t;
  BlockId a = t.genesis();
  BlockId b = t.genesis();
  for (int i = 0; i < length; ++i) {
    a = t.append_block(a, 1.0, "ic", i + 1.0);
    b = t.append_block(b, 1.0, "a", i + 1.0);
  }
  return t;
}

void BM_ObserveAndChoose(benchmark::State& state) {
  const BlockTree tree = two_branch_tree(static_cast<int>(state.range(0)));
  AdessParams params;
  params.alpha = 6;
  params.xi = 1.0;
  for (auto _ : state) {
    NodeView view(tree, params);
    for (std::size_t i = 1; i < tree.size(); ++i) view.observe(BlockId{i}, static_cast<double>(i));
    benchmark::DoNotOptimize(adess_canonical(view).chain.head);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tree.size() - 1));
}
BENCHMARK(BM_ObserveAndChoose)->Arg(50)->Arg(200)->Arg(1000);

void BM_MinDeterringXi(benchmark::State& state) {
  AttackParams p;
  p.alpha = 6;
  p.sigma = 1;
  p.delta = 0.999;
  for (auto _ : state) benchmark::DoNotOptimize(min_deterring_xi(100.0, p));
}
BENCHMARK(BM_MinDeterringXi);

void BM_Scenario(benchmark::State& state) {
  ScenarioConfig c;
  c.mining.kind = MiningKind::Stochastic;
  c.horizon = static_cast<double>(state.range(0));
  c.record_heads = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    c.seed = ++seed;
    benchmark::DoNotOptimize(run_scenario(c).attacker_cost);
  }
}
BENCHMARK(BM_Scenario)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();

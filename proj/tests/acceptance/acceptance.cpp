// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances and time limits are fixed here.

#include "adess/economics.hpp"
#include "adess/errors.hpp"
#include "adess/fork_choice.hpp"
#include "adess/mining.hpp"
#include "adess/net_sim.hpp"
#include "adess/numeric.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace adess;

namespace {

constexpr double kRelTightest = 1e-9;   // AC3, AC8, AC10 (CE)
constexpr double kRelDerivative = 1e-4; // AC5
constexpr double kRelBudish = 1e-3;     // AC6
constexpr double kRelMiningMean = 0.02; // AC9
constexpr double kRelSeedMean = 0.05;   // AC10 (stochastic)
constexpr double kRelRatio = 1e-12;     // AC13

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int g_failures = 0;

void report(const char* id, const char* what, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0.0 && secs > limit_s) {
    std::ostringstream s;
    s << "took " << secs << " s, limit " << limit_s << " s";
    o.fail(s.str());
  }
  std::printf("%s %s %s (%.3f s)%s%s\n", o.ok ? "PASS" : "FAIL", id, what, secs, o.ok ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.ok) ++g_failures;
}

std::string describe(const std::map<std::string, double>& kv) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [k, v] : kv) {
    s << (first ? "" : " ") << k << '=' << v;
    first = false;
  }
  return s.str();
}

AttackParams unit_params(int alpha, int sigma, double delta) {
  AttackParams p;
  p.c = 1.0;
  p.p_B = 1.0;
  p.alpha = alpha;
  p.sigma = sigma;
  p.delta = delta;
  return p;
}

// ---- AC1 -------------------------------------------------------------------

Outcome attack_hashrate_grid() {
  Outcome o;
  const std::vector<double> xis{0.3, 0.5, 1.0, 2.0, 4.0};
  const std::vector<double> eps{0.0, 0.05, 0.1, 0.2, 0.25};
  const std::vector<int> ns{1, 2, 5, 10, 20};
  const std::vector<DifficultyRule> rules{DifficultyRule::full(), DifficultyRule::partial(0.5),
                                          DifficultyRule::partial(0.25), DifficultyRule::every(100)};
  int points = 0;
  for (double xi : xis) {
    for (double e : eps) {
      for (int n : ns) {
        for (const DifficultyRule& rule : rules) {
          if (!(xi > e)) continue;
          ++points;
          const HashrateComparison cmp = compare_attack_hashrate(xi, e, n, rule);
          if (!(cmp.adess >= cmp.nakamoto)) {
            o.fail(describe({{"xi", xi}, {"eps", e}, {"N", n}, {"adess", cmp.adess}, {"nakamoto", cmp.nakamoto}}));
          }
        }
      }
    }
  }
  if (points != 500) o.fail("grid has " + std::to_string(points) + " points");
  return o;
}

// ---- AC2 -------------------------------------------------------------------

Outcome min_xi_deters() {
  Outcome o;
  oracle::SplitMix rng{2};
  for (int depth : {2, 7}) {
    for (double v : {0.1, 1.0, 10.0, 100.0, 1e4}) {
      AttackParams p = unit_params(depth, 0, 0.999);
      const double xi_star = min_deterring_xi(v, p);
      const int N = p.effective_N();
      const double at_star = oracle::adess_profit(v, 1.0, 1.0, 0.999, xi_star, N, 0);
      if (!(at_star < 0.0)) o.fail(describe({{"depth", depth}, {"v", v}, {"xi*", xi_star}, {"profit", at_star}}));
      for (int i = 0; i < 20; ++i) {
        const double xi = xi_star + (xi_star + 1.0) * 20.0 * rng.unit() + 1e-9;
        const double pi = oracle::adess_profit(v, 1.0, 1.0, 0.999, xi, N, 0);
        if (!(pi < 0.0)) o.fail(describe({{"depth", depth}, {"v", v}, {"xi", xi}, {"profit", pi}}));
      }
    }
  }
  return o;
}

// ---- AC3 -------------------------------------------------------------------

Outcome safe_value_interval_holds() {
  Outcome o;
  oracle::SplitMix rng{3};
  // v_max = -profit(xi, 0) is the break-even value only when revenue is not
  // discounted; with delta < 1 the discounted break-even lies above it.
  for (double delta : {1.0, 0.999}) {
    for (double xi : {0.25, 0.5, 1.0, 2.0}) {
      AttackParams p = unit_params(3, 1, delta);
      const int N = p.effective_N();
      const double v_max = safe_value_interval(xi, p);
      const double want = -oracle::adess_profit(0.0, 1.0, 1.0, delta, xi, N, 0);
      if (std::abs(v_max - want) > kRelTightest * std::abs(want)) {
        o.fail(describe({{"delta", delta}, {"xi", xi}, {"v_max", v_max}, {"oracle", want}}));
      }
      for (int i = 0; i < 100; ++i) {
        const double v = v_max * rng.unit();
        const double pi = oracle::adess_profit(v, 1.0, 1.0, delta, xi, N, 0);
        if (!(pi < 0.0)) o.fail(describe({{"delta", delta}, {"xi", xi}, {"v", v}, {"profit", pi}}));
      }
      const double break_even = adess_break_even_v(xi, p);
      if (delta == 1.0 && std::abs(break_even - v_max) > kRelTightest * v_max) {
        o.fail(describe({{"xi", xi}, {"break_even", break_even}, {"v_max", v_max}}));
      }
      if (break_even < v_max) o.fail(describe({{"delta", delta}, {"xi", xi}, {"break_even_below_v_max", 1}}));
      const double edge = oracle::adess_profit(break_even, 1.0, 1.0, delta, xi, N, 0);
      if (std::abs(edge) > kRelTightest * (1.0 + break_even)) {
        o.fail(describe({{"delta", delta}, {"xi", xi}, {"profit_at_break_even", edge}}));
      }
    }
  }
  return o;
}

// ---- AC4 -------------------------------------------------------------------

Outcome plan_optimum_is_minimal() {
  Outcome o;
  oracle::SplitMix rng{4};
  int points = 0;
  while (points < 100) {
    const int alpha = 1 + static_cast<int>(rng.below(6));
    const int sigma = static_cast<int>(rng.below(4));
    const double xi = 0.1 + 2.9 * rng.unit();
    const double delta = 0.95 + 0.0499 * rng.unit();
    const double v = 100.0 * rng.unit();
    const double price = 0.5 + rng.unit();
    ++points;
    const int N0 = alpha + sigma;
    double best = -std::numeric_limits<double>::infinity();
    double best_tau = -1.0;
    int best_n = -1;
    int best_b = -1;
    for (int t2 = 0; t2 <= 20; ++t2) {
      const double tau = 0.5 * t2;
      for (int n = N0; n <= N0 + 10; ++n) {
        for (int b = 0; b <= 20; ++b) {
          const double pi = oracle::plan_profit(v, price, price, delta, xi, tau, n, b);
          if (pi > best) {
            best = pi;
            best_tau = tau;
            best_n = n;
            best_b = b;
          }
        }
      }
    }
    AttackParams p = unit_params(alpha, sigma, delta);
    p.c = p.p_B = price;
    p.v = v;
    p.xi = xi;
    const double lib = adess_plan_profit(p, 0.0, N0, 0).profit;
    const double orc = oracle::plan_profit(v, price, price, delta, xi, 0.0, N0, 0);
    if (std::abs(lib - orc) > 1e-9 * (1.0 + std::abs(orc))) {
      o.fail(describe({{"library", lib}, {"oracle", orc}}));
    }
    if (best_tau != 0.0 || best_n != N0 || best_b != 0) {
      o.fail(describe({{"alpha", alpha}, {"sigma", sigma}, {"xi", xi}, {"delta", delta}, {"v", v},
                       {"best_tau", best_tau}, {"best_N", best_n}, {"best_B", best_b}}));
    }
  }
  return o;
}

// ---- AC5 -------------------------------------------------------------------

Outcome derivatives_match() {
  Outcome o;
  oracle::SplitMix rng{5};
  int points = 0;
  while (points < 1000) {
    const int n = 1 + static_cast<int>(rng.below(25));
    const double xi = 0.05 + 2.5 * rng.unit();
    const double delta = 0.5 + 0.4999 * rng.unit();
    const int N = 1 + static_cast<int>(rng.below(10));
    const double h = 1e-5;
    if (ceil_blocks(N * (1.0 + xi - 100 * h)) != ceil_blocks(N * (1.0 + xi + 100 * h))) continue;
    ++points;
    const auto term = [&](double x) { return std::pow(delta, n / (1.0 + x)) * std::pow(1.0 + x, n); };
    const double fd1 = oracle::central_diff(term, xi, h);
    const double d1 = cost_term_derivative(n, xi, delta);
    if (std::abs(d1 - fd1) > kRelDerivative * std::abs(fd1)) {
      o.fail(describe({{"n", n}, {"xi", xi}, {"delta", delta}, {"d1", d1}, {"fd", fd1}}));
    }
    const auto first = [&](double x) { return cost_term_derivative(n, x, delta); };
    const double fd2 = oracle::central_diff(first, xi, h);
    const double d2 = cost_term_second_derivative(n, xi, delta);
    if (std::abs(d2 - fd2) > kRelDerivative * std::abs(fd2) + 1e-9) {
      o.fail(describe({{"n", n}, {"xi", xi}, {"delta", delta}, {"d2", d2}, {"fd", fd2}}));
    }
    const auto profit = [&](double x) { return oracle::adess_profit(0.0, 1.0, 1.0, delta, x, N, 0); };
    const double fdp = oracle::central_diff(profit, xi, h);
    const double margin = penalty_margin(xi, N, delta, 1.0, 1.0);
    if (std::abs(margin - fdp) > kRelDerivative * std::abs(fdp) + 1e-9) {
      o.fail(describe({{"N", N}, {"xi", xi}, {"delta", delta}, {"margin", margin}, {"fd", fdp}}));
    }
  }
  return o;
}

// ---- AC6 -------------------------------------------------------------------

Outcome budish_limit() {
  Outcome o;
  int points = 0;
  for (double c : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    for (int n = 1; n <= 10; ++n) {
      ++points;
      AttackParams p;
      p.N = n;
      p.c = c;
      p.p_B = 1.0;
      p.epsilon_extra = 0.2;
      p.delta = 1.0 - 1e-6;
      const double limit = (c - 1.0) * n + c * 0.2;
      const double got = nakamoto_break_even_v(p);
      if (std::abs(got - limit) > kRelBudish * std::abs(limit)) {
        o.fail(describe({{"c", c}, {"N", n}, {"break_even", got}, {"limit", limit}}));
      }
    }
  }
  if (points != 50) o.fail("grid has " + std::to_string(points) + " points");
  return o;
}

// ---- AC7 -------------------------------------------------------------------

BlockTree random_tree(oracle::SplitMix& rng, std::size_t blocks, int max_forks) {
  BlockTree tree;
  std::set<BlockId> forks;
  std::vector<BlockId> tips{tree.genesis()};
  for (std::size_t i = 1; i < blocks; ++i) {
    BlockId parent = tips[rng.below(tips.size())];
    if (static_cast<int>(forks.size()) < max_forks && rng.unit() < 0.08) {
      parent = BlockId{rng.below(tree.size())};
    } else if (!forks.empty() && rng.unit() < 0.1) {
      parent = *std::next(forks.begin(), static_cast<long>(rng.below(forks.size())));
    }
    if (!tree.children(parent).empty()) forks.insert(parent);
    const BlockId b = tree.append_block(parent, 1.0 + 0.5 * static_cast<double>(rng.below(3)), "m",
                                        static_cast<double>(i));
    std::erase(tips, parent);
    tips.push_back(b);
  }
  return tree;
}

// Walks from genesis choosing, at every fork, a branch that first reached
// alpha post-fork blocks (or any branch when none did). Returns true when some
// such path ends at a head the view never penalized.
struct WitnessSearch {
  const BlockTree& tree;
  const NodeView& view;
  int alpha;
  std::vector<long> connect_at;  // order index at which each block connected

  [[nodiscard]] long reach_alpha(BlockId fork, BlockId branch) const {
    const std::uint32_t need = tree.block(fork).height + static_cast<std::uint32_t>(alpha);
    long best = std::numeric_limits<long>::max();
    std::vector<BlockId> stack{branch};
    while (!stack.empty()) {
      const BlockId b = stack.back();
      stack.pop_back();
      if (connect_at[b.value] < 0) continue;
      if (tree.block(b).height >= need) best = std::min(best, connect_at[b.value]);
      for (BlockId c : tree.children(b)) stack.push_back(c);
    }
    return best;
  }

  [[nodiscard]] bool exists(BlockId at) const {
    std::vector<BlockId> kids;
    for (BlockId c : tree.children(at)) {
      if (connect_at[c.value] >= 0) kids.push_back(c);
    }
    if (kids.empty()) return !view.ever_penalized(at);
    if (kids.size() > 1) {
      long first = std::numeric_limits<long>::max();
      for (BlockId k : kids) first = std::min(first, reach_alpha(at, k));
      if (first != std::numeric_limits<long>::max()) {
        std::erase_if(kids, [&](BlockId k) { return reach_alpha(at, k) != first; });
      }
    }
    for (BlockId k : kids) {
      if (exists(k)) return true;
    }
    return false;
  }
};

Outcome fork_choice_fuzz() {
  Outcome o;
  oracle::SplitMix rng{7};
  int with_penalties = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const BlockTree tree = random_tree(rng, 2 + rng.below(199), 6);
    AdessParams params;
    params.alpha = 1 + static_cast<int>(rng.below(4));
    params.xi = 0.1 + 1.9 * rng.unit();
    std::vector<BlockId> order;
    for (std::size_t i = 1; i < tree.size(); ++i) order.push_back(BlockId{i});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    NodeView view(tree, params);
    WitnessSearch search{tree, view, params.alpha, std::vector<long>(tree.size(), -1)};
    search.connect_at[0] = 0;
    std::vector<bool> arrived(tree.size(), false);
    for (std::size_t i = 0; i < order.size(); ++i) {
      view.observe(order[i], static_cast<double>(i + 1));
      arrived[order[i].value] = true;
      // Connect everything whose ancestors have now all arrived.
      for (std::size_t b = 1; b < tree.size(); ++b) {
        if (search.connect_at[b] >= 0 || !arrived[b]) continue;
        std::optional<BlockId> cur = tree.block(BlockId{b}).parent;
        bool ready = true;
        for (; cur && cur->value != 0; cur = tree.block(*cur).parent) ready = ready && arrived[cur->value];
        if (ready) search.connect_at[b] = static_cast<long>(i + 1);
      }
      const bool check_now = trial < 200 || i + 1 == order.size();
      if (!check_now) continue;
      const CanonicalChoice choice = adess_canonical(view);
      const auto heads = view.heads();
      if (std::count(heads.begin(), heads.end(), choice.chain.head) != 1) {
        o.fail("trial " + std::to_string(trial) + ": canonical head is not a head");
      }
      if (!search.exists(tree.genesis())) o.fail("trial " + std::to_string(trial) + ": no never-penalized path");
    }
    if (!view.penalties().empty()) ++with_penalties;
  }
  if (with_penalties < 500) o.fail("only " + std::to_string(with_penalties) + " trees exercised penalties");
  return o;
}

// ---- AC8 -------------------------------------------------------------------

Outcome adjustment_mapping() {
  Outcome o;
  for (double beta : {0.25, 0.5, 1.0}) {
    for (double xi : {0.1, 0.5, 1.0, 2.0}) {
      for (int n : {1, 3, 10, 25}) {
        const double partial = sustain_cost(xi, n, DifficultyRule::partial(beta), 1.3);
        const double full = sustain_cost(beta * xi, n, DifficultyRule::full(), 1.3);
        if (std::abs(partial - full) > kRelTightest * full) {
          o.fail(describe({{"beta", beta}, {"xi", xi}, {"n", n}, {"partial", partial}, {"full", full}}));
        }
      }
    }
  }
  for (double xi : {0.1, 0.5, 1.0, 2.0}) {
    const int horizon = 50;
    const double c = 1.3;
    const auto rates = required_hashrate_series(xi, horizon, DifficultyRule::every(horizon + 1));
    for (double h : rates) {
      const double surcharge = c * (h - 1.0);
      if (std::abs(surcharge - c * xi) > 1e-12 * c * xi) o.fail(describe({{"xi", xi}, {"surcharge", surcharge}}));
    }
    const double total = sustain_cost(xi, horizon, DifficultyRule::every(horizon + 1), c);
    if (total != c * horizon) o.fail(describe({{"xi", xi}, {"epoch_total", total}}));
  }
  return o;
}

// ---- AC9 -------------------------------------------------------------------

Outcome mining_fidelity() {
  Outcome o;
  MiningMode stochastic;
  stochastic.kind = MiningKind::Stochastic;
  stochastic.tick = 0.001;
  for (double d : {1.0, 4.0}) {
    for (double h : {1.0, 2.5}) {
      Rng rng(99);
      double sum = 0.0;
      const int n = 100000;
      for (int i = 0; i < n; ++i) sum += next_block_time(d, h, stochastic, rng);
      const double mean = sum / n;
      if (std::abs(mean - d / h) > kRelMiningMean * d / h) o.fail(describe({{"D", d}, {"h", h}, {"mean", mean}}));
      Rng ce_rng(0);
      if (next_block_time(d, h, MiningMode{}, ce_rng) != d / h) o.fail(describe({{"D", d}, {"h", h}, {"ce", 0}}));
    }
  }
  Rng a(1234);
  Rng b(1234);
  for (int i = 0; i < 10000; ++i) {
    if (next_block_time(2.0, 1.0, stochastic, a) != next_block_time(2.0, 1.0, stochastic, b)) {
      o.fail("replay diverged at draw " + std::to_string(i));
      break;
    }
  }
  ScenarioConfig cfg;
  cfg.mining = stochastic;
  cfg.seed = 31;
  cfg.horizon = 40.0;
  cfg.attack.alpha = cfg.adess.alpha = 2;
  std::ostringstream first;
  std::ostringstream second;
  run_scenario(cfg).write_text(first);
  run_scenario(cfg).write_text(second);
  if (first.str() != second.str()) o.fail("scenario replay differs");
  return o;
}

// ---- AC10 ------------------------------------------------------------------

ScenarioConfig attack_scenario(double xi, int sigma, double delta) {
  ScenarioConfig c;
  c.protocol = Protocol::Adess;
  c.adess.alpha = c.attack.alpha = 3;
  c.adess.xi = c.attack.xi = xi;
  c.attack.sigma = sigma;
  c.attack.delta = delta;
  c.attack.v = 10.0;
  c.horizon = 200.0;
  return c;
}

Outcome end_to_end_attack() {
  Outcome o;
  for (double xi : {0.5, 1.0, 2.0}) {
    for (int sigma : {0, 2}) {
      const ScenarioConfig c = attack_scenario(xi, sigma, 0.99);
      const RunReport r = run_scenario(c);
      const double want = oracle::adess_cost(c.attack.effective_N(), xi, 0.99, 1.0);
      if (!r.attack_succeeded) o.fail(describe({{"xi", xi}, {"sigma", sigma}, {"succeeded", 0}}));
      if (std::abs(r.attacker_cost - want) > kRelTightest * want) {
        o.fail(describe({{"xi", xi}, {"sigma", sigma}, {"cost", r.attacker_cost}, {"oracle", want}}));
      }
    }
  }
  ScenarioConfig s = attack_scenario(1.0, 1, 1.0);
  s.mining.kind = MiningKind::Stochastic;
  s.mining.tick = 0.001;
  s.horizon = 60.0;
  s.record_heads = false;
  const double want = oracle::adess_cost(s.attack.effective_N(), 1.0, 1.0, 1.0);
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    s.seed = seed;
    sum += run_scenario(s).attacker_cost;
  }
  const double mean = sum / 1000.0;
  if (std::abs(mean - want) > kRelSeedMean * want) o.fail(describe({{"stochastic_mean", mean}, {"ce", want}}));
  return o;
}

// ---- AC11 ------------------------------------------------------------------

Outcome latency_split() {
  Outcome o;
  ScenarioConfig c;
  c.protocol = Protocol::Adess;
  c.adess.alpha = c.attack.alpha = 2;
  c.adess.xi = c.attack.xi = 1.0;
  c.attack.sigma = 0;
  c.attack.v = 10.0;
  c.adess.latency_bound = 3.0;
  c.horizon = 40.0;
  c.strategy = {AttackerStrategy::FixedGrowth, 1.0};
  const RunReport plain = latency_split_check(c);
  if (!plain.attack_broadcast || !plain.split_persists) o.fail("no persistent split without acceleration");
  c.strategy = {AttackerStrategy::AcceleratedLatency, 0.0};
  if (latency_split_check(c).split_persists) o.fail("split persists with accelerated rate");

  c.adess.latency_bound = 0.0;
  for (AttackerStrategy kind : {AttackerStrategy::FixedGrowth, AttackerStrategy::AcceleratedLatency}) {
    for (double xi : {0.5, 1.0, 2.0}) {
      for (int n : {2, 4, 7}) {
        ScenarioConfig z = c;
        z.adess.xi = z.attack.xi = xi;
        z.n_honest_nodes = n;
        z.strategy = {kind, xi};
        if (latency_split_check(z).split_persists) {
          o.fail(describe({{"xi", xi}, {"nodes", n}, {"accelerated", kind == AttackerStrategy::AcceleratedLatency}}));
        }
      }
    }
  }
  return o;
}

// ---- AC12 ------------------------------------------------------------------

Outcome malicious_series() {
  Outcome o;
  AttackParams p = unit_params(3, 1, 0.95);
  p.xi = 1.0;
  const int horizon = 40;
  const MaliciousCost a = malicious_cost_series(Protocol::Adess, p, horizon);
  const MaliciousCost n = malicious_cost_series(Protocol::Nakamoto, p, horizon);
  // The ADESS attack ends once K blocks are mined at spacing 1 / (1 + xi).
  const auto K = oracle::blocks_needed(p.effective_N(), p.xi);
  const auto end = static_cast<std::size_t>(std::ceil(static_cast<double>(K) / (1.0 + p.xi)));
  for (std::size_t t = 0; t < a.per_period.size(); ++t) {
    if (t < end && !(a.per_period[t] > 0.0)) o.fail("ADESS period " + std::to_string(t) + " is empty");
    if (t >= end && a.per_period[t] != 0.0) o.fail("ADESS tail nonzero at " + std::to_string(t));
  }
  for (double c : n.per_period) {
    if (c != n.per_period.front()) o.fail("Nakamoto series is not constant");
  }
  const auto orderings = find_pv_orderings(unit_params(3, 0, 0.99), 60);
  if (!orderings) {
    o.fail("no parameter pair with opposite PV orderings");
  } else if (!(orderings->adess_dearer_gap > 0.0 && orderings->nakamoto_dearer_gap < 0.0)) {
    o.fail(describe({{"adess_dearer_gap", orderings->adess_dearer_gap},
                     {"nakamoto_dearer_gap", orderings->nakamoto_dearer_gap}}));
  }
  return o;
}

// ---- AC13 ------------------------------------------------------------------

Outcome security_bound_ratio() {
  Outcome o;
  for (double p : {0.05, 0.3, 0.5, 0.8, 0.95}) {
    double prev = guo_ren_bound_p(1, p, BoundVariant::AbsCorrected);
    if (std::abs(prev - oracle::guo_ren_abs(1, p)) > kRelRatio * prev) o.fail(describe({{"p", p}, {"k1", prev}}));
    for (int k = 2; k <= 40; ++k) {
      const double cur = guo_ren_bound_p(k, p, BoundVariant::AbsCorrected);
      if (!(cur < prev)) o.fail(describe({{"p", p}, {"k", k}, {"not_decreasing", cur}}));
      if (std::abs(cur / prev - (1.0 - p)) > kRelRatio * (1.0 - p)) {
        o.fail(describe({{"p", p}, {"k", k}, {"ratio", cur / prev}}));
      }
      prev = cur;
    }
  }
  for (double p : {0.2, 0.9, 1.0}) {
    try {
      (void)guo_ren_bound_p(3, p, BoundVariant::Literal);
      o.fail(describe({{"literal_accepted_p", p}}));
    } catch (const DomainError&) {
    }
  }
  if (!std::isfinite(guo_ren_bound_p(3, 1.5, BoundVariant::Literal))) o.fail("literal form failed at p = 1.5");
  return o;
}

}  // namespace

int main() {
  report("AC1", "ADESS attack hashrate >= Nakamoto on 500-point grid", 1.0, attack_hashrate_grid);
  report("AC2", "minimum deterring xi gives negative profit at and above it", 1.0, min_xi_deters);
  report("AC3", "every v below v_max is unprofitable; break-even profit is zero", 0.0, safe_value_interval_holds);
  report("AC4", "brute-force plan search picks (0, alpha+sigma, 0)", 0.0, plan_optimum_is_minimal);
  report("AC5", "analytic derivatives match central differences", 0.0, derivatives_match);
  report("AC6", "Nakamoto break-even approaches the undiscounted limit", 0.0, budish_limit);
  report("AC7", "10000 random trees: one canonical head and a never-penalized path", 30.0, fork_choice_fuzz);
  report("AC8", "partial adjustment maps to full at beta*xi; epoch surcharge is c*xi", 0.0, adjustment_mapping);
  report("AC9", "mining mean, certainty equivalent and replay", 0.0, mining_fidelity);
  report("AC10", "simulated attack cost matches closed form; 1000-seed mean within 5%", 60.0, end_to_end_attack);
  report("AC11", "latency split persists only without acceleration", 0.0, latency_split);
  report("AC12", "malicious cost series shapes and both PV orderings", 0.0, malicious_series);
  report("AC13", "security bound decays by (1 - p) per step; literal form rejects p <= 1", 0.0,
         security_bound_ratio);
  std::printf("%d of 13 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

#include "props.hpp"

#include "sweep.hpp"

#include "adess/economics.hpp"
#include "adess/errors.hpp"
#include "adess/fork_choice.hpp"
#include "adess/mining.hpp"
#include "adess/net_sim.hpp"
#include "adess/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

namespace adess::cli {

namespace {

struct Reporter {
  std::ostream& out;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!ok && !detail.empty()) out << " (" << detail << ')';
    out << '\n';
    if (!ok) ++failures;
  }
};

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.next() % n); }

// Random tree: mostly chain extension, with at most `max_forks` fork-blocks.
BlockTree random_tree(Rng& rng, std::size_t blocks, int max_forks) {
  BlockTree tree;
  std::set<BlockId> forks;
  for (std::size_t i = 1; i < blocks; ++i) {
    const std::vector<BlockId> heads(tree.heads().begin(), tree.heads().end());
    BlockId parent = heads[pick(rng, heads.size())];
    if (static_cast<int>(forks.size()) < max_forks && rng.uniform() < 0.08) {
      parent = BlockId{pick(rng, tree.size())};
      if (!tree.children(parent).empty()) forks.insert(parent);
    } else if (!forks.empty() && rng.uniform() < 0.1) {
      const auto it = std::next(forks.begin(), static_cast<long>(pick(rng, forks.size())));
      parent = *it;
    }
    tree.append_block(parent, 1.0 + 0.5 * static_cast<double>(pick(rng, 3)), "m", static_cast<double>(i));
  }
  return tree;
}

void fork_choice_suite(Reporter& r, std::uint64_t seed) {
  Rng rng(seed);
  bool one_head = true;
  bool witness = true;
  bool deterministic = true;
  for (int trial = 0; trial < 300; ++trial) {
    const BlockTree tree = random_tree(rng, 20 + pick(rng, 60), 6);
    AdessParams params;
    params.alpha = 1 + static_cast<int>(pick(rng, 4));
    params.xi = 0.1 + 1.9 * rng.uniform();
    std::vector<BlockId> order;
    for (std::size_t i = 1; i < tree.size(); ++i) order.push_back(BlockId{i});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[pick(rng, i)]);
    NodeView a(tree, params);
    NodeView b(tree, params);
    for (std::size_t i = 0; i < order.size(); ++i) {
      a.observe(order[i], static_cast<double>(i));
      b.observe(order[i], static_cast<double>(i));
      try {
        (void)adess_canonical(a);
      } catch (const InvariantViolation&) {
        one_head = false;
      }
      const auto heads = a.heads();
      witness = witness && std::any_of(heads.begin(), heads.end(), [&](BlockId h) { return !a.ever_penalized(h); });
    }
    deterministic = deterministic && adess_canonical(a).chain == adess_canonical(b).chain &&
                    a.penalties().size() == b.penalties().size();
  }
  r.check("fork-choice: exactly one canonical head on random trees", one_head);
  r.check("fork-choice: a never-penalized chain always exists", witness);
  r.check("fork-choice: identical arrival orders give identical state", deterministic);

  bool equivalent = true;
  for (int trial = 0; trial < 100; ++trial) {
    const BlockTree tree = random_tree(rng, 10 + pick(rng, 40), 6);
    AdessParams params;
    params.alpha = 1 + static_cast<int>(pick(rng, 4));
    NodeView v(tree, params);
    for (std::size_t i = 1; i < tree.size(); ++i) {
      v.observe(BlockId{i}, static_cast<double>(i));
      if (v.penalties().empty()) equivalent = equivalent && adess_canonical(v).chain == nakamoto_canonical(v);
    }
  }
  r.check("fork-choice: without penalties ADESS agrees with Nakamoto", equivalent);
}

void economics_suite(Reporter& r) {
  AttackParams p;
  p.c = p.p_B = 1.0;
  p.delta = 0.999;
  p.alpha = 4;
  p.sigma = 1;
  p.v = 50.0;

  bool concave_decreasing = true;
  const int N = p.effective_N();
  for (double xi = 1.0 / (N - 1) + 0.01; xi < 3.0; xi += 0.01) {
    if (ceil_blocks(N * (1.0 + xi)) != ceil_blocks(N * (1.0 + xi + 0.01))) continue;
    concave_decreasing = concave_decreasing && penalty_margin(xi, N, p.delta, p.c, p.p_B) < 0.0 &&
                         penalty_margin_slope(xi, N, p.delta, p.c) < 0.0;
  }
  r.check("economics: profit decreasing and concave in xi between jumps", concave_decreasing);

  bool monotone_v = true;
  double prev = 0.0;
  for (double xi = 0.05; xi <= 3.0; xi += 0.05) {
    const double v = safe_value_interval(xi, p);
    monotone_v = monotone_v && v >= prev;
    prev = v;
  }
  r.check("economics: safe value bound non-decreasing in xi", monotone_v);

  bool budish = true;
  for (int n = 1; n <= 10; ++n) {
    AttackParams q;
    q.N = n;
    q.c = 1.2;
    q.p_B = 1.0;
    q.epsilon_extra = 0.2;
    q.delta = 1.0 - 1e-6;
    const double expect = nakamoto_min_profitable_v(q);
    budish = budish && std::abs(nakamoto_break_even_v(q) - expect) <= 1e-3 * std::abs(expect);
  }
  r.check("economics: Nakamoto break-even converges to the delta -> 1 limit", budish);

  bool deterred = true;
  for (double v : {0.1, 1.0, 10.0, 100.0, 1e4}) {
    const double xs = min_deterring_xi(v, p);
    AttackParams q = p;
    q.v = v;
    q.xi = xs;
    deterred = deterred && adess_attack_profit(q).profit < 0.0;
  }
  r.check("economics: a deterring xi exists for every tested value", deterred);
}

void mining_suite(Reporter& r, std::uint64_t seed) {
  MiningMode mode;
  mode.kind = MiningKind::Stochastic;
  Rng rng(seed);
  double total = 0.0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) total += next_block_time(1.0, 1.0, mode, rng);
  r.check("mining: stochastic mean block time within 2% of D/h", std::abs(total / samples - 1.0) < 0.02);

  bool mapping = true;
  for (double beta : {0.25, 0.5, 1.0}) {
    for (double xi : {0.2, 0.5, 1.0, 2.0}) {
      const double a = sustain_cost(xi, 12, DifficultyRule::partial(beta), 1.0);
      const double b = sustain_cost(beta * xi, 12, DifficultyRule::full(), 1.0);
      mapping = mapping && std::abs(a - b) <= 1e-9 * std::abs(b);
    }
  }
  r.check("mining: partial adjustment equals full adjustment at beta * xi", mapping);
}

void net_sim_suite(Reporter& r, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.adess.alpha = 3;
  cfg.adess.xi = 1.0;
  cfg.attack.alpha = 3;
  cfg.attack.sigma = 1;
  cfg.attack.xi = 1.0;
  cfg.horizon = 30.0;
  cfg.seed = seed;
  const RunReport rep = run_scenario(cfg);
  const double expect = adess_attack_cost(cfg.attack.effective_N(), cfg.attack.xi, cfg.attack.delta, cfg.attack.c);
  r.check("net-sim: certainty-equivalent attacker cost matches the closed form",
          std::abs(rep.attacker_cost - expect) <= 1e-9 * expect);
  r.check("net-sim: optimal attacker succeeds under ADESS with zero latency", rep.attack_succeeded);

  bool safe = true;
  for (const HeadSample& s : rep.head_series) {
    if (s.node != 0 || !rep.attacker_root) continue;
    const bool on_a = rep.tree.is_ancestor(*rep.attacker_root, s.head);
    if (on_a && (!rep.boundary_crossing_time || s.time < *rep.boundary_crossing_time)) safe = false;
  }
  r.check("net-sim: victim never adopts the attacker chain before the boundary", safe);

  std::map<double, std::map<int, BlockId>> at;
  for (const HeadSample& s : rep.head_series) at[s.time][s.node] = s.head;
  std::map<int, BlockId> current;
  bool agree = true;
  for (const auto& [t, changes] : at) {
    for (const auto& [node, head] : changes) current[node] = head;
    std::set<BlockId> distinct;
    for (const auto& [node, head] : current) distinct.insert(head);
    agree = agree && distinct.size() == 1;
  }
  r.check("net-sim: zero latency keeps all honest nodes in agreement", agree);

  ScenarioConfig stoch = cfg;
  stoch.mining.kind = MiningKind::Stochastic;
  const RunReport x = run_scenario(stoch);
  const RunReport y = run_scenario(stoch);
  r.check("net-sim: identical seed gives identical reports",
          x.attacker_cost == y.attacker_cost && x.final_heads == y.final_heads && x.tree.size() == y.tree.size());
}

}  // namespace

const std::vector<std::string>& property_suites() {
  static const std::vector<std::string> names{"fork-choice", "economics", "mining", "net-sim", "all"};
  return names;
}

int run_property_suite(const std::string& suite, std::uint64_t seed, std::ostream& out) {
  const auto& names = property_suites();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw UsageError("check-props: unknown suite '" + suite + "'");
  }
  Reporter r{out};
  const bool all = suite == "all";
  if (all || suite == "fork-choice") fork_choice_suite(r, seed);
  if (all || suite == "economics") economics_suite(r);
  if (all || suite == "mining") mining_suite(r, seed);
  if (all || suite == "net-sim") net_sim_suite(r, seed);
  out << (r.failures == 0 ? "all properties hold" : std::to_string(r.failures) + " properties failed") << '\n';
  return r.failures;
}

}  // namespace adess::cli

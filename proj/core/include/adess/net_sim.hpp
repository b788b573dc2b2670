#pragma once

#include "adess/chain.hpp"
#include "adess/economics.hpp"
#include "adess/fork_choice.hpp"
#include "adess/mining.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adess {

enum class AttackerStrategy {
  None,                // no attacker; honest mining only
  PaperOptimal,        // see run_scenario
  FixedGrowth,         // grow at 1 + growth, broadcast at the boundary, keep mining
  AcceleratedLatency,  // grow at accelerated_rate, broadcast with a latency margin
};

[[nodiscard]] const char* to_string(AttackerStrategy s) noexcept;

struct StrategyConfig {
  AttackerStrategy kind = AttackerStrategy::PaperOptimal;
  double growth = 0.0;  // FixedGrowth only
};

// Broadcast visibility filters, by honest node index.
struct EclipseConfig {
  std::vector<int> hidden_from_attacker;  // never receive attacker broadcasts
  std::vector<int> hidden_from_honest;    // never receive blocks mined by other honest nodes
};

// Honest nodes are 0 .. n_honest_nodes-1 and share one unit of hashrate
// equally; node 0 is the victim. Index n_honest_nodes denotes the attacker in
// delay_matrix. The attacker forks genesis at time 0.
struct ScenarioConfig {
  Protocol protocol = Protocol::Adess;
  AdessParams adess;     // rule enforced by the nodes
  AttackParams attack;   // attacker economics and plan; alpha/sigma also drive the victim
  MiningMode mining;
  DifficultyRule difficulty;
  int n_honest_nodes = 4;
  double delay = 0.0;                             // uniform link delay
  std::vector<std::vector<double>> delay_matrix;  // optional, (n+1) x (n+1), [sender][receiver]
  StrategyConfig strategy;
  EclipseConfig eclipse;
  double horizon = 50.0;
  std::uint64_t seed = 0;
  std::optional<double> late_join_time;  // adds an observer that syncs in bulk at this time
  bool record_heads = true;              // keep the per-node head time series

  [[nodiscard]] double link_delay(int sender, int receiver) const;
  void validate() const;  // throws ConfigError
};

struct HeadSample {
  double time = 0.0;
  int node = 0;
  BlockId head;
  std::uint32_t height = 0;
};

struct LateJoinReport {
  double join_time = 0.0;
  CanonicalStatus status_at_join = CanonicalStatus::Decided;
  BlockId adess_head_at_join;
  BlockId nakamoto_head_at_join;
  CanonicalStatus status_at_horizon = CanonicalStatus::Decided;
  BlockId adess_head_at_horizon;
  BlockId nakamoto_head_at_horizon;
};

struct RunReport {
  Protocol protocol = Protocol::Adess;
  std::uint64_t seed = 0;
  double horizon = 0.0;

  bool attack_broadcast = false;
  bool attack_succeeded = false;  // victim conveyed and ends on the attacker branch
  std::optional<double> conveyance_time;
  std::optional<double> broadcast_time;
  std::optional<double> boundary_crossing_time;  // victim first adopts the attacker branch
  std::optional<BlockId> tx_block;
  std::optional<BlockId> attacker_root;  // first attacker block
  double attacker_cost = 0.0;            // discounted
  double attacker_revenue = 0.0;         // discounted
  std::int64_t attacker_blocks = 0;
  bool split_persists = false;

  std::vector<BlockId> final_heads;  // per honest node
  std::vector<HeadSample> head_series;
  std::vector<std::string> penalty_ledgers;  // per honest node
  std::optional<LateJoinReport> late_join;
  BlockTree tree;

  // Key-value sections followed by the tree snapshot.
  void write_text(std::ostream& os) const;
  // time,node,head,height
  void write_head_csv(std::ostream& os) const;
};

// Runs the event loop to the horizon. Honest nodes mine on their canonical
// head. Attacker strategies:
//   PaperOptimal, ADESS: grow at 1 + xi for ceil(N (1 + xi)) blocks, then stop;
//     broadcast once those blocks exist and the victim has conveyed.
//   PaperOptimal, Nakamoto: mine at the incumbent pace for N blocks, then with
//     1 + epsilon_extra hashrate until heavier; broadcast once heavier and the
//     victim has conveyed.
//   FixedGrowth: grow at 1 + growth; broadcast when len_A >= (1 + xi) len_IC
//     and the victim has conveyed; afterwards publish each block at once.
//   AcceleratedLatency: grow at accelerated_rate(xi, N, latency); broadcast
//     when len_A >= (1 + xi)(len_IC + latency).
// The victim conveys when its canonical chain holds the transaction block (the
// first honest block at height sigma + 1) and reaches height sigma + alpha.
[[nodiscard]] RunReport run_scenario(const ScenarioConfig& cfg);

// 1 + xi + (delay / N)(1 + xi)
[[nodiscard]] double accelerated_rate(double xi, int N, double delay);

// Splits the honest nodes in two halves. The half holding the victim hears the
// attacker instantly; the other half hears it `latency_bound` later. Honest
// links are instantaneous. Runs the scenario with the configured strategy.
[[nodiscard]] RunReport latency_split_check(const ScenarioConfig& cfg);

// Runs the scenario with an observer that joins at `join_time` and syncs the
// victim's blocks without arrival order.
[[nodiscard]] LateJoinReport disconnected_node_probe(const ScenarioConfig& cfg, double join_time);

}  // namespace adess

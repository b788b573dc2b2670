#include "adess/net_sim.hpp"

#include "adess/errors.hpp"
#include "adess/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace adess {

const char* to_string(AttackerStrategy s) noexcept {
  switch (s) {
    case AttackerStrategy::None: return "none";
    case AttackerStrategy::PaperOptimal: return "optimal";
    case AttackerStrategy::FixedGrowth: return "fixed-growth";
    case AttackerStrategy::AcceleratedLatency: return "accelerated";
  }
  return "?";
}

double ScenarioConfig::link_delay(int sender, int receiver) const {
  if (!delay_matrix.empty()) {
    return delay_matrix[static_cast<std::size_t>(sender)][static_cast<std::size_t>(receiver)];
  }
  return sender == receiver ? 0.0 : delay;
}

void ScenarioConfig::validate() const {
  adess.validate();
  attack.validate();
  mining.validate();
  difficulty.validate();
  if (n_honest_nodes < 1) throw ConfigError("n_honest_nodes must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be a positive number");
  if (!(delay >= 0.0) || !std::isfinite(delay)) throw ConfigError("delay must be >= 0");
  const double bound = adess.latency_bound + kBlockCountSlack;
  if (delay > bound) {
    throw ConfigError("delay " + format_double(delay) + " exceeds adess.latency_bound " +
                      format_double(adess.latency_bound));
  }
  if (!delay_matrix.empty()) {
    const auto size = static_cast<std::size_t>(n_honest_nodes) + 1;
    if (delay_matrix.size() != size) throw ConfigError("delay_matrix must have n_honest_nodes + 1 rows");
    for (const auto& row : delay_matrix) {
      if (row.size() != size) throw ConfigError("delay_matrix must have n_honest_nodes + 1 columns");
      for (double d : row) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("delay_matrix entries must be >= 0");
        if (d > bound) throw ConfigError("delay_matrix entry exceeds adess.latency_bound");
      }
    }
  }
  if (strategy.kind == AttackerStrategy::FixedGrowth && !(strategy.growth > -1.0)) {
    throw ConfigError("strategy.growth must exceed -1");
  }
  for (const auto* set : {&eclipse.hidden_from_attacker, &eclipse.hidden_from_honest}) {
    for (int i : *set) {
      if (i < 0 || i >= n_honest_nodes) throw ConfigError("eclipse node index out of range");
    }
  }
  if (late_join_time && (!(*late_join_time >= 0.0) || *late_join_time > horizon)) {
    throw ConfigError("late_join_time must lie in [0, horizon]");
  }
}

double accelerated_rate(double xi, int N, double delay) {
  if (N < 1) throw DomainError("N must be >= 1");
  return 1.0 + xi + (delay / N) * (1.0 + xi);
}

namespace {

enum class EventKind { Arrival, HonestMined, AttackerMined, LateJoin };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Arrival;
  int node = 0;
  BlockId block;
  std::uint64_t gen = 0;
};

struct LaterFirst {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

// Difficulty track carried by each block: what its child must meet.
struct BlockMeta {
  double next_difficulty = 1.0;
  EpochHistory epoch;
  bool attacker = false;
};

struct HonestJob {
  int miners = 0;
  int first_node = 0;
  double difficulty = 1.0;
  double remaining = 0.0;  // certainty-equivalent work left
  double last_update = 0.0;
  std::uint64_t gen = 0;
};

struct AttackerJob {
  double hashrate = 0.0;
  double start = 0.0;
  std::uint64_t gen = 0;
};

class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& cfg)
      : cfg_(cfg), n_(cfg.n_honest_nodes), tree_(1.0, 0.0, "genesis"), rng_(cfg.seed) {
    meta_.push_back(BlockMeta{});
    views_.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) views_.emplace_back(tree_, cfg_.adess);
    heads_.assign(static_cast<std::size_t>(n_), tree_.genesis());
    hidden_from_attacker_.insert(cfg.eclipse.hidden_from_attacker.begin(), cfg.eclipse.hidden_from_attacker.end());
    hidden_from_honest_.insert(cfg.eclipse.hidden_from_honest.begin(), cfg.eclipse.hidden_from_honest.end());
    N_ = cfg_.attack.effective_N();
    K_ = ceil_blocks(N_ * (1.0 + cfg_.attack.xi));
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  RunReport run() {
    report_.protocol = cfg_.protocol;
    report_.seed = cfg_.seed;
    report_.horizon = cfg_.horizon;

    for (int i = 0; i < n_; ++i) record_head(i);
    if (cfg_.late_join_time) {
      if (*cfg_.late_join_time <= 0.0) {
        join_late(false);
      } else {
        push(Event{*cfg_.late_join_time, 0, EventKind::LateJoin, 0, BlockId{}, 0});
      }
    }
    reassign();
    if (attacker_wants_block()) start_attacker_job();

    while (!queue_.empty() && queue_.top().time <= cfg_.horizon) {
      const Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EventKind::Arrival: on_arrival(ev.node, ev.block); break;
        case EventKind::HonestMined: on_honest_mined(ev.block, ev.gen); break;
        case EventKind::AttackerMined: on_attacker_mined(ev.gen); break;
        case EventKind::LateJoin: join_late(true); break;
      }
      maybe_broadcast();
      reassign();
    }
    now_ = cfg_.horizon;
    if (attacker_job_) {
      accrue_attacker_cost(*attacker_job_, now_);
      attacker_job_.reset();
    }
    finish();
    return std::move(report_);
  }

 private:
  void push(Event ev) {
    ev.seq = ++seq_;
    queue_.push(ev);
  }

  [[nodiscard]] bool in_attacker_branch(BlockId head) const {
    return attacker_root_ && tree_.is_ancestor(*attacker_root_, head);
  }

  void record_head(int node) {
    if (!cfg_.record_heads) return;
    const BlockId h = heads_[static_cast<std::size_t>(node)];
    report_.head_series.push_back(HeadSample{now_, node, h, tree_.block(h).height});
  }

  // ---- honest side ---------------------------------------------------------

  void update_head(int node) {
    auto& slot = heads_[static_cast<std::size_t>(node)];
    const BlockId next = canonical(views_[static_cast<std::size_t>(node)], cfg_.protocol).head;
    if (next != slot) {
      slot = next;
      record_head(node);
      if (node == 0 && !report_.boundary_crossing_time && in_attacker_branch(next)) {
        report_.boundary_crossing_time = now_;
      }
    }
    if (node == 0) check_conveyance();
  }

  void check_conveyance() {
    if (report_.conveyance_time || !report_.tx_block) return;
    const BlockId head = heads_[0];
    const auto need = static_cast<std::uint32_t>(cfg_.attack.sigma + cfg_.attack.alpha);
    if (tree_.block(head).height >= need && tree_.is_ancestor(*report_.tx_block, head)) {
      report_.conveyance_time = now_;
    }
  }

  void on_arrival(int node, BlockId block) {
    if (node < n_) {
      views_[static_cast<std::size_t>(node)].observe(block, now_);
      update_head(node);
    } else if (node == n_) {
      if (in_attacker_branch(block)) return;
      const Block& b = tree_.block(block);
      seen_honest_height_ = std::max(seen_honest_height_, b.height);
      seen_honest_cumdiff_ = std::max(seen_honest_cumdiff_, tree_.cumulative_difficulty(block));
      if (!attacker_job_ && attacker_wants_block()) start_attacker_job();
    } else if (late_) {
      late_->observe(block, now_);
    }
  }

  void reassign() {
    std::map<BlockId, std::pair<int, int>> wanted;  // head -> (miners, first node)
    for (int i = 0; i < n_; ++i) {
      auto [it, fresh] = wanted.try_emplace(heads_[static_cast<std::size_t>(i)], 0, i);
      ++it->second.first;
    }
    for (auto it = jobs_.begin(); it != jobs_.end();) {
      it = wanted.contains(it->first) ? std::next(it) : jobs_.erase(it);
    }
    for (const auto& [head, want] : wanted) {
      auto it = jobs_.find(head);
      if (it != jobs_.end() && it->second.miners == want.first) continue;
      HonestJob job;
      if (it != jobs_.end()) {
        job = it->second;
        const double old_rate = static_cast<double>(job.miners) / n_;
        job.remaining = std::max(0.0, job.remaining - old_rate * (now_ - job.last_update));
      } else {
        job.difficulty = meta_[head.value].next_difficulty;
        job.remaining = job.difficulty;
      }
      job.miners = want.first;
      job.first_node = want.second;
      job.last_update = now_;
      job.gen = ++gen_;
      const double rate = static_cast<double>(job.miners) / n_;
      double dt = 0.0;
      if (cfg_.mining.kind == MiningKind::CertaintyEquivalent) {
        dt = job.remaining / rate;
      } else {
        dt = next_block_time(job.difficulty, rate, cfg_.mining, rng_);
      }
      jobs_[head] = job;
      push(Event{now_ + dt, 0, EventKind::HonestMined, 0, head, job.gen});
    }
  }

  BlockMeta child_meta(BlockId parent, BlockId child, double applied_hashrate) {
    const Block& b = tree_.block(child);
    BlockMeta m;
    m.epoch = meta_[parent.value].epoch;
    const double block_time = b.created_at - tree_.block(parent).created_at;
    double implied = applied_hashrate;
    if (cfg_.mining.implied == ImpliedHashrate::Observed && block_time > 0.0) implied = b.difficulty / block_time;
    m.next_difficulty = adjust_difficulty(b.difficulty, implied, cfg_.difficulty, m.epoch, block_time);
    return m;
  }

  void on_honest_mined(BlockId parent, std::uint64_t gen) {
    auto it = jobs_.find(parent);
    if (it == jobs_.end() || it->second.gen != gen) return;
    const HonestJob job = it->second;
    jobs_.erase(it);

    const BlockId b = tree_.append_block(parent, job.difficulty, "honest", now_);
    meta_.push_back(child_meta(parent, b, static_cast<double>(job.miners) / n_));
    const auto tx_height = static_cast<std::uint32_t>(cfg_.attack.sigma + 1);
    if (!report_.tx_block && tree_.block(b).height == tx_height) report_.tx_block = b;

    if (cfg_.strategy.kind != AttackerStrategy::None) {
      const double to_attacker = cfg_.link_delay(job.first_node, n_);
      if (to_attacker == 0.0) {
        on_arrival(n_, b);
      } else {
        push(Event{now_ + to_attacker, 0, EventKind::Arrival, n_, b});
      }
    }
    std::vector<int> miners;
    for (int i = 0; i < n_; ++i) {
      if (heads_[static_cast<std::size_t>(i)] == parent) miners.push_back(i);
    }
    for (int i : miners) {
      views_[static_cast<std::size_t>(i)].observe(b, now_);
      update_head(i);
    }
    for (int j = 0; j < n_; ++j) {
      if (std::find(miners.begin(), miners.end(), j) != miners.end()) continue;
      if (hidden_from_honest_.contains(j)) continue;
      push(Event{now_ + cfg_.link_delay(job.first_node, j), 0, EventKind::Arrival, j, b});
    }
    if (cfg_.late_join_time) push(Event{now_ + cfg_.delay, 0, EventKind::Arrival, n_ + 1, b});
  }

  // ---- attacker side ---------------------------------------------------------

  [[nodiscard]] bool attacker_wants_block() const {
    switch (cfg_.strategy.kind) {
      case AttackerStrategy::None: return false;
      case AttackerStrategy::PaperOptimal:
        if (cfg_.protocol == Protocol::Adess) return attacker_blocks_ < K_;
        // Keep racing until the private branch is strictly heavier than the incumbent.
        return !report_.attack_broadcast ||
               tree_.cumulative_difficulty(attacker_head_) <= seen_honest_cumdiff_;
      case AttackerStrategy::FixedGrowth:
      case AttackerStrategy::AcceleratedLatency: return true;
    }
    return false;
  }

  [[nodiscard]] double attacker_hashrate(double difficulty) const {
    const double target = cfg_.difficulty.target_block_time;
    double growth = 0.0;
    switch (cfg_.strategy.kind) {
      case AttackerStrategy::None: return 0.0;
      case AttackerStrategy::PaperOptimal:
        if (cfg_.protocol == Protocol::Adess) {
          growth = cfg_.attack.xi;
        } else {
          growth = attacker_blocks_ < N_ ? 0.0 : cfg_.attack.epsilon_extra;
        }
        break;
      case AttackerStrategy::FixedGrowth: growth = cfg_.strategy.growth; break;
      case AttackerStrategy::AcceleratedLatency:
        growth = accelerated_rate(cfg_.attack.xi, N_, cfg_.attack.latency) - 1.0;
        break;
    }
    return difficulty * (1.0 + growth) / target;
  }

  void start_attacker_job() {
    const double d = meta_[attacker_head_.value].next_difficulty;
    const double h = attacker_hashrate(d);
    const double dt = next_block_time(d, h, cfg_.mining, rng_);
    attacker_job_ = AttackerJob{h, now_, ++gen_};
    if (std::isfinite(dt)) push(Event{now_ + dt, 0, EventKind::AttackerMined, n_, BlockId{}, attacker_job_->gen});
  }

  void accrue_attacker_cost(const AttackerJob& job, double until) {
    report_.attacker_cost +=
        cfg_.attack.c * job.hashrate * (until - job.start) * std::pow(cfg_.attack.delta, job.start);
  }

  void on_attacker_mined(std::uint64_t gen) {
    if (!attacker_job_ || attacker_job_->gen != gen) return;
    const AttackerJob job = *attacker_job_;
    attacker_job_.reset();
    accrue_attacker_cost(job, now_);

    const BlockId parent = attacker_head_;
    const BlockId b = tree_.append_block(parent, meta_[parent.value].next_difficulty, "attacker", now_);
    BlockMeta m = child_meta(parent, b, job.hashrate);
    m.attacker = true;
    meta_.push_back(m);
    attacker_head_ = b;
    ++attacker_blocks_;
    if (!attacker_root_) {
      attacker_root_ = b;
      report_.attacker_root = b;
    }
    if (report_.attack_broadcast) {
      publish(b);
    } else {
      unpublished_.push_back(b);
    }
    maybe_broadcast();
    if (attacker_wants_block()) start_attacker_job();
  }

  void publish(BlockId b) {
    for (int j = 0; j < n_; ++j) {
      if (hidden_from_attacker_.contains(j)) continue;
      push(Event{now_ + cfg_.link_delay(n_, j), 0, EventKind::Arrival, j, b});
    }
    if (cfg_.late_join_time) push(Event{now_ + cfg_.delay, 0, EventKind::Arrival, n_ + 1, b});
  }

  void maybe_broadcast() {
    if (report_.attack_broadcast || !report_.conveyance_time || attacker_blocks_ == 0) return;
    const auto len_a = static_cast<std::int64_t>(tree_.block(attacker_head_).height);
    const auto len_ic = static_cast<double>(seen_honest_height_);
    const double u = 1.0 + cfg_.attack.xi;
    bool go = false;
    switch (cfg_.strategy.kind) {
      case AttackerStrategy::None: return;
      case AttackerStrategy::PaperOptimal:
        if (cfg_.protocol == Protocol::Adess) {
          go = attacker_blocks_ >= K_;
        } else {
          go = tree_.cumulative_difficulty(attacker_head_) > seen_honest_cumdiff_;
        }
        break;
      case AttackerStrategy::FixedGrowth: go = meets_block_requirement(len_a, u * len_ic); break;
      case AttackerStrategy::AcceleratedLatency:
        go = meets_block_requirement(len_a, u * (len_ic + cfg_.attack.latency));
        break;
    }
    if (!go) return;
    report_.attack_broadcast = true;
    report_.broadcast_time = now_;
    for (BlockId b : unpublished_) publish(b);
    unpublished_.clear();
    if (!attacker_wants_block() && attacker_job_) {
      accrue_attacker_cost(*attacker_job_, now_);
      attacker_job_.reset();
    }
  }

  // ---- late joiner -------------------------------------------------------------

  void join_late(bool bulk) {
    late_.emplace(tree_, cfg_.adess);
    if (bulk) {
      std::vector<BlockId> known;
      for (std::size_t i = 1; i < tree_.size(); ++i) {
        if (views_[0].has_connected(BlockId{i})) known.push_back(BlockId{i});
      }
      late_->bulk_sync(known, now_);
    }
    LateJoinReport r;
    r.join_time = now_;
    const CanonicalChoice choice = adess_canonical(*late_);
    r.status_at_join = choice.status;
    r.adess_head_at_join = choice.chain.head;
    r.nakamoto_head_at_join = nakamoto_canonical(*late_).head;
    report_.late_join = r;
  }

  // ---- wrap-up -----------------------------------------------------------------

  void finish() {
    report_.attacker_blocks = attacker_blocks_;
    report_.final_heads = heads_;
    const bool victim_on_a = in_attacker_branch(heads_[0]);
    report_.attack_succeeded = report_.conveyance_time.has_value() && victim_on_a;
    if (report_.attack_succeeded && report_.broadcast_time) {
      std::int64_t rewarded = 0;
      for (std::optional<BlockId> cur = heads_[0]; cur; cur = tree_.block(*cur).parent) {
        if (meta_[cur->value].attacker) ++rewarded;
      }
      report_.attacker_revenue = std::pow(cfg_.attack.delta, *report_.broadcast_time) *
                                 (cfg_.attack.v + cfg_.attack.p_B * static_cast<double>(rewarded));
    }
    std::set<BlockId> branches;
    for (BlockId h : heads_) {
      if (tree_.block(h).height >= 1) branches.insert(tree_.ancestor_at_height(h, 1));
    }
    report_.split_persists = branches.size() > 1;
    for (const NodeView& v : views_) {
      std::ostringstream os;
      v.write_penalty_ledger(os);
      report_.penalty_ledgers.push_back(os.str());
    }
    if (late_ && report_.late_join) {
      const CanonicalChoice choice = adess_canonical(*late_);
      report_.late_join->status_at_horizon = choice.status;
      report_.late_join->adess_head_at_horizon = choice.chain.head;
      report_.late_join->nakamoto_head_at_horizon = nakamoto_canonical(*late_).head;
    }
    report_.tree = tree_;
  }

  const ScenarioConfig& cfg_;
  int n_;
  BlockTree tree_;
  std::vector<BlockMeta> meta_;
  std::vector<NodeView> views_;
  std::optional<NodeView> late_;
  std::vector<BlockId> heads_;
  std::set<int> hidden_from_attacker_;
  std::set<int> hidden_from_honest_;
  Rng rng_;

  std::priority_queue<Event, std::vector<Event>, LaterFirst> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t gen_ = 0;
  double now_ = 0.0;
  std::map<BlockId, HonestJob> jobs_;

  int N_ = 1;
  std::int64_t K_ = 1;
  BlockId attacker_head_;
  std::optional<BlockId> attacker_root_;
  std::int64_t attacker_blocks_ = 0;
  std::optional<AttackerJob> attacker_job_;
  std::vector<BlockId> unpublished_;
  std::uint32_t seen_honest_height_ = 0;
  double seen_honest_cumdiff_ = 1.0;

  RunReport report_;
};

std::string opt_time(const std::optional<double>& t) { return t ? format_double(*t) : std::string("-"); }

std::string opt_block(const std::optional<BlockId>& b) { return b ? to_string(*b) : std::string("-"); }

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Simulator sim(cfg);
  return sim.run();
}

RunReport latency_split_check(const ScenarioConfig& cfg) {
  if (cfg.protocol != Protocol::Adess) throw ConfigError("latency split check needs protocol adess");
  if (cfg.n_honest_nodes < 2) throw ConfigError("latency split check needs at least two honest nodes");
  ScenarioConfig c = cfg;
  const double d = cfg.adess.latency_bound;
  const int n = cfg.n_honest_nodes;
  const int near = (n + 1) / 2;
  c.delay = 0.0;
  c.delay_matrix.assign(static_cast<std::size_t>(n + 1), std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  for (int j = near; j < n; ++j) c.delay_matrix[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] = d;
  c.attack.latency = d;
  return run_scenario(c);
}

LateJoinReport disconnected_node_probe(const ScenarioConfig& cfg, double join_time) {
  ScenarioConfig c = cfg;
  c.late_join_time = join_time;
  RunReport r = run_scenario(c);
  return *r.late_join;
}

void RunReport::write_text(std::ostream& os) const {
  os << "[run]\n"
     << "protocol=" << to_string(protocol) << '\n'
     << "seed=" << seed << '\n'
     << "horizon=" << format_double(horizon) << '\n'
     << "attack_broadcast=" << (attack_broadcast ? 1 : 0) << '\n'
     << "attack_succeeded=" << (attack_succeeded ? 1 : 0) << '\n'
     << "conveyance_time=" << opt_time(conveyance_time) << '\n'
     << "broadcast_time=" << opt_time(broadcast_time) << '\n'
     << "boundary_crossing_time=" << opt_time(boundary_crossing_time) << '\n'
     << "tx_block=" << opt_block(tx_block) << '\n'
     << "attacker_root=" << opt_block(attacker_root) << '\n'
     << "attacker_cost=" << format_double(attacker_cost) << '\n'
     << "attacker_revenue=" << format_double(attacker_revenue) << '\n'
     << "attacker_profit=" << format_double(attacker_revenue - attacker_cost) << '\n'
     << "attacker_blocks=" << attacker_blocks << '\n'
     << "split_persists=" << (split_persists ? 1 : 0) << '\n';
  os << "\n[heads]\n";
  for (std::size_t i = 0; i < final_heads.size(); ++i) {
    os << "node=" << i << " head=" << final_heads[i].value << " height=" << tree.block(final_heads[i]).height
       << '\n';
  }
  for (std::size_t i = 0; i < penalty_ledgers.size(); ++i) {
    os << "\n[penalties node=" << i << "]\n" << penalty_ledgers[i];
  }
  if (late_join) {
    os << "\n[late_join]\n"
       << "join_time=" << format_double(late_join->join_time) << '\n'
       << "status_at_join=" << to_string(late_join->status_at_join) << '\n'
       << "adess_head_at_join=" << late_join->adess_head_at_join.value << '\n'
       << "nakamoto_head_at_join=" << late_join->nakamoto_head_at_join.value << '\n'
       << "status_at_horizon=" << to_string(late_join->status_at_horizon) << '\n'
       << "adess_head_at_horizon=" << late_join->adess_head_at_horizon.value << '\n'
       << "nakamoto_head_at_horizon=" << late_join->nakamoto_head_at_horizon.value << '\n';
  }
  os << "\n[tree]\n";
  tree.write_snapshot(os);
}

void RunReport::write_head_csv(std::ostream& os) const {
  os << "time,node,head,height\n";
  for (const HeadSample& s : head_series) {
    os << format_double(s.time) << ',' << s.node << ',' << s.head.value << ',' << s.height << '\n';
  }
}

}  // namespace adess

#include "adess/fork_choice.hpp"

#include "adess/errors.hpp"
#include "adess/numeric.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

namespace adess {

const char* to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::Nakamoto: return "nakamoto";
    case Protocol::Adess: return "adess";
  }
  return "?";
}

const char* to_string(CanonicalStatus s) noexcept {
  switch (s) {
    case CanonicalStatus::Decided: return "decided";
    case CanonicalStatus::UndecidablePendingInference: return "undecidable-pending-inference";
    case CanonicalStatus::Inferred: return "inferred";
  }
  return "?";
}

void AdessParams::validate() const {
  if (alpha < 1) throw ConfigError("adess.alpha must be >= 1");
  if (!(xi > 0.0)) throw ConfigError("adess.xi must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("adess.epsilon must be > 0");
  if (!(latency_bound >= 0.0)) throw ConfigError("adess.latency_bound must be >= 0");
}

// ---------------------------------------------------------------------------
// ObservationLog

void ObservationLog::append(BlockId id, double arrival) {
  if (!entries_.empty() && arrival < entries_.back().arrival) {
    throw InvalidTimestamp("arrival " + format_double(arrival) + " precedes previous arrival " +
                           format_double(entries_.back().arrival));
  }
  if (contains(id)) return;
  if (index_.size() <= id.value) index_.resize(id.value + 1, static_cast<std::size_t>(-1));
  index_[id.value] = entries_.size();
  entries_.push_back(Observation{id, arrival});
}

std::optional<std::size_t> ObservationLog::index_of(BlockId id) const {
  if (id.value >= index_.size() || index_[id.value] == static_cast<std::size_t>(-1)) return std::nullopt;
  return index_[id.value];
}

// ---------------------------------------------------------------------------
// NodeView

NodeView::NodeView(const BlockTree& tree, AdessParams params) : tree_(&tree), params_(params) {
  params_.validate();
  const Block& g = tree.block(tree.genesis());
  now_ = g.created_at;
  connect(g.id, g.created_at, true);
}

NodeView::PerBlock& NodeView::slot(BlockId id) {
  if (blocks_.size() <= id.value) blocks_.resize(id.value + 1);
  return blocks_[id.value];
}

const NodeView::PerBlock* NodeView::find(BlockId id) const noexcept {
  if (id.value >= blocks_.size()) return nullptr;
  return &blocks_[id.value];
}

bool NodeView::has_connected(BlockId id) const noexcept {
  const PerBlock* p = find(id);
  return p != nullptr && p->connected;
}

std::size_t NodeView::buffered_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [parent, kids] : orphans_) n += kids.size();
  return n;
}

void NodeView::observe(BlockId id, double arrival) {
  const Block& b = tree_->block(id);
  if (has_connected(id)) return;
  if (b.parent) {
    auto it = orphans_.find(*b.parent);
    if (it != orphans_.end() &&
        std::any_of(it->second.begin(), it->second.end(), [&](const auto& e) { return e.first == id; })) {
      return;
    }
  }
  if (arrival < now_) {
    throw InvalidTimestamp("arrival " + format_double(arrival) + " precedes node clock " + format_double(now_));
  }
  now_ = arrival;
  ++event_seq_;

  if (b.parent && !has_connected(*b.parent)) {
    orphans_[*b.parent].emplace_back(id, arrival);
    return;
  }
  std::vector<BlockId> ready{id};
  while (!ready.empty()) {
    const BlockId next = ready.back();
    ready.pop_back();
    connect(next, arrival, true);
    auto it = orphans_.find(next);
    if (it != orphans_.end()) {
      // Reverse so that children connect in the order they were delivered.
      for (auto r = it->second.rbegin(); r != it->second.rend(); ++r) ready.push_back(r->first);
      orphans_.erase(it);
    }
  }
}

void NodeView::bulk_sync(std::span<const BlockId> ids, double arrival) {
  if (arrival < now_) {
    throw InvalidTimestamp("bulk sync at " + format_double(arrival) + " precedes node clock " + format_double(now_));
  }
  now_ = arrival;
  ++event_seq_;
  std::vector<BlockId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  for (BlockId id : sorted) {
    if (has_connected(id)) continue;
    const Block& b = tree_->block(id);
    if (b.parent && !has_connected(*b.parent)) {
      orphans_[*b.parent].emplace_back(id, arrival);
      continue;
    }
    connect(id, arrival, false);
  }
  // Order of arrival inside the synced region is unknown: a fork with several
  // branches, one of which already has alpha blocks, cannot be resolved.
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    PerBlock& p = blocks_[i];
    if (!p.connected || p.first_to_alpha || p.undecidable || p.children.empty()) continue;
    const BlockId fork{i};
    std::vector<BlockId> long_branches;
    for (BlockId c : p.children) {
      if (branch_length(fork, c) >= params_.alpha) long_branches.push_back(c);
    }
    if (long_branches.empty()) continue;
    if (p.children.size() == 1) {
      p.first_to_alpha = p.children.front();
      p.baseline = p.children.front();
    } else {
      p.undecidable = true;
      undecidable_.push_back(fork);
    }
  }
}

void NodeView::connect(BlockId id, double arrival, bool live) {
  const Block& b = tree_->block(id);
  {
    PerBlock& s = slot(id);
    s.connected = true;
    s.max_height = b.height;
    s.max_cumdiff = tree_->cumulative_difficulty(id);
  }
  log_.append(id, arrival);
  if (b.parent) slot(*b.parent).children.push_back(id);

  const double cd = tree_->cumulative_difficulty(id);
  for (auto cur = b.parent; cur; cur = tree_->block(*cur).parent) {
    PerBlock& a = blocks_[cur->value];
    bool changed = false;
    if (b.height > a.max_height) {
      a.max_height = b.height;
      changed = true;
    }
    if (cd > a.max_cumdiff) {
      a.max_cumdiff = cd;
      changed = true;
    }
    if (!changed) break;
  }

  if (!live || !b.parent) return;

  const BlockId parent = *b.parent;
  {
    const PerBlock& p = blocks_[parent.value];
    if (p.first_to_alpha && !p.suppressed && !p.undecidable && p.baseline) {
      add_record(id, parent, *p.baseline, arrival);
    }
  }

  if (!undecidable_.empty()) {
    BlockId child = id;
    for (auto cur = b.parent; cur; cur = tree_->block(*cur).parent) {
      PerBlock& a = blocks_[cur->value];
      if (a.undecidable) a.last_extended = child;
      child = *cur;
    }
  }

  const auto alpha = static_cast<std::uint32_t>(params_.alpha);
  if (b.height >= alpha) {
    const BlockId fork = tree_->ancestor_at_height(id, b.height - alpha);
    const PerBlock& f = blocks_[fork.value];
    if (!f.first_to_alpha && !f.undecidable) {
      const BlockId branch = tree_->ancestor_at_height(id, b.height - alpha + 1);
      on_alpha_reached(fork, branch, id, arrival);
    }
  }

  check_all_boundaries(arrival);
}

void NodeView::on_alpha_reached(BlockId fork, BlockId branch, BlockId trigger, double) {
  PerBlock& f = slot(fork);
  f.first_to_alpha = branch;
  f.baseline = branch;
  if (path_actively_penalized(trigger)) {
    f.suppressed = true;
    return;
  }
  assign_penalties(fork);
}

std::vector<PenaltyRecord> NodeView::assign_penalties(BlockId fork) {
  std::vector<PenaltyRecord> created;
  PerBlock& f = slot(fork);
  if (!f.first_to_alpha || f.suppressed || f.undecidable || !f.baseline) return created;
  const BlockId baseline = *f.baseline;
  const std::vector<BlockId> kids = f.children;
  for (BlockId c : kids) {
    if (c == baseline || c == *f.first_to_alpha) continue;
    if (!slot(c).records.empty()) continue;
    add_record(c, fork, baseline, now_);
    created.push_back(records_.back());
  }
  return created;
}

void NodeView::add_record(BlockId penalized, BlockId fork, BlockId baseline, double t) {
  PenaltyRecord r;
  r.penalized = penalized;
  r.fork = fork;
  r.baseline = baseline;
  r.active = true;
  r.assigned_at = t;
  records_.push_back(r);
  slot(penalized).records.push_back(records_.size() - 1);
}

namespace {

bool crossed(std::int64_t len_penalized, std::int64_t len_baseline, double xi) {
  return meets_block_requirement(len_penalized, (1.0 + xi) * static_cast<double>(len_baseline));
}

}  // namespace

void NodeView::check_all_boundaries(double t) {
  std::vector<std::size_t> crossing;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const PenaltyRecord& r = records_[i];
    if (!r.active) continue;
    if (crossed(branch_length(r.fork, r.penalized), branch_length(r.fork, r.baseline), params_.xi)) {
      crossing.push_back(i);
    }
  }
  // Scores are captured before any record flips so simultaneous crossings
  // see the same state.
  std::vector<std::pair<double, double>> snap;
  snap.reserve(crossing.size());
  for (std::size_t i : crossing) {
    const PenaltyRecord& r = records_[i];
    snap.emplace_back(subtree_max_cumdiff(r.baseline) + params_.epsilon, subtree_max_cumdiff(r.penalized));
  }
  for (std::size_t k = 0; k < crossing.size(); ++k) {
    PenaltyRecord& r = records_[crossing[k]];
    r.active = false;
    r.deactivated_at = t;
    r.deactivated_seq = event_seq_;
    r.rebase_score = snap[k].first;
    r.anchor_cumdiff = snap[k].second;
    slot(r.fork).baseline = r.penalized;
  }
}

PenaltyRecord NodeView::check_boundary(std::size_t index) {
  if (index >= records_.size()) throw NotPenalized("no penalty record " + std::to_string(index));
  PenaltyRecord& r = records_[index];
  if (r.active && crossed(branch_length(r.fork, r.penalized), branch_length(r.fork, r.baseline), params_.xi)) {
    r.rebase_score = subtree_max_cumdiff(r.baseline) + params_.epsilon;
    r.anchor_cumdiff = subtree_max_cumdiff(r.penalized);
    r.active = false;
    r.deactivated_at = now_;
    r.deactivated_seq = event_seq_;
    slot(r.fork).baseline = r.penalized;
  }
  return r;
}

std::vector<BlockId> NodeView::heads() const {
  std::vector<BlockId> out;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].connected && blocks_[i].children.empty()) out.push_back(BlockId{i});
  }
  return out;
}

const std::vector<BlockId>& NodeView::connected_children(BlockId id) const {
  static const std::vector<BlockId> kEmpty;
  const PerBlock* p = find(id);
  return p ? p->children : kEmpty;
}

std::uint32_t NodeView::subtree_max_height(BlockId id) const {
  const PerBlock* p = find(id);
  if (!p || !p->connected) throw UnknownBlock("block " + to_string(id) + " not connected at this node");
  return p->max_height;
}

double NodeView::subtree_max_cumdiff(BlockId id) const {
  const PerBlock* p = find(id);
  if (!p || !p->connected) throw UnknownBlock("block " + to_string(id) + " not connected at this node");
  return p->max_cumdiff;
}

std::int64_t NodeView::branch_length(BlockId fork, BlockId branch) const {
  return static_cast<std::int64_t>(subtree_max_height(branch)) -
         static_cast<std::int64_t>(tree_->block(fork).height);
}

std::optional<BlockId> NodeView::first_to_alpha(BlockId fork) const {
  const PerBlock* p = find(fork);
  return p ? p->first_to_alpha : std::nullopt;
}

std::optional<BlockId> NodeView::baseline_at(BlockId fork) const {
  const PerBlock* p = find(fork);
  return p ? p->baseline : std::nullopt;
}

bool NodeView::assignment_suppressed(BlockId fork) const {
  const PerBlock* p = find(fork);
  return p != nullptr && p->suppressed;
}

bool NodeView::undecidable(BlockId fork) const {
  const PerBlock* p = find(fork);
  return p != nullptr && p->undecidable;
}

bool NodeView::path_actively_penalized(BlockId head) const {
  for (std::optional<BlockId> cur = head; cur; cur = tree_->block(*cur).parent) {
    const PerBlock* p = find(*cur);
    if (!p) continue;
    for (std::size_t idx : p->records) {
      if (records_[idx].active) return true;
    }
  }
  return false;
}

bool NodeView::actively_penalized(BlockId head) const { return path_actively_penalized(head); }

bool NodeView::ever_penalized(BlockId head) const {
  for (std::optional<BlockId> cur = head; cur; cur = tree_->block(*cur).parent) {
    const PerBlock* p = find(*cur);
    if (p && !p->records.empty()) return true;
  }
  return false;
}

double NodeView::adjusted_score(BlockId head) const {
  const PenaltyRecord* last = nullptr;
  for (std::optional<BlockId> cur = head; cur; cur = tree_->block(*cur).parent) {
    const PerBlock* p = find(*cur);
    if (!p) continue;
    for (std::size_t idx : p->records) {
      const PenaltyRecord& r = records_[idx];
      if (r.active) continue;
      if (last == nullptr || r.deactivated_seq > last->deactivated_seq ||
          (r.deactivated_seq == last->deactivated_seq && r.rebase_score > last->rebase_score)) {
        last = &r;
      }
    }
  }
  const double cd = tree_->cumulative_difficulty(head);
  if (last == nullptr) return cd;
  return cd - last->anchor_cumdiff + last->rebase_score;
}

double NodeView::penalized_score(ChainRef chain, BlockId fork) const {
  for (const PenaltyRecord& r : records_) {
    if (r.active && r.fork == fork && tree_->is_ancestor(r.penalized, chain.head)) {
      return static_cast<double>(tree_->post_fork_length(chain, fork)) / (1.0 + params_.xi);
    }
  }
  throw NotPenalized("chain " + to_string(chain.head) + " has no active penalty at fork " + to_string(fork));
}

BlockId NodeView::branch_head(BlockId branch) const {
  BlockId best = branch;
  std::vector<BlockId> stack{branch};
  while (!stack.empty()) {
    const BlockId x = stack.back();
    stack.pop_back();
    const auto hx = tree_->block(x).height;
    const auto hb = tree_->block(best).height;
    if (hx > hb || (hx == hb && *log_.index_of(x) < *log_.index_of(best))) best = x;
    for (BlockId c : connected_children(x)) stack.push_back(c);
  }
  return best;
}

void NodeView::write_penalty_ledger(std::ostream& os) const {
  for (const PenaltyRecord& r : records_) {
    os << "penalty chain=" << branch_head(r.penalized).value << " fork=" << r.fork.value
       << " baseline=" << branch_head(r.baseline).value << " active=" << (r.active ? 1 : 0)
       << " t_on=" << format_double(r.assigned_at)
       << " t_off=" << (r.deactivated_at ? format_double(*r.deactivated_at) : std::string("-")) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Canonical selection

namespace {

// Larger score wins; then earlier arrival; then lower id.
struct Candidate {
  BlockId head;
  double score;
  std::size_t arrival;

  [[nodiscard]] bool beats(const Candidate& o) const {
    if (score != o.score) return score > o.score;
    if (arrival != o.arrival) return arrival < o.arrival;
    return head < o.head;
  }
};

}  // namespace

ChainRef nakamoto_canonical(const BlockTree& tree, const ObservationLog* log) {
  std::optional<Candidate> best;
  for (BlockId h : tree.heads()) {
    std::size_t arrival = static_cast<std::size_t>(-1);
    if (log) {
      if (auto idx = log->index_of(h)) arrival = *idx;
    }
    Candidate c{h, tree.cumulative_difficulty(h), arrival};
    if (!best || c.beats(*best)) best = c;
  }
  return ChainRef{best->head};
}

ChainRef nakamoto_canonical(const NodeView& node) {
  std::optional<Candidate> best;
  for (BlockId h : node.heads()) {
    Candidate c{h, node.tree().cumulative_difficulty(h), *node.log().index_of(h)};
    if (!best || c.beats(*best)) best = c;
  }
  return ChainRef{best->head};
}

CanonicalChoice adess_canonical(const NodeView& node) {
  const BlockTree& tree = node.tree();
  std::vector<BlockId> eligible;
  for (BlockId h : node.heads()) {
    if (!node.path_actively_penalized(h)) eligible.push_back(h);
  }
  if (eligible.empty()) {
    throw InvariantViolation("ADESS eligible set is empty");
  }

  CanonicalStatus status = CanonicalStatus::Decided;
  for (BlockId fork : node.undecidable_) {
    const auto fh = tree.block(fork).height;
    std::vector<BlockId> below;
    std::set<BlockId> branches;
    for (BlockId h : eligible) {
      if (h != fork && tree.is_ancestor(fork, h)) {
        below.push_back(h);
        branches.insert(tree.ancestor_at_height(h, fh + 1));
      }
    }
    if (branches.size() < 2) continue;
    const auto& last = node.blocks_[fork.value].last_extended;
    if (!last) {
      status = CanonicalStatus::UndecidablePendingInference;
      continue;
    }
    if (status == CanonicalStatus::Decided) status = CanonicalStatus::Inferred;
    std::erase_if(eligible, [&](BlockId h) {
      return h != fork && tree.is_ancestor(fork, h) && tree.ancestor_at_height(h, fh + 1) != *last;
    });
  }

  std::optional<Candidate> best;
  for (BlockId h : eligible) {
    Candidate c{h, node.adjusted_score(h), *node.log().index_of(h)};
    if (!best || c.beats(*best)) best = c;
  }
  return CanonicalChoice{ChainRef{best->head}, status};
}

ChainRef canonical(const NodeView& node, Protocol protocol) {
  return protocol == Protocol::Nakamoto ? nakamoto_canonical(node) : adess_canonical(node).chain;
}

}  // namespace adess

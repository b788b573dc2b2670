#pragma once

#include "adess/chain.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace adess {

enum class Protocol { Nakamoto, Adess };

[[nodiscard]] const char* to_string(Protocol p) noexcept;

struct AdessParams {
  int alpha = 6;               // confirmation depth that triggers baseline designation
  double xi = 1.0;             // penalty parameter; per-block weight 1/(1+xi)
  double epsilon = 1e-6;       // score bump applied when a penalty is overcome
  double latency_bound = 0.0;  // network propagation bound

  void validate() const;  // throws ConfigError
};

struct Observation {
  BlockId block;
  double arrival = 0.0;
};

// Arrival-ordered log of connected blocks for one node. Arrival times are
// non-decreasing and each block appears at most once.
class ObservationLog {
 public:
  void append(BlockId id, double arrival);

  [[nodiscard]] const std::vector<Observation>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::optional<std::size_t> index_of(BlockId id) const;
  [[nodiscard]] bool contains(BlockId id) const { return index_of(id).has_value(); }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<Observation> entries_;
  std::vector<std::size_t> index_;  // by block id; npos when absent
};

// One penalty assignment at a fork-block. Branches are identified by their
// first post-fork block; every head below that block belongs to the branch.
struct PenaltyRecord {
  BlockId penalized;  // first post-fork block of the penalized chain
  BlockId fork;
  BlockId baseline;   // first post-fork block of the baseline chain
  bool active = true;
  double assigned_at = 0.0;
  std::optional<double> deactivated_at;

  // Filled on deactivation. Eligible heads in the penalized branch whose last
  // overcome penalty is this record score as
  //   cumdiff(head) - anchor_cumdiff + rebase_score.
  std::uint64_t deactivated_seq = 0;
  double rebase_score = 0.0;
  double anchor_cumdiff = 0.0;
};

enum class CanonicalStatus {
  Decided,
  // Late joiner: at least one fork's first-to-alpha order was never observed
  // and no post-join block has shown which chain is being mined.
  UndecidablePendingInference,
  // Late joiner: the choice at an undecidable fork was inferred from the chain
  // that received the most recent block.
  Inferred,
};

[[nodiscard]] const char* to_string(CanonicalStatus s) noexcept;

struct CanonicalChoice {
  ChainRef chain;
  CanonicalStatus status = CanonicalStatus::Decided;
};

// A participant's subjective view: which blocks it has connected, in what
// order, and the penalty state derived from that order. The tree must outlive
// the view and must already contain every block passed to observe().
class NodeView {
 public:
  NodeView(const BlockTree& tree, AdessParams params);

  // Delivers a block. Blocks whose parent is not yet connected are buffered
  // and connected (with this arrival time) once the parent arrives. Duplicate
  // deliveries are ignored. Throws InvalidTimestamp when `arrival` precedes
  // the last logged arrival.
  void observe(BlockId id, double arrival);

  // Connects `ids` at once without temporal information (a node that was
  // offline). Forks where two or more branches exist and one already has
  // alpha post-fork blocks become undecidable.
  void bulk_sync(std::span<const BlockId> ids, double arrival);

  [[nodiscard]] const BlockTree& tree() const noexcept { return *tree_; }
  [[nodiscard]] const AdessParams& params() const noexcept { return params_; }
  [[nodiscard]] const ObservationLog& log() const noexcept { return log_; }
  [[nodiscard]] bool has_connected(BlockId id) const noexcept;
  [[nodiscard]] std::size_t buffered_count() const noexcept;

  // Connected blocks without connected children, ascending id.
  [[nodiscard]] std::vector<BlockId> heads() const;
  [[nodiscard]] const std::vector<BlockId>& connected_children(BlockId id) const;

  // Deepest connected height / largest cumulative difficulty in the subtree.
  [[nodiscard]] std::uint32_t subtree_max_height(BlockId id) const;
  [[nodiscard]] double subtree_max_cumdiff(BlockId id) const;

  // Post-fork length of a branch (identified by its first post-fork block).
  [[nodiscard]] std::int64_t branch_length(BlockId fork, BlockId branch) const;

  [[nodiscard]] const std::vector<PenaltyRecord>& penalties() const noexcept { return records_; }
  [[nodiscard]] std::optional<BlockId> first_to_alpha(BlockId fork) const;
  [[nodiscard]] std::optional<BlockId> baseline_at(BlockId fork) const;
  [[nodiscard]] bool assignment_suppressed(BlockId fork) const;
  [[nodiscard]] bool undecidable(BlockId fork) const;
  [[nodiscard]] bool has_undecidable_forks() const noexcept { return !undecidable_.empty(); }

  // Creates records for every connected sibling branch at `fork` against the
  // first-to-alpha branch, unless that chain was actively penalized when it
  // reached alpha. Returns the records created. Normally driven by observe().
  std::vector<PenaltyRecord> assign_penalties(BlockId fork);

  // Deactivates `records()[index]` if the penalized branch has reached the
  // canonical boundary. Returns the (possibly updated) record.
  PenaltyRecord check_boundary(std::size_t index);

  // post_fork_length(chain, fork) / (1 + xi); throws NotPenalized when the
  // chain has no active record at `fork`.
  [[nodiscard]] double penalized_score(ChainRef chain, BlockId fork) const;

  [[nodiscard]] bool actively_penalized(BlockId head) const;
  [[nodiscard]] bool ever_penalized(BlockId head) const;
  [[nodiscard]] double adjusted_score(BlockId head) const;

  // Deepest connected block of a branch; ties go to the earliest arrival.
  [[nodiscard]] BlockId branch_head(BlockId branch) const;

  // `penalty chain=<head> fork=<id> baseline=<head> active=<0|1> t_on=<t> t_off=<t|->`
  void write_penalty_ledger(std::ostream& os) const;

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct PerBlock {
    bool connected = false;
    std::vector<BlockId> children;
    std::uint32_t max_height = 0;
    double max_cumdiff = 0.0;
    std::optional<BlockId> first_to_alpha;
    std::optional<BlockId> baseline;
    bool suppressed = false;
    bool undecidable = false;
    std::optional<BlockId> last_extended;  // for undecidable forks
    std::vector<std::size_t> records;      // records whose penalized branch starts here
  };

  PerBlock& slot(BlockId id);
  [[nodiscard]] const PerBlock* find(BlockId id) const noexcept;
  void connect(BlockId id, double arrival, bool live);
  void on_alpha_reached(BlockId fork, BlockId branch, BlockId trigger, double t);
  void add_record(BlockId penalized, BlockId fork, BlockId baseline, double t);
  void check_all_boundaries(double t);
  [[nodiscard]] bool path_actively_penalized(BlockId head) const;

  const BlockTree* tree_;
  AdessParams params_;
  ObservationLog log_;
  std::vector<PerBlock> blocks_;
  std::map<BlockId, std::vector<std::pair<BlockId, double>>> orphans_;  // parent -> (child, arrival)
  std::vector<PenaltyRecord> records_;
  std::vector<BlockId> undecidable_;
  std::uint64_t event_seq_ = 0;
  double now_ = 0.0;

  friend CanonicalChoice adess_canonical(const NodeView& node);
};

// Max cumulative difficulty over the tree heads; ties by earliest arrival in
// `log` (when given), then lowest id.
[[nodiscard]] ChainRef nakamoto_canonical(const BlockTree& tree, const ObservationLog* log = nullptr);

// Same rule restricted to the node's connected blocks.
[[nodiscard]] ChainRef nakamoto_canonical(const NodeView& node);

// Excludes every head with an active penalty on its path, then picks the max
// (possibly re-based) score with the Nakamoto tie-break. Throws
// InvariantViolation if no head is eligible.
[[nodiscard]] CanonicalChoice adess_canonical(const NodeView& node);

[[nodiscard]] ChainRef canonical(const NodeView& node, Protocol protocol);

}  // namespace adess

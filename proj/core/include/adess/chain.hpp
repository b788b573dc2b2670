#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace adess {

// Monotone integer assigned at creation. Blocks are never identified by
// content hash; the ordering is only used for deterministic tie-breaking.
struct BlockId {
  std::uint64_t value = 0;

  auto operator<=>(const BlockId&) const = default;
};

[[nodiscard]] std::string to_string(BlockId id);

struct Block {
  BlockId id;
  std::optional<BlockId> parent;  // absent only for genesis
  std::uint32_t height = 0;
  double difficulty = 1.0;
  std::string miner;
  double created_at = 0.0;
};

// A chain is the unique path genesis -> head, so it is represented by its head.
struct ChainRef {
  BlockId head;

  auto operator<=>(const ChainRef&) const = default;
};

// Append-only block tree. Ids are dense (0 = genesis), so lookup is a vector
// index. Single writer; concurrent readers are fine once writes quiesce.
class BlockTree {
 public:
  explicit BlockTree(double genesis_difficulty = 1.0, double genesis_time = 0.0,
                     std::string genesis_miner = "genesis");

  [[nodiscard]] BlockId genesis() const noexcept { return BlockId{0}; }

  // Throws UnknownBlock, InvalidDifficulty or InvalidTimestamp.
  BlockId append_block(BlockId parent, double difficulty, const std::string& miner, double time);

  [[nodiscard]] bool contains(BlockId id) const noexcept { return id.value < blocks_.size(); }
  [[nodiscard]] const Block& block(BlockId id) const;
  [[nodiscard]] std::size_t size() const noexcept { return blocks_.size(); }
  [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }

  [[nodiscard]] const std::set<BlockId>& heads() const noexcept { return heads_; }
  [[nodiscard]] const std::vector<BlockId>& children(BlockId id) const;
  [[nodiscard]] double cumulative_difficulty(BlockId id) const;

  // Ancestor of `id` at `height` (id itself when heights match).
  [[nodiscard]] BlockId ancestor_at_height(BlockId id, std::uint32_t height) const;
  [[nodiscard]] bool is_ancestor(BlockId ancestor, BlockId descendant) const;

  // Deepest common ancestor of the two head paths.
  [[nodiscard]] BlockId fork_block(ChainRef a, ChainRef b) const;

  // Blocks strictly after `fork` up to and including the head. Throws
  // NotAnAncestor when `fork` is not on the chain.
  [[nodiscard]] std::int64_t post_fork_length(ChainRef chain, BlockId fork) const;

  // Line-oriented snapshot:
  //   block <id> parent=<id|-> h=<height> d=<difficulty> t=<time> miner=<tag>
  void write_snapshot(std::ostream& os) const;
  [[nodiscard]] static BlockTree read_snapshot(std::istream& is);

 private:
  void check_known(BlockId id) const;

  std::vector<Block> blocks_;
  std::vector<std::vector<BlockId>> children_;
  std::vector<double> cumulative_;
  std::set<BlockId> heads_;
};

}  // namespace adess

template <>
struct std::hash<adess::BlockId> {
  std::size_t operator()(adess::BlockId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};

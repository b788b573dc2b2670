#include "adess/chain.hpp"

#include "adess/errors.hpp"
#include "adess/numeric.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace adess {

std::string to_string(BlockId id) { return std::to_string(id.value); }

BlockTree::BlockTree(double genesis_difficulty, double genesis_time, std::string genesis_miner) {
  if (!(genesis_difficulty > 0.0)) {
    throw InvalidDifficulty("genesis difficulty must be positive");
  }
  blocks_.push_back(Block{BlockId{0}, std::nullopt, 0, genesis_difficulty, std::move(genesis_miner), genesis_time});
  children_.emplace_back();
  cumulative_.push_back(genesis_difficulty);
  heads_.insert(BlockId{0});
}

void BlockTree::check_known(BlockId id) const {
  if (!contains(id)) {
    throw UnknownBlock("unknown block " + to_string(id));
  }
}

BlockId BlockTree::append_block(BlockId parent, double difficulty, const std::string& miner, double time) {
  check_known(parent);
  if (!(difficulty > 0.0) || !std::isfinite(difficulty)) {
    throw InvalidDifficulty("difficulty must be positive and finite, got " + format_double(difficulty));
  }
  const Block& p = blocks_[parent.value];
  if (time < p.created_at) {
    throw InvalidTimestamp("block time " + format_double(time) + " precedes parent time " +
                           format_double(p.created_at));
  }
  const BlockId id{blocks_.size()};
  blocks_.push_back(Block{id, parent, p.height + 1, difficulty, miner, time});
  children_.emplace_back();
  children_[parent.value].push_back(id);
  cumulative_.push_back(cumulative_[parent.value] + difficulty);
  heads_.erase(parent);
  heads_.insert(id);
  return id;
}

const Block& BlockTree::block(BlockId id) const {
  check_known(id);
  return blocks_[id.value];
}

const std::vector<BlockId>& BlockTree::children(BlockId id) const {
  check_known(id);
  return children_[id.value];
}

double BlockTree::cumulative_difficulty(BlockId id) const {
  check_known(id);
  return cumulative_[id.value];
}

BlockId BlockTree::ancestor_at_height(BlockId id, std::uint32_t height) const {
  check_known(id);
  const Block* b = &blocks_[id.value];
  if (height > b->height) {
    throw NotAnAncestor("height " + std::to_string(height) + " above block " + to_string(id));
  }
  while (b->height > height) {
    b = &blocks_[b->parent->value];
  }
  return b->id;
}

bool BlockTree::is_ancestor(BlockId ancestor, BlockId descendant) const {
  check_known(ancestor);
  check_known(descendant);
  const auto h = blocks_[ancestor.value].height;
  if (h > blocks_[descendant.value].height) return false;
  return ancestor_at_height(descendant, h) == ancestor;
}

BlockId BlockTree::fork_block(ChainRef a, ChainRef b) const {
  check_known(a.head);
  check_known(b.head);
  const auto h = std::min(blocks_[a.head.value].height, blocks_[b.head.value].height);
  BlockId x = ancestor_at_height(a.head, h);
  BlockId y = ancestor_at_height(b.head, h);
  while (x != y) {
    x = *blocks_[x.value].parent;
    y = *blocks_[y.value].parent;
  }
  return x;
}

std::int64_t BlockTree::post_fork_length(ChainRef chain, BlockId fork) const {
  if (!is_ancestor(fork, chain.head)) {
    throw NotAnAncestor("block " + to_string(fork) + " is not an ancestor of " + to_string(chain.head));
  }
  return static_cast<std::int64_t>(blocks_[chain.head.value].height) -
         static_cast<std::int64_t>(blocks_[fork.value].height);
}

void BlockTree::write_snapshot(std::ostream& os) const {
  for (const Block& b : blocks_) {
    os << "block " << b.id.value << " parent=" << (b.parent ? to_string(*b.parent) : std::string("-"))
       << " h=" << b.height << " d=" << format_double(b.difficulty) << " t=" << format_double(b.created_at)
       << " miner=" << b.miner << '\n';
  }
}

namespace {

std::string_view field_value(std::string_view token, std::string_view key) {
  if (token.substr(0, key.size()) != key) {
    throw ConfigError("snapshot: expected field '" + std::string(key) + "' in '" + std::string(token) + "'");
  }
  return token.substr(key.size());
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("snapshot: bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("snapshot: bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

BlockTree BlockTree::read_snapshot(std::istream& is) {
  std::optional<BlockTree> tree;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw, id, parent, h, d, t, miner;
    if (!(ls >> kw >> id >> parent >> h >> d >> t >> miner) || kw != "block") {
      throw ConfigError("snapshot: malformed line '" + line + "'");
    }
    if (parse_uint(id) != expected) {
      throw ConfigError("snapshot: ids must be dense and ordered, got " + id);
    }
    const auto pv = field_value(parent, "parent=");
    const double diff = parse_double(field_value(d, "d="));
    const double time = parse_double(field_value(t, "t="));
    const std::string tag(field_value(miner, "miner="));
    if (expected == 0) {
      if (pv != "-") throw ConfigError("snapshot: first block must be genesis");
      tree.emplace(diff, time, tag);
    } else {
      if (!tree) throw ConfigError("snapshot: missing genesis");
      tree->append_block(BlockId{parse_uint(pv)}, diff, tag, time);
      if (tree->block(BlockId{expected}).height != parse_uint(field_value(h, "h="))) {
        throw ConfigError("snapshot: height mismatch on block " + id);
      }
    }
    ++expected;
  }
  if (!tree) throw ConfigError("snapshot: empty");
  return std::move(*tree);
}

}  // namespace adess

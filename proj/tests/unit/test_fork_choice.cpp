#include "adess/errors.hpp"
#include "adess/fork_choice.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace adess;

namespace {

// Appends `n` unit blocks below `from`, returning their ids in order.
std::vector<BlockId> grow(BlockTree& t, BlockId from, int n, const std::string& tag = "m") {
  std::vector<BlockId> out;
  for (int i = 0; i < n; ++i) {
    from = t.append_block(from, 1.0, tag, 0.0);
    out.push_back(from);
  }
  return out;
}

struct Feeder {
  NodeView& view;
  double clock = 0.0;
  void operator()(BlockId id) { view.observe(id, clock += 1.0); }
  void operator()(const std::vector<BlockId>& ids) {
    for (BlockId id : ids) (*this)(id);
  }
};

AdessParams params(int alpha, double xi) {
  AdessParams p;
  p.alpha = alpha;
  p.xi = xi;
  return p;
}

}  // namespace

TEST(Nakamoto, SingleChain) {
  BlockTree t;
  const auto c = grow(t, t.genesis(), 4);
  EXPECT_EQ(nakamoto_canonical(t).head, c.back());
}

TEST(Nakamoto, HeavierChainWins) {
  BlockTree t(1.0);
  const BlockId ic = t.append_block(t.genesis(), 102.0, "h", 1.0);
  const BlockId a = t.append_block(t.genesis(), 102.5, "a", 1.0);
  EXPECT_EQ(nakamoto_canonical(t).head, a);
  EXPECT_DOUBLE_EQ(t.cumulative_difficulty(ic), 103.0);
  EXPECT_DOUBLE_EQ(t.cumulative_difficulty(a), 103.5);
}

TEST(Nakamoto, TieBreakTable) {
  BlockTree t;
  const BlockId x = t.append_block(t.genesis(), 1.0, "x", 0.0);
  const BlockId y = t.append_block(t.genesis(), 1.0, "y", 0.0);
  ObservationLog y_first;
  y_first.append(y, 1.0);
  y_first.append(x, 2.0);
  ObservationLog x_first;
  x_first.append(x, 1.0);
  x_first.append(y, 2.0);
  EXPECT_EQ(nakamoto_canonical(t, &y_first).head, y);
  EXPECT_EQ(nakamoto_canonical(t, &x_first).head, x);
  EXPECT_EQ(nakamoto_canonical(t).head, x);  // no log: lowest id
}

TEST(PenaltyAssignment, AlphaThBlockPenalizesSibling) {
  BlockTree t;
  const auto x = grow(t, t.genesis(), 6, "x");
  const auto y = grow(t, t.genesis(), 4, "y");
  NodeView v(t, params(6, 1.0));
  Feeder feed{v};
  for (int i = 0; i < 4; ++i) {
    feed(x[static_cast<std::size_t>(i)]);
    feed(y[static_cast<std::size_t>(i)]);
  }
  feed(x[4]);
  EXPECT_TRUE(v.penalties().empty());
  feed(x[5]);
  ASSERT_EQ(v.penalties().size(), 1u);
  const PenaltyRecord& r = v.penalties()[0];
  EXPECT_EQ(r.penalized, y[0]);
  EXPECT_EQ(r.baseline, x[0]);
  EXPECT_EQ(r.fork, t.genesis());
  EXPECT_TRUE(r.active);
  // Retroactive: all four existing blocks count.
  EXPECT_DOUBLE_EQ(v.penalized_score(ChainRef{y.back()}, t.genesis()), 2.0);
  EXPECT_EQ(adess_canonical(v).chain.head, x.back());
}

TEST(PenaltyAssignment, ThreeChainsShareBaseline) {
  BlockTree t;
  const auto x = grow(t, t.genesis(), 2, "x");
  const auto y = grow(t, t.genesis(), 1, "y");
  const auto z = grow(t, t.genesis(), 1, "z");
  NodeView v(t, params(2, 1.0));
  Feeder feed{v};
  feed({y[0], z[0], x[0], x[1]});
  ASSERT_EQ(v.penalties().size(), 2u);
  EXPECT_EQ(v.penalties()[0].baseline, x[0]);
  EXPECT_EQ(v.penalties()[1].baseline, x[0]);
}

TEST(PenaltyAssignment, SingleChainNeverPenalized) {
  BlockTree t;
  const auto x = grow(t, t.genesis(), 20);
  NodeView v(t, params(3, 1.0));
  Feeder feed{v};
  feed(x);
  EXPECT_TRUE(v.penalties().empty());
  EXPECT_EQ(v.first_to_alpha(t.genesis()), x[0]);
}

TEST(PenaltyAssignment, SiblingArrivingLaterIsPenalized) {
  BlockTree t;
  const auto x = grow(t, t.genesis(), 3, "x");
  const auto y = grow(t, t.genesis(), 1, "y");
  NodeView v(t, params(3, 1.0));
  Feeder feed{v};
  feed(x);
  feed(y);
  ASSERT_EQ(v.penalties().size(), 1u);
  EXPECT_EQ(v.penalties()[0].penalized, y[0]);
}

TEST(PenaltyAssignment, PenalizedFirstToAlphaCreatesNoRecords) {
  BlockTree t;
  const auto c = grow(t, t.genesis(), 2, "c");
  const BlockId a1 = t.append_block(t.genesis(), 1.0, "a", 0.0);
  const auto d = grow(t, a1, 2, "d");
  const auto e = grow(t, a1, 1, "e");
  NodeView v(t, params(2, 5.0));
  Feeder feed{v};
  feed(c);
  feed(a1);
  ASSERT_EQ(v.penalties().size(), 1u);
  feed(d);
  feed(e);
  EXPECT_TRUE(v.assignment_suppressed(a1));
  EXPECT_EQ(v.penalties().size(), 1u);
}

TEST(PenalizedScore, DirectFormula) {
  {
    BlockTree t;
    const auto ic = grow(t, t.genesis(), 6);
    const auto a = grow(t, t.genesis(), 10);
    NodeView v(t, params(6, 1.0));
    Feeder feed{v};
    feed(ic);
    feed(a);
    EXPECT_DOUBLE_EQ(v.penalized_score(ChainRef{a.back()}, t.genesis()), 5.0);
    EXPECT_THROW((void)v.penalized_score(ChainRef{ic.back()}, t.genesis()), NotPenalized);
  }
  {
    BlockTree t;
    const auto ic = grow(t, t.genesis(), 3);
    const auto a = grow(t, t.genesis(), 3);
    NodeView v(t, params(3, 0.5));
    Feeder feed{v};
    feed(ic);
    feed(a);
    EXPECT_DOUBLE_EQ(v.penalized_score(ChainRef{a.back()}, t.genesis()), 2.0);
  }
}

TEST(Boundary, CrossingAtTwiceTheIncumbentLength) {
  BlockTree t;
  const auto ic = grow(t, t.genesis(), 5, "ic");
  const auto a = grow(t, t.genesis(), 10, "a");
  NodeView v(t, params(5, 1.0));
  Feeder feed{v};
  feed(ic);
  for (int i = 0; i < 9; ++i) feed(a[static_cast<std::size_t>(i)]);
  ASSERT_EQ(v.penalties().size(), 1u);
  EXPECT_TRUE(v.penalties()[0].active);
  EXPECT_TRUE(v.check_boundary(0).active);
  EXPECT_EQ(adess_canonical(v).chain.head, ic.back());

  feed(a[9]);
  const PenaltyRecord& r = v.penalties()[0];
  EXPECT_FALSE(r.active);
  ASSERT_TRUE(r.deactivated_at.has_value());
  EXPECT_DOUBLE_EQ(*r.deactivated_at, 15.0);
  const double ic_cd = t.cumulative_difficulty(ic.back());
  EXPECT_DOUBLE_EQ(v.adjusted_score(a.back()), ic_cd + v.params().epsilon);
  EXPECT_EQ(adess_canonical(v).chain.head, a.back());
  EXPECT_EQ(v.baseline_at(t.genesis()), a[0]);
}

TEST(Boundary, DeactivationIsPermanent) {
  BlockTree t;
  const auto ic = grow(t, t.genesis(), 2);
  const auto a = grow(t, t.genesis(), 4);
  NodeView v(t, params(2, 1.0));
  Feeder feed{v};
  feed(ic);
  feed(a);
  ASSERT_FALSE(v.penalties()[0].active);
  const auto more = grow(t, ic.back(), 30);
  feed(more);
  EXPECT_FALSE(v.penalties()[0].active);
  EXPECT_FALSE(v.check_boundary(0).active);
  EXPECT_EQ(adess_canonical(v).chain.head, more.back());
}

TEST(Boundary, ThirdChainComparesAgainstRebasedScore) {
  BlockTree t;
  const auto ic = grow(t, t.genesis(), 2, "ic");
  const auto a = grow(t, t.genesis(), 4, "a");
  const auto z = grow(t, t.genesis(), 6, "z");
  NodeView v(t, params(2, 1.0));
  Feeder feed{v};
  feed(ic);
  feed(a);
  // z joins after the crossing and is penalized against the new baseline a.
  feed(z[0]);
  ASSERT_EQ(v.penalties().size(), 2u);
  EXPECT_EQ(v.penalties()[1].baseline, a[0]);
  feed({z[1], z[2], z[3], z[4], z[5]});
  EXPECT_EQ(adess_canonical(v).chain.head, a.back());
}

TEST(Canonical, TreeWithThreeForks) {
  // f1 = genesis; f2 and f3 lie on the branch that reaches alpha first.
  BlockTree t;
  const auto b1 = grow(t, t.genesis(), 4, "b1");
  const auto b2 = grow(t, t.genesis(), 2, "b2");
  const auto b3 = grow(t, b1[0], 4, "b3");
  const auto b4 = grow(t, b1[1], 1, "b4");
  const auto b5 = grow(t, b3[1], 2, "b5");
  NodeView v(t, params(2, 1.0));
  Feeder feed{v};
  feed(b1);
  feed(b2);
  feed(b3);
  feed(b4);
  feed(b5);
  const CanonicalChoice choice = adess_canonical(v);
  EXPECT_EQ(choice.status, CanonicalStatus::Decided);
  EXPECT_FALSE(v.actively_penalized(choice.chain.head));
  EXPECT_FALSE(v.ever_penalized(b1.back()));
  EXPECT_EQ(choice.chain.head, b1.back());
}

TEST(Subjectivity, ArrivalOrderDecidesBaseline) {
  BlockTree t;
  const auto x = grow(t, t.genesis(), 3, "x");
  const auto y = grow(t, t.genesis(), 3, "y");
  NodeView one(t, params(3, 1.0));
  NodeView two(t, params(3, 1.0));
  Feeder f1{one};
  Feeder f2{two};
  f1(x);
  f1(y);
  f2(y);
  f2(x);
  EXPECT_EQ(adess_canonical(one).chain.head, x.back());
  EXPECT_EQ(adess_canonical(two).chain.head, y.back());
}

TEST(NodeView, BuffersOrphansUntilParentArrives) {
  BlockTree t;
  const auto c = grow(t, t.genesis(), 3);
  NodeView v(t, params(2, 1.0));
  v.observe(c[2], 1.0);
  v.observe(c[1], 2.0);
  EXPECT_EQ(v.buffered_count(), 2u);
  EXPECT_FALSE(v.has_connected(c[2]));
  v.observe(c[0], 3.0);
  EXPECT_EQ(v.buffered_count(), 0u);
  EXPECT_TRUE(v.has_connected(c[2]));
  EXPECT_EQ(adess_canonical(v).chain.head, c[2]);
  const BlockId late = t.append_block(t.genesis(), 1.0, "m", 0.1);
  EXPECT_THROW(v.observe(late, 0.5), InvalidTimestamp);
}

TEST(NodeView, BulkSyncMarksAmbiguousForksUndecidable) {
  BlockTree t;
  const auto x = grow(t, t.genesis(), 3, "x");
  const auto y = grow(t, t.genesis(), 4, "y");
  NodeView v(t, params(3, 1.0));
  std::vector<BlockId> all(x);
  all.insert(all.end(), y.begin(), y.end());
  v.bulk_sync(all, 10.0);
  EXPECT_TRUE(v.undecidable(t.genesis()));
  EXPECT_TRUE(v.penalties().empty());
  EXPECT_EQ(adess_canonical(v).status, CanonicalStatus::UndecidablePendingInference);
  EXPECT_EQ(nakamoto_canonical(v).head, y.back());

  const BlockId next = t.append_block(x.back(), 1.0, "x", 11.0);
  v.observe(next, 11.0);
  const CanonicalChoice c = adess_canonical(v);
  EXPECT_EQ(c.status, CanonicalStatus::Inferred);
  EXPECT_EQ(c.chain.head, next);
}

TEST(NodeView, PenaltyLedgerFormat) {
  BlockTree t;
  const auto ic = grow(t, t.genesis(), 1);
  const auto a = grow(t, t.genesis(), 2);
  NodeView v(t, params(1, 1.0));
  v.observe(ic[0], 1.0);
  v.observe(a[0], 2.5);
  v.observe(a[1], 3.0);
  std::ostringstream os;
  v.write_penalty_ledger(os);
  EXPECT_EQ(os.str(), "penalty chain=3 fork=0 baseline=1 active=0 t_on=2.5 t_off=3\n");
}

TEST(NodeView, RejectsInvalidParams) {
  BlockTree t;
  EXPECT_THROW(NodeView(t, params(0, 1.0)), ConfigError);
  EXPECT_THROW(NodeView(t, params(1, 0.0)), ConfigError);
}

TEST(Fuzz, RandomTreesKeepOneCanonicalHeadAndAWitness) {
  oracle::SplitMix rng{7};
  int with_penalties = 0;
  for (int trial = 0; trial < 300; ++trial) {
    BlockTree t;
    std::vector<BlockId> forks;
    const std::size_t n = 10 + rng.below(120);
    for (std::size_t i = 1; i < n; ++i) {
      const std::vector<BlockId> heads(t.heads().begin(), t.heads().end());
      BlockId parent = heads[rng.below(heads.size())];
      const double u = rng.unit();
      if (forks.size() < 6 && u < 0.1) {
        parent = BlockId{rng.below(t.size())};
        if (!t.children(parent).empty()) forks.push_back(parent);
      } else if (!forks.empty() && u < 0.2) {
        parent = forks[rng.below(forks.size())];
      }
      t.append_block(parent, 1.0, "m", 0.0);
    }
    std::vector<BlockId> order;
    for (std::size_t i = 1; i < t.size(); ++i) order.push_back(BlockId{i});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    NodeView v(t, params(1 + static_cast<int>(rng.below(4)), 0.2 + rng.unit()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      v.observe(order[i], static_cast<double>(i));
      ASSERT_NO_THROW((void)adess_canonical(v));
      const auto heads = v.heads();
      ASSERT_TRUE(std::any_of(heads.begin(), heads.end(), [&](BlockId h) { return !v.ever_penalized(h); }));
    }
    if (!v.penalties().empty()) ++with_penalties;
  }
  EXPECT_GT(with_penalties, 30);
}

#include <gtest/gtest.h>

#include <random>

#include "banzhaf/bounds.hpp"
#include "support/oracle.hpp"

using namespace banzhaf;

namespace {

struct ThreeClause {
  ParsedLineage p = parse_dnf("(x&y)|(x&z)|u");
  VarId x = *p.names.find("x");
};

}  // namespace

TEST(Idnf, CountsAndRejectsNonIdnf) {
  EXPECT_EQ(idnf_count(parse_dnf("(a&b)|c").function), 5);
  EXPECT_EQ(idnf_count(parse_dnf("vars{a,b,c,d} (a&b)|c").function), 10);
  EXPECT_EQ(idnf_count(parse_dnf("vars{a} 0").function), 0);
  EXPECT_THROW(idnf_count(parse_dnf("(a&b)|(a&c)").function), std::invalid_argument);
}

TEST(Idnf, LowerAndUpperOfWorkedExample) {
  ThreeClause e;
  auto low = lower_fn(e.p.function);
  auto up = upper_fn(e.p.function);
  EXPECT_EQ(to_string(low, e.p.names), "(x & y) | u");
  EXPECT_EQ(to_string(up, e.p.names), "(x & y) | z | u");
  EXPECT_EQ(idnf_count(low), 5);
  EXPECT_EQ(idnf_count(up), 13);
  EXPECT_EQ(idnf_count(lower_fn(restrict(e.p.function, e.x, true))), 7);
  EXPECT_EQ(idnf_count(upper_fn(restrict(e.p.function, e.x, false))), 4);
}

TEST(Idnf, UpperCollapsesToOneWhenAClauseEmpties) {
  auto f = parse_dnf("(x&y)|x|y").function;
  auto u = upper_fn(f);
  EXPECT_EQ(u.constant_value(), true);
  EXPECT_EQ(u.num_vars(), 2u);
}

TEST(Idnf, LinearScan) {
  auto f = parse_dnf("(a&b&c)|(c&d)|(d&e&f)|(a&f)").function;
  ScanStats s;
  lower_fn(f, &s);
  upper_fn(f, &s);
  EXPECT_LE(s.literal_visits, 3 * f.size());
}

TEST(Idnf, RandomSandwich) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    auto f = oracle::random_dnf(rng, {2, 12, 1, 12, 4});
    auto c = count_bounds(f);
    BigInt truth = oracle::count(f);
    EXPECT_LE(c.lower, truth);
    EXPECT_GE(c.upper, truth);
    if (is_idnf(f)) {
      EXPECT_EQ(c.lower, c.upper);
    }
  }
}

TEST(Combine, WorkedPartialTree) {
  BoundsQuad psi1{3, 7, 8, 9}, psi2{0, 8, 0, 10}, phi1{5, 7, 9, 20}, phi2{0, 5, 0, 8};
  BoundsQuad left = combine_or(psi1, 4, psi2, 4);
  BoundsQuad right = combine_and(phi1, phi2);
  EXPECT_EQ(left, (BoundsQuad{18, 184, 64, 214}));
  EXPECT_EQ(right, (BoundsQuad{25, 35, 72, 160}));
  EXPECT_EQ(combine_mutex(left, right), (BoundsQuad{43, 219, 136, 374}));
}

TEST(Combine, NegativeLeafBoundsStaySound) {
  // x occurs negated: Banzhaf interval [-1, -1] scaled by a count in [2, 3]
  BoundsQuad neg{-1, 1, -1, 1};
  BoundsQuad other{0, 2, 0, 3};
  BoundsQuad r = combine_and(neg, other);
  EXPECT_EQ(r.lower_banzhaf, -3);
  EXPECT_EQ(r.upper_banzhaf, -2);
}

TEST(Propagate, ExactOnCompleteTree) {
  ThreeClause e;
  DTree t = compile_full(e.p.function);
  BoundsQuad q = propagate_bounds(t, e.x);
  EXPECT_EQ(q, (BoundsQuad{3, 11, 3, 11}));
}

TEST(Propagate, RootLeafUsesIdnfBounds) {
  ThreeClause e;
  DTree t(e.p.function);
  BoundsQuad q = propagate_bounds(t, e.x);
  EXPECT_EQ(q.lower_count, 10);  // #L = 5 over 3 variables, lifted to 4
  EXPECT_EQ(q.upper_count, 13);
  EXPECT_EQ(q.lower_banzhaf, 3);
  EXPECT_EQ(q.upper_banzhaf, 3);
}

TEST(Propagate, EveryNodeOfPartialTreesBracketsOracle) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    auto f = oracle::random_dnf(rng, {3, 9, 2, 10, 3});
    DTree t(f);
    BoundsPropagator cached(t);
    while (true) {
      BoundsPropagator fresh(t);
      for (NodeId id = 0; id < t.size(); ++id) {
        auto truth = oracle::node_truth(t, id);
        for (VarId x : t.node(id).universe) {
          NodeBounds b = fresh.bounds(id, x);
          const BigInt& bz = truth.banzhaf.at(x);
          EXPECT_LE(b.quad.lower_banzhaf, bz);
          EXPECT_GE(b.quad.upper_banzhaf, bz);
          EXPECT_LE(b.quad.lower_count, truth.count);
          EXPECT_GE(b.quad.upper_count, truth.count);
          BigInt zero = (truth.count - bz) / 2;
          EXPECT_LE(b.restricted.lower, zero);
          EXPECT_GE(b.restricted.upper, zero);
          EXPECT_EQ(cached.bounds(id, x).quad, b.quad);
        }
      }
      if (t.complete()) break;
      const auto& open = t.open_leaves();
      auto it = open.begin();
      std::advance(it, static_cast<long>(rng() % open.size()));
      NodeId leaf = *it;
      cached.invalidate(leaf);
      t.expand_leaf(leaf);
    }
  }
}

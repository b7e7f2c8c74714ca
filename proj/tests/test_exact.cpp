#include <gtest/gtest.h>

#include <random>

#include "banzhaf/exact.hpp"
#include "support/oracle.hpp"

using namespace banzhaf;

TEST(Exact, FactoredExample) {
  auto p = parse_dnf("(x&y)|(x&z)");
  DTree t = compile_full(p.function);
  auto r = exaban(t, *p.names.find("x"));
  EXPECT_EQ(r.banzhaf, 3);
  EXPECT_EQ(r.model_count, 3);
  EXPECT_EQ(exaban(t, *p.names.find("y")).banzhaf, 1);
}

TEST(Exact, IndependentOrExample) {
  auto p = parse_dnf("(x&y)|(x&z)|u");
  DTree t = compile_full(p.function);
  auto all = exaban_all(t, p.function.universe());
  EXPECT_EQ(all.at(*p.names.find("x")).banzhaf, 3);
  EXPECT_EQ(all.at(*p.names.find("u")).banzhaf, 5);
  EXPECT_EQ(all.at(*p.names.find("x")).model_count, 11);
}

TEST(Exact, ConstantsAndUnusedVariables) {
  auto p = parse_dnf("vars{a,b,c} (a&b)");
  DTree t = compile_full(p.function);
  EXPECT_EQ(exaban(t, *p.names.find("c")).banzhaf, 0);
  EXPECT_EQ(exaban(t, *p.names.find("a")).banzhaf, 2);
  EXPECT_EQ(model_counts(t)[t.root()], 2);
  auto one = compile_full(parse_dnf("vars{a,b} 1").function);
  EXPECT_EQ(model_counts(one)[one.root()], 4);
  EXPECT_EQ(exaban(one, var(0)).banzhaf, 0);
}

TEST(Exact, RequiresCompleteTree) {
  auto p = parse_dnf("(a&b)|(b&c)");
  DTree t(p.function);
  EXPECT_THROW(exaban(t, var(0)), IncompleteTree);
}

TEST(Exact, AgreesWithOracleAndSingleVariablePass) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 80; ++i) {
    auto f = oracle::random_dnf(rng, {3, 12, 1, 14, 4});
    DTree t = compile_full(f);
    auto truth = oracle::banzhaf_all(f);
    auto all = exaban_all(t, f.universe());
    for (VarId x : f.universe()) {
      EXPECT_EQ(all.at(x).banzhaf, truth.at(x));
      EXPECT_EQ(all.at(x), exaban(t, x));
    }
  }
}

TEST(Exact, AnnotationsMatchSubtreeOracle) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 25; ++i) {
    auto f = oracle::random_dnf(rng, {3, 9, 2, 9, 3});
    DTree t = compile_full(f);
    VarId x = f.universe().front();
    auto ann = exaban_annotations(t, x);
    for (NodeId id = 0; id < t.size(); ++id) {
      auto truth = oracle::node_truth(t, id);
      EXPECT_EQ(ann[id].model_count, truth.count);
      BigInt b = t.node(id).contains(x) ? truth.banzhaf.at(x) : BigInt(0);
      EXPECT_EQ(ann[id].banzhaf, b);
    }
  }
}

TEST(Exact, Normalizations) {
  auto p = parse_dnf("(x&y)|(x&z)|u");
  DTree t = compile_full(p.function);
  auto all = exaban_all(t, p.function.universe());
  const auto& x = all.at(*p.names.find("x"));
  EXPECT_EQ(normalize(x, Normalization::power, 4, all), Rational(3, 8));
  EXPECT_EQ(normalize(x, Normalization::index, 4, all), Rational(3, 10));
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "banzhaf/baselines.hpp"
#include "support/oracle.hpp"

using namespace banzhaf;

TEST(Brute, NegatedVariableIsNegative) {
  // x1 | (x2 & !x3), bits 0..2
  auto phi = [](std::uint64_t a) { return (a & 1) || ((a & 2) && !(a & 4)); };
  EXPECT_EQ(brute_banzhaf_mask(3, 0, phi), 3);
  EXPECT_EQ(brute_banzhaf_mask(3, 1, phi), 1);
  EXPECT_EQ(brute_banzhaf_mask(3, 2, phi), -1);
}

TEST(Brute, AgreesWithIndependentOracle) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    auto f = oracle::random_dnf(rng, {1, 12, 1, 10, 4});
    auto truth = oracle::banzhaf_all(f);
    EXPECT_EQ(brute_count(f), oracle::count(f));
    for (VarId x : f.universe()) EXPECT_EQ(brute_banzhaf(f, x), truth.at(x));
  }
}

TEST(Brute, Cap) {
  std::vector<VarId> u;
  for (std::uint32_t i = 0; i < 31; ++i) u.push_back(var(i));
  auto f = DnfFunction::from_clauses({{var(0)}}, u);
  EXPECT_THROW(brute_count(f), std::length_error);
}

TEST(Shapley, CriticalVectorAndEfficiency) {
  auto p = parse_dnf("(x&y)|(x&z)|u");
  Rational total = 0;
  for (VarId v : p.function.universe()) {
    auto cv = critical_vector(p.function, v);
    EXPECT_EQ(cv.total(), brute_banzhaf(p.function, v));
    EXPECT_EQ(shapley_from_critical(cv), brute_shapley(p.function, v));
    total += brute_shapley(p.function, v);
  }
  EXPECT_EQ(total, 1);
  EXPECT_EQ(shapley_coefficient(0, 4), Rational(1, 4));
  EXPECT_EQ(shapley_coefficient(1, 4), Rational(1, 12));
}

TEST(MonteCarlo, DeterministicPerSeed) {
  std::mt19937_64 rng(3);
  auto f = oracle::random_dnf(rng, {8, 8, 6, 6, 3});
  VarId x = f.universe()[2];
  auto a = mc_banzhaf(f, x, 500, 99);
  auto b = mc_banzhaf(f, x, 500, 99);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.seed, 99u);
  EXPECT_EQ(a.generator, "mt19937_64");
  // streams differ per variable
  auto all = mc_banzhaf_all(f, 500, 99);
  EXPECT_EQ(all.at(x).estimate, a.estimate);
  auto shared = mc_banzhaf_all(f, 500, 99, true);
  EXPECT_EQ(shared.size(), f.num_vars());
  EXPECT_THROW(mc_banzhaf(f, x, 0, 1), std::invalid_argument);
}

TEST(MonteCarlo, HoeffdingRadius) {
  double r = hoeffding_radius(10, 10000);
  EXPECT_NEAR(r, 512.0 * std::sqrt(std::log(2.0 / 0.001) / 20000.0), 1e-9);
}

TEST(Naive, ClauseFrequency) {
  auto p = parse_dnf("(x&y)|(x&z)|u");
  auto freq = clause_frequency(p.function);
  EXPECT_EQ(freq.at(*p.names.find("x")), 2u);
  EXPECT_EQ(freq.at(*p.names.find("u")), 1u);
}

#pragma once

// Reference implementations: enumeration-based Banzhaf, critical-set counts, Shapley,
// a Monte Carlo estimator, and a naive clause-frequency ranking.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "banzhaf/lineage.hpp"
#include "banzhaf/numeric.hpp"

namespace banzhaf {

inline constexpr std::size_t kDefaultBruteCap = 30;

namespace detail {

inline void check_enumerable(std::size_t n, std::size_t cap) {
  if (n > cap || n > 62)
    throw std::length_error("universe of " + std::to_string(n) + " variables is too large to enumerate (cap " +
                            std::to_string(std::min<std::size_t>(cap, 62)) + ")");
}

inline std::size_t position(const std::vector<VarId>& universe, VarId v) {
  auto it = std::lower_bound(universe.begin(), universe.end(), v);
  if (it == universe.end() || *it != v)
    throw std::invalid_argument("variable " + std::to_string(index_of(v)) + " is not in the universe");
  return static_cast<std::size_t>(it - universe.begin());
}

}  // namespace detail

/// A positive DNF as bit masks over its universe positions, for enumeration.
class MaskDnf {
 public:
  explicit MaskDnf(const DnfFunction& f, std::size_t cap = kDefaultBruteCap) : universe_(f.universe()) {
    detail::check_enumerable(universe_.size(), cap);
    if (f.is_constant()) {
      constant_ = *f.constant_value();
      return;
    }
    for (const auto& c : f.clauses()) {
      std::uint64_t m = 0;
      for (VarId v : c) m |= std::uint64_t{1} << detail::position(universe_, v);
      masks_.push_back(m);
    }
  }

  bool operator()(std::uint64_t assignment) const {
    if (constant_) return *constant_;
    for (std::uint64_t m : masks_)
      if ((m & assignment) == m) return true;
    return false;
  }

  std::size_t num_vars() const { return universe_.size(); }
  std::size_t bit(VarId v) const { return detail::position(universe_, v); }
  const std::vector<VarId>& universe() const { return universe_; }

 private:
  std::vector<VarId> universe_;
  std::vector<std::uint64_t> masks_;
  std::optional<bool> constant_;
};

/// Σ over Y ⊆ X∖{x} of f(Y ∪ {x}) − f(Y), for any predicate on n-bit assignments.
template <class Pred>
BigInt brute_banzhaf_mask(std::size_t n, std::size_t x_bit, const Pred& f) {
  detail::check_enumerable(n, 62);
  const std::uint64_t xm = std::uint64_t{1} << x_bit;
  long long sum = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    if (a & xm) continue;
    sum += static_cast<int>(f(a | xm)) - static_cast<int>(f(a));
  }
  return BigInt(sum);
}

inline BigInt brute_banzhaf(const DnfFunction& f, VarId x, std::size_t cap = kDefaultBruteCap) {
  MaskDnf m(f, cap);
  return brute_banzhaf_mask(m.num_vars(), m.bit(x), m);
}

inline BigInt brute_count(const DnfFunction& f, std::size_t cap = kDefaultBruteCap) {
  MaskDnf m(f, cap);
  long long c = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << m.num_vars()); ++a) c += m(a);
  return BigInt(c);
}

/// counts[k]: subsets Y ⊆ X∖{x} of size k with f(Y) = 0 and f(Y ∪ {x}) = 1.
struct CriticalVector {
  std::vector<BigInt> counts;
  BigInt total() const {
    BigInt t = 0;
    for (const auto& c : counts) t += c;
    return t;
  }
};

inline CriticalVector critical_vector(const DnfFunction& f, VarId x, std::size_t cap = kDefaultBruteCap) {
  MaskDnf m(f, cap);
  const std::size_t n = m.num_vars();
  const std::uint64_t xm = std::uint64_t{1} << m.bit(x);
  std::vector<long long> counts(n, 0);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    if (a & xm) continue;
    if (!m(a) && m(a | xm)) ++counts[static_cast<std::size_t>(std::popcount(a))];
  }
  CriticalVector out;
  for (long long c : counts) out.counts.emplace_back(c);
  return out;
}

/// k!(n-1-k)!/n!
inline Rational shapley_coefficient(std::size_t k, std::size_t n) {
  BigInt num = 1, den = 1;
  for (std::size_t i = 2; i <= k; ++i) num *= i;
  for (std::size_t i = 2; i <= n - 1 - k; ++i) num *= i;
  for (std::size_t i = 2; i <= n; ++i) den *= i;
  return Rational(num, den);
}

inline Rational shapley_from_critical(const CriticalVector& cv) {
  const std::size_t n = cv.counts.size();
  Rational s = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (cv.counts[k] != 0) s += shapley_coefficient(k, n) * Rational(cv.counts[k]);
  return s;
}

inline Rational brute_shapley(const DnfFunction& f, VarId x, std::size_t cap = kDefaultBruteCap) {
  return shapley_from_critical(critical_vector(f, x, cap));
}

struct McEstimate {
  Rational estimate;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64";
};

/// Half-width of the two-sided Hoeffding band at confidence 1 - delta.
inline double hoeffding_radius(std::size_t n, std::size_t samples, double delta = 0.001) {
  return std::ldexp(1.0, static_cast<int>(n) - 1) * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples)));
}

namespace detail {

inline std::mt19937_64 stream_for(std::uint64_t seed, VarId x) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), index_of(x)};
  return std::mt19937_64(seq);
}

// Clause lists by universe position, evaluated against a byte vector.
class PositionDnf {
 public:
  explicit PositionDnf(const DnfFunction& f) : universe_(f.universe()) {
    if (f.is_constant()) {
      constant_ = *f.constant_value();
      return;
    }
    for (const auto& c : f.clauses()) {
      std::vector<std::size_t> p;
      for (VarId v : c) p.push_back(position(universe_, v));
      clauses_.push_back(std::move(p));
    }
  }
  bool operator()(const std::vector<char>& a) const {
    if (constant_) return *constant_;
    for (const auto& c : clauses_) {
      bool all = true;
      for (std::size_t p : c)
        if (!a[p]) {
          all = false;
          break;
        }
      if (all) return true;
    }
    return false;
  }
  const std::vector<VarId>& universe() const { return universe_; }

 private:
  std::vector<VarId> universe_;
  std::vector<std::vector<std::size_t>> clauses_;
  std::optional<bool> constant_;
};

inline void draw(std::mt19937_64& rng, std::vector<char>& a) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i % 64 == 0) bits = rng();
    a[i] = static_cast<char>(bits & 1);
    bits >>= 1;
  }
}

}  // namespace detail

/// 2^{n-1} times the mean marginal contribution of x over `samples` uniform subsets of
/// X∖{x}. Deterministic in (seed, x, samples).
inline McEstimate mc_banzhaf(const DnfFunction& f, VarId x, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("mc_banzhaf: samples must be positive");
  detail::PositionDnf eval(f);
  const std::size_t px = detail::position(eval.universe(), x);
  auto rng = detail::stream_for(seed, x);
  std::vector<char> a(eval.universe().size());
  long long hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    detail::draw(rng, a);
    a[px] = 1;
    bool with = eval(a);
    a[px] = 0;
    hits += static_cast<int>(with) - static_cast<int>(eval(a));
  }
  return {Rational(pow2(eval.universe().size() - 1) * hits, samples), samples, seed};
}

/// Estimates for every variable. Independent per-variable streams by default; with
/// `shared`, one stream of assignments is reused for all variables.
inline std::map<VarId, McEstimate> mc_banzhaf_all(const DnfFunction& f, std::size_t samples_per_var,
                                                  std::uint64_t seed, bool shared = false) {
  std::map<VarId, McEstimate> out;
  if (!shared) {
    for (VarId x : f.universe()) out[x] = mc_banzhaf(f, x, samples_per_var, seed);
    return out;
  }
  if (samples_per_var == 0) throw std::invalid_argument("mc_banzhaf: samples must be positive");
  detail::PositionDnf eval(f);
  const std::size_t n = eval.universe().size();
  std::mt19937_64 rng(seed);
  std::vector<char> a(n);
  std::vector<long long> hits(n, 0);
  for (std::size_t s = 0; s < samples_per_var; ++s) {
    detail::draw(rng, a);
    for (std::size_t p = 0; p < n; ++p) {
      char keep = a[p];
      a[p] = 1;
      bool with = eval(a);
      a[p] = 0;
      hits[p] += static_cast<int>(with) - static_cast<int>(eval(a));
      a[p] = keep;
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    out[eval.universe()[p]] = {Rational(pow2(n - 1) * hits[p], samples_per_var), samples_per_var, seed};
  return out;
}

/// Naive baseline: number of clauses each universe variable occurs in.
inline std::map<VarId, std::size_t> clause_frequency(const DnfFunction& f) {
  std::map<VarId, std::size_t> out;
  for (VarId v : f.universe()) out[v] = 0;
  for (const auto& c : f.clauses())
    for (VarId v : c) ++out[v];
  return out;
}

}  // namespace banzhaf

#pragma once

// Anytime approximation of Banzhaf values by interleaving d-tree expansion with
// bound refinement. Results carry either a certified relative-error interval or,
// when the budget runs out first, the best bracketing interval found so far.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "banzhaf/bounds.hpp"
#include "banzhaf/budget.hpp"
#include "banzhaf/dtree.hpp"
#include "banzhaf/numeric.hpp"

namespace banzhaf {

/// Relative error in [0, 1], kept as an exact rational.
class Epsilon {
 public:
  Epsilon() = default;
  explicit Epsilon(Rational v) : value_(std::move(v)) {
    if (value_ < 0 || value_ > 1) throw std::invalid_argument("epsilon must lie in [0, 1], got " + to_string(value_));
  }
  static Epsilon parse(std::string_view text) { return Epsilon(parse_decimal(text)); }

  const Rational& value() const { return value_; }
  bool is_zero() const { return value_ == 0; }

 private:
  Rational value_{0};
};

struct ApproxInterval {
  VarId var{};
  BigInt lower;  // tracked bounds
  BigInt upper;
  bool certified = false;
  Rational certified_lo;  // set when certified
  Rational certified_hi;
  std::size_t expansions = 0;  // Shannon expansions of the tree when the result was produced
  std::chrono::nanoseconds elapsed{0};

  /// Reported interval: the certified one, or the tracked bounds.
  Rational lo() const { return certified ? certified_lo : Rational(lower); }
  Rational hi() const { return certified ? certified_hi : Rational(upper); }
  Rational midpoint() const { return (lo() + hi()) / 2; }
};

/// [(1-ε)U, (1+ε)L] when (1-ε)U <= (1+ε)L, otherwise nothing.
inline std::optional<std::pair<Rational, Rational>> certify(const BigInt& lower, const BigInt& upper,
                                                           const Epsilon& eps) {
  Rational lo = (1 - eps.value()) * Rational(upper);
  Rational hi = (1 + eps.value()) * Rational(lower);
  if (lo - hi > 0) return std::nullopt;
  return std::make_pair(std::move(lo), std::move(hi));
}

enum class LeafStrategy { largest, widest, leftmost, round_robin };

inline LeafStrategy parse_leaf_strategy(std::string_view s) {
  if (s == "largest") return LeafStrategy::largest;
  if (s == "widest") return LeafStrategy::widest;
  if (s == "leftmost") return LeafStrategy::leftmost;
  if (s == "round-robin" || s == "round_robin") return LeafStrategy::round_robin;
  throw std::invalid_argument("unknown leaf strategy: " + std::string(s));
}

struct TraceEvent {
  VarId var{};
  BigInt lower;
  BigInt upper;
  std::size_t expansions = 0;
  std::chrono::nanoseconds elapsed{0};
};

using TraceFn = std::function<void(const TraceEvent&)>;

/// Shared incremental state: one partial d-tree, cached node bounds, and the tracked
/// interval of every variable approximated so far.
class Approximator {
 public:
  explicit Approximator(DnfFunction f, LeafStrategy strategy = LeafStrategy::widest)
      : tree_(std::make_unique<DTree>(std::move(f))),
        props_(std::make_unique<BoundsPropagator>(*tree_)),
        strategy_(strategy) {}

  const DTree& tree() const { return *tree_; }
  const BoundsPropagator& propagator() const { return *props_; }
  std::size_t num_vars() const { return tree_->node(tree_->root()).num_vars(); }

  /// Current root bounds for x: the combination-rule pair intersected with the pair from
  /// Banzhaf = # - 2·#[x:=0].
  std::pair<BigInt, BigInt> root_bounds(VarId x) {
    require_var(x);
    NodeBounds nb = props_->bounds(x);
    BigInt lo = nb.quad.lower_banzhaf, hi = nb.quad.upper_banzhaf;
    BigInt lo4 = nb.quad.lower_count - 2 * nb.restricted.upper;
    BigInt hi4 = nb.quad.upper_count - 2 * nb.restricted.lower;
    if (lo4 > lo) lo = lo4;
    if (hi4 < hi) hi = hi4;
    return {std::move(lo), std::move(hi)};
  }

  /// Tracked interval for x after folding in the current root bounds.
  std::pair<BigInt, BigInt> update(VarId x) {
    auto [lo, hi] = root_bounds(x);
    auto it = tracked_.find(x);
    if (it == tracked_.end()) it = tracked_.emplace(x, std::make_pair(BigInt(0), pow2(num_vars() - 1))).first;
    auto& [tl, tu] = it->second;
    if (lo > tl) tl = lo;
    if (hi < tu) tu = hi;
    return it->second;
  }

  /// Expands open leaves until one Shannon expansion has happened or the tree is complete.
  /// Leaves are chosen with x as the target variable. Returns false if the tree was
  /// already complete.
  bool refine_step(VarId x) {
    if (tree_->complete()) return false;
    const std::size_t before = tree_->shannon_expansions();
    while (!tree_->complete() && tree_->shannon_expansions() == before) {
      NodeId leaf = pick_leaf(x);
      props_->invalidate(leaf);
      tree_->expand_leaf(leaf);
    }
    return true;
  }

  ApproxInterval approximate(VarId x, const Epsilon& eps, const Budget& budget = {}, const TraceFn& trace = {}) {
    require_var(x);
    const auto start = Clock::now();
    ApproxInterval out;
    out.var = x;
    for (;;) {
      auto [lo, hi] = update(x);
      if (trace) trace({x, lo, hi, tree_->shannon_expansions(), Clock::now() - start});
      if (auto c = certify(lo, hi, eps)) {
        out.certified = true;
        out.certified_lo = std::move(c->first);
        out.certified_hi = std::move(c->second);
      }
      out.lower = std::move(lo);
      out.upper = std::move(hi);
      if (out.certified || budget.exhausted(tree_->shannon_expansions()) || !refine_step(x)) break;
    }
    out.expansions = tree_->shannon_expansions();
    out.elapsed = Clock::now() - start;
    return out;
  }

 private:
  void require_var(VarId x) const {
    if (!tree_->node(tree_->root()).contains(x))
      throw std::invalid_argument("variable " + std::to_string(index_of(x)) + " is not in the universe");
  }

  NodeId pick_leaf(VarId x) {
    paths_.resize(tree_->size());
    const auto& open = tree_->open_leaves();
    std::vector<NodeId> pool;
    if (strategy_ != LeafStrategy::widest)
      for (NodeId id : open)
        if (tree_->node(id).function.mentions(x)) pool.push_back(id);
    if (pool.empty()) pool.assign(open.begin(), open.end());

    switch (strategy_) {
      case LeafStrategy::round_robin: {
        NodeId pick = pool[rr_next_ % pool.size()];
        ++rr_next_;
        return pick;
      }
      case LeafStrategy::leftmost:
        return *std::min_element(pool.begin(), pool.end(), [&](NodeId a, NodeId b) { return path_of(a) < path_of(b); });
      case LeafStrategy::widest: {
        // bound gap of the leaf, scaled to the root universe
        const std::size_t n = num_vars();
        std::optional<NodeId> pick;
        BigInt best = -1;
        for (NodeId id : pool) {
          const DNode& leaf = tree_->node(id);
          BigInt gap;
          if (leaf.contains(x)) {
            NodeBounds b = props_->bounds(id, x);
            gap = b.quad.upper_banzhaf - b.quad.lower_banzhaf;
          } else {
            const CountBounds& c = props_->counts(id);
            gap = c.upper - c.lower;
          }
          gap <<= static_cast<unsigned>(n - leaf.num_vars());
          if (gap > best || (gap == best && path_of(id) < path_of(*pick))) {
            best = std::move(gap);
            pick = id;
          }
        }
        return *pick;
      }
      case LeafStrategy::largest: {
        std::size_t best = 0;
        for (NodeId id : pool) best = std::max(best, tree_->node(id).function.num_clauses());
        std::optional<NodeId> pick;
        for (NodeId id : pool) {
          if (tree_->node(id).function.num_clauses() != best) continue;
          if (!pick || path_of(id) < path_of(*pick)) pick = id;
        }
        return *pick;
      }
    }
    throw std::logic_error("unreachable");
  }

  // Paths are fixed once a node exists.
  const std::vector<std::uint32_t>& path_of(NodeId id) {
    if (id != tree_->root() && paths_[id].empty()) paths_[id] = tree_->path(id);
    return paths_[id];
  }

  std::unique_ptr<DTree> tree_;
  std::unique_ptr<BoundsPropagator> props_;
  std::vector<std::vector<std::uint32_t>> paths_;
  LeafStrategy strategy_;
  std::map<VarId, std::pair<BigInt, BigInt>> tracked_;
  std::size_t rr_next_ = 0;
};

inline ApproxInterval adaban(const DnfFunction& f, VarId x, const Epsilon& eps, const Budget& budget = {},
                             const TraceFn& trace = {}, LeafStrategy strategy = LeafStrategy::widest) {
  if (!f.contains(x)) throw std::invalid_argument("adaban: variable " + std::to_string(index_of(x)) + " is not in the universe");
  Approximator a(f, strategy);
  return a.approximate(x, eps, budget, trace);
}

/// One shared tree; variables are processed in the given order, each resuming from the
/// tree left by the previous one.
inline std::map<VarId, ApproxInterval> adaban_all(const DnfFunction& f, const std::vector<VarId>& xs,
                                                  const Epsilon& eps, const Budget& budget = {},
                                                  const TraceFn& trace = {},
                                                  LeafStrategy strategy = LeafStrategy::widest) {
  for (VarId x : xs)
    if (!f.contains(x))
      throw std::invalid_argument("adaban_all: variable " + std::to_string(index_of(x)) + " is not in the universe");
  Approximator a(f, strategy);
  std::map<VarId, ApproxInterval> out;
  for (VarId x : xs) out[x] = a.approximate(x, eps, budget, trace);
  return out;
}

}  // namespace banzhaf

#pragma once

// Lower/upper bounds on Banzhaf values and model counts for partial d-trees.
//
// Leaves that are still DNF functions are bounded through iDNF under- and
// over-approximations, whose model counts are computable in linear time. Inner
// nodes combine child bounds with the exact combination rules, taking the lower
// or upper end of each operand according to the sign it enters with.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "banzhaf/dtree.hpp"
#include "banzhaf/numeric.hpp"

namespace banzhaf {

struct BoundsQuad {
  BigInt lower_banzhaf;
  BigInt lower_count;
  BigInt upper_banzhaf;
  BigInt upper_count;
  friend bool operator==(const BoundsQuad&, const BoundsQuad&) = default;
};

struct CountBounds {
  BigInt lower;
  BigInt upper;
  friend bool operator==(const CountBounds&, const CountBounds&) = default;
};

/// Bounds for one variable x at one node. `restricted` bounds #φ[x:=0], counted over
/// the node's universe without x; it is meaningful only when x is in that universe.
struct NodeBounds {
  BoundsQuad quad;
  CountBounds restricted;
};

/// Instrumentation for the linear-scan claims of lower_fn/upper_fn.
struct ScanStats {
  std::size_t literal_visits = 0;
};

/// Exact model count of an iDNF function over its universe.
inline BigInt idnf_count(const DnfFunction& f) {
  if (f.is_constant()) return *f.constant_value() ? pow2(f.num_vars()) : BigInt(0);
  if (!is_idnf(f)) throw std::invalid_argument("idnf_count: function is not in iDNF");
  std::size_t occupied = 0;
  BigInt non_models = 1;
  for (const auto& c : f.clauses()) {
    occupied += c.size();
    non_models *= pow2(c.size()) - 1;
  }
  non_models <<= static_cast<unsigned>(f.num_vars() - occupied);
  return pow2(f.num_vars()) - non_models;
}

namespace detail {

class UniverseMarks {
 public:
  explicit UniverseMarks(const std::vector<VarId>& universe) : universe_(universe), marks_(universe.size(), false) {}
  std::size_t pos(VarId v) const {
    return static_cast<std::size_t>(std::lower_bound(universe_.begin(), universe_.end(), v) - universe_.begin());
  }
  bool test(VarId v) const { return marks_[pos(v)]; }
  void set(VarId v) { marks_[pos(v)] = true; }

 private:
  const std::vector<VarId>& universe_;
  std::vector<bool> marks_;
};

}  // namespace detail

/// iDNF under-approximation: first-fit selection of pairwise variable-disjoint clauses in
/// clause order. Variables that occurred only in skipped clauses leave the universe.
inline DnfFunction lower_fn(const DnfFunction& f, ScanStats* stats = nullptr) {
  if (f.is_constant()) return f;
  detail::UniverseMarks taken(f.universe());
  detail::UniverseMarks dropped(f.universe());
  std::vector<Clause> kept;
  for (const auto& c : f.clauses()) {
    bool clash = false;
    for (VarId v : c) {
      if (stats) ++stats->literal_visits;
      if (taken.test(v)) {
        clash = true;
        break;
      }
    }
    if (clash) {
      for (VarId v : c) {
        if (stats) ++stats->literal_visits;
        dropped.set(v);
      }
      continue;
    }
    for (VarId v : c) {
      if (stats) ++stats->literal_visits;
      taken.set(v);
    }
    kept.push_back(c);
  }
  std::vector<VarId> universe;
  for (VarId v : f.universe()) {
    if (taken.test(v) || !dropped.test(v)) universe.push_back(v);
  }
  return DnfFunction::from_clauses(std::move(kept), std::move(universe));
}

/// iDNF over-approximation: every variable keeps only its first occurrence. If a clause
/// loses all of its variables the result is the constant 1 over f's universe.
inline DnfFunction upper_fn(const DnfFunction& f, ScanStats* stats = nullptr) {
  if (f.is_constant()) return f;
  detail::UniverseMarks seen(f.universe());
  std::vector<Clause> reduced;
  reduced.reserve(f.num_clauses());
  for (const auto& c : f.clauses()) {
    Clause r;
    for (VarId v : c) {
      if (stats) ++stats->literal_visits;
      if (!seen.test(v)) {
        seen.set(v);
        r.push_back(v);
      }
    }
    if (r.empty()) return DnfFunction::constant(true, f.universe());
    reduced.push_back(std::move(r));
  }
  return DnfFunction::from_clauses(std::move(reduced), f.universe());
}

/// Drops every clause that strictly contains a single-variable clause. The function is
/// unchanged; the scan is linear in its size.
inline DnfFunction absorb_units(const DnfFunction& f) {
  if (f.is_constant()) return f;
  detail::UniverseMarks unit(f.universe());
  bool any = false;
  for (const auto& c : f.clauses())
    if (c.size() == 1) {
      unit.set(c.front());
      any = true;
    }
  if (!any) return f;
  std::vector<Clause> kept;
  for (const auto& c : f.clauses()) {
    bool absorbed = c.size() > 1 && std::any_of(c.begin(), c.end(), [&](VarId v) { return unit.test(v); });
    if (!absorbed) kept.push_back(c);
  }
  if (kept.size() == f.num_clauses()) return f;
  return DnfFunction::from_clauses(std::move(kept), f.universe());
}

inline CountBounds count_bounds(const DnfFunction& raw) {
  DnfFunction f = absorb_units(raw);
  if (f.is_constant() || is_idnf(f)) {
    BigInt c = idnf_count(f);
    return {c, c};
  }
  // L(f) is counted over its own, possibly smaller universe; every variable outside it
  // doubles the count over f's universe.
  DnfFunction low = lower_fn(f);
  BigInt lower = idnf_count(low) << static_cast<unsigned>(f.num_vars() - low.num_vars());
  return {std::move(lower), idnf_count(upper_fn(f))};
}

/// Bounds for Banzhaf(ψ, x) and #ψ at a non-trivial leaf ψ.
inline NodeBounds leaf_bounds(const DnfFunction& psi, VarId x) {
  NodeBounds out;
  CountBounds whole = count_bounds(psi);
  out.quad.lower_count = whole.lower;
  out.quad.upper_count = whole.upper;
  if (!psi.contains(x)) return out;
  CountBounds low = count_bounds(restrict(psi, x, false));
  out.restricted = low;
  if (!psi.mentions(x)) return out;
  CountBounds high = count_bounds(restrict(psi, x, true));
  out.quad.lower_banzhaf = high.lower - low.upper;
  out.quad.upper_banzhaf = high.upper - low.lower;
  return out;
}

namespace detail {

// [lo, hi] * [c_lo, c_hi] for a non-negative second factor.
inline std::pair<BigInt, BigInt> scale(const BigInt& lo, const BigInt& hi, const BigInt& c_lo, const BigInt& c_hi) {
  BigInt a = lo.sign() >= 0 ? lo * c_lo : lo * c_hi;
  BigInt b = hi.sign() >= 0 ? hi * c_hi : hi * c_lo;
  return {std::move(a), std::move(b)};
}

}  // namespace detail

// Binary combination rules. The first operand is the child holding x (when any).

/// Independent-and.
inline BoundsQuad combine_and(const BoundsQuad& holder, const BoundsQuad& other) {
  BoundsQuad q;
  auto [lb, ub] = detail::scale(holder.lower_banzhaf, holder.upper_banzhaf, other.lower_count, other.upper_count);
  q.lower_banzhaf = std::move(lb);
  q.upper_banzhaf = std::move(ub);
  q.lower_count = holder.lower_count * other.lower_count;
  q.upper_count = holder.upper_count * other.upper_count;
  return q;
}

/// Independent-or; n1 and n2 are the operands' universe sizes.
inline BoundsQuad combine_or(const BoundsQuad& holder, std::size_t n1, const BoundsQuad& other, std::size_t n2) {
  BoundsQuad q;
  BigInt two_n1 = pow2(n1), two_n2 = pow2(n2);
  auto [lb, ub] = detail::scale(holder.lower_banzhaf, holder.upper_banzhaf, two_n2 - other.upper_count,
                                two_n2 - other.lower_count);
  q.lower_banzhaf = std::move(lb);
  q.upper_banzhaf = std::move(ub);
  q.lower_count = holder.lower_count * two_n2 + other.lower_count * two_n1 - holder.lower_count * other.lower_count;
  q.upper_count = holder.upper_count * two_n2 + other.upper_count * two_n1 - holder.upper_count * other.upper_count;
  return q;
}

/// Mutually exclusive or over identical universes.
inline BoundsQuad combine_mutex(const BoundsQuad& a, const BoundsQuad& b) {
  return {a.lower_banzhaf + b.lower_banzhaf, a.lower_count + b.lower_count, a.upper_banzhaf + b.upper_banzhaf,
          a.upper_count + b.upper_count};
}

/// Bottom-up bounds over a (possibly partial) d-tree with per-node caching.
///
/// The propagator reads the tree it was built on; after expanding a leaf, call
/// invalidate(leaf) so that only the cached bounds on the leaf's root path are recomputed.
class BoundsPropagator {
 public:
  explicit BoundsPropagator(const DTree& tree) : tree_(&tree) {}

  NodeBounds bounds(VarId x) { return bounds(tree_->root(), x); }

  NodeBounds bounds(NodeId node, VarId x) {
    sync();
    if (!tree_->node(node).contains(x)) {
      const CountBounds& c = counts(node);
      NodeBounds nb;
      nb.quad.lower_count = c.lower;
      nb.quad.upper_count = c.upper;
      return nb;
    }
    std::vector<std::pair<NodeId, bool>> stack{{node, false}};
    while (!stack.empty()) {
      auto [id, expanded] = stack.back();
      if (find_var(id, x)) {
        stack.pop_back();
        continue;
      }
      const DNode& n = tree_->node(id);
      if (n.is_leaf() || expanded) {
        stack.pop_back();
        store_var(id, x, compute_var(id, x));
        continue;
      }
      stack.back().second = true;
      for (NodeId ch : n.children) {
        if (tree_->node(ch).contains(x) && !find_var(ch, x)) stack.emplace_back(ch, false);
      }
    }
    return *find_var(node, x);
  }

  const CountBounds& counts(NodeId node) {
    sync();
    std::vector<std::pair<NodeId, bool>> stack{{node, false}};
    while (!stack.empty()) {
      auto [id, expanded] = stack.back();
      if (cache_[id].counts) {
        stack.pop_back();
        continue;
      }
      const DNode& n = tree_->node(id);
      if (n.is_leaf() || expanded) {
        stack.pop_back();
        cache_[id].counts = compute_counts(id);
        ++node_evaluations_;
        continue;
      }
      stack.back().second = true;
      for (NodeId ch : n.children)
        if (!cache_[ch].counts) stack.emplace_back(ch, false);
    }
    return *cache_[node].counts;
  }

  /// Drops cached bounds for `node` and all of its ancestors.
  void invalidate(NodeId node) {
    sync();
    while (node != kNoNode) {
      cache_[node] = Entry{};
      node = tree_->node(node).parent;
    }
  }

  void clear() {
    cache_.clear();
    sync();
  }

  std::size_t node_evaluations() const { return node_evaluations_; }
  std::size_t leaf_evaluations() const { return leaf_evaluations_; }

 private:
  struct Entry {
    std::optional<CountBounds> counts;
    std::vector<std::pair<VarId, NodeBounds>> per_var;
  };

  void sync() {
    if (cache_.size() < tree_->size()) cache_.resize(tree_->size());
  }

  const NodeBounds* find_var(NodeId id, VarId x) const {
    for (const auto& [v, b] : cache_[id].per_var)
      if (v == x) return &b;
    return nullptr;
  }

  void store_var(NodeId id, VarId x, NodeBounds b) {
    auto& e = cache_[id];
    if (!e.counts) e.counts = CountBounds{b.quad.lower_count, b.quad.upper_count};
    e.per_var.emplace_back(x, std::move(b));
    ++node_evaluations_;
  }

  CountBounds compute_counts(NodeId id) {
    const DNode& n = tree_->node(id);
    switch (n.kind) {
      case NodeKind::literal:
        return {1, 1};
      case NodeKind::constant: {
        BigInt c = n.value ? pow2(n.num_vars()) : BigInt(0);
        return {c, c};
      }
      case NodeKind::function:
        ++leaf_evaluations_;
        return count_bounds(n.function);
      case NodeKind::indep_and: {
        CountBounds c{1, 1};
        for (NodeId ch : n.children) {
          c.lower *= cache_[ch].counts->lower;
          c.upper *= cache_[ch].counts->upper;
        }
        return c;
      }
      case NodeKind::indep_or: {
        auto [miss_lo, miss_hi] = complement_product(n, kNoNode);
        BigInt all = pow2(n.num_vars());
        return {all - miss_hi, all - miss_lo};
      }
      case NodeKind::mutex_or: {
        CountBounds c{0, 0};
        for (NodeId ch : n.children) {
          c.lower += cache_[ch].counts->lower;
          c.upper += cache_[ch].counts->upper;
        }
        return c;
      }
    }
    throw std::logic_error("unreachable");
  }

  // Bounds on the product over children (except `skip`) of 2^{n_j} - #_j.
  std::pair<BigInt, BigInt> complement_product(const DNode& n, NodeId skip) {
    BigInt lo = 1, hi = 1;
    for (NodeId ch : n.children) {
      if (ch == skip) continue;
      const CountBounds& c = counts(ch);
      BigInt all = pow2(tree_->node(ch).num_vars());
      lo *= all - c.upper;
      hi *= all - c.lower;
    }
    return {std::move(lo), std::move(hi)};
  }

  NodeBounds compute_var(NodeId id, VarId x) {
    const DNode& n = tree_->node(id);
    NodeBounds out;
    switch (n.kind) {
      case NodeKind::literal: {
        BigInt b = n.positive ? 1 : -1;
        out.quad = {b, 1, b, 1};
        BigInt z = n.positive ? 0 : 1;
        out.restricted = {z, z};
        return out;
      }
      case NodeKind::constant: {
        BigInt c = n.value ? pow2(n.num_vars()) : BigInt(0);
        out.quad = {0, c, 0, c};
        BigInt z = n.value ? pow2(n.num_vars() - 1) : BigInt(0);
        out.restricted = {z, z};
        return out;
      }
      case NodeKind::function:
        ++leaf_evaluations_;
        return leaf_bounds(n.function, x);
      case NodeKind::mutex_or: {
        out.quad = {0, 0, 0, 0};
        out.restricted = {0, 0};
        for (NodeId ch : n.children) {
          const NodeBounds& c = *find_var(ch, x);
          out.quad = combine_mutex(out.quad, c.quad);
          out.restricted.lower += c.restricted.lower;
          out.restricted.upper += c.restricted.upper;
        }
        return out;
      }
      case NodeKind::indep_and:
      case NodeKind::indep_or: {
        NodeId holder = kNoNode;
        for (NodeId ch : n.children)
          if (tree_->node(ch).contains(x)) holder = ch;
        const NodeBounds h = *find_var(holder, x);
        if (n.kind == NodeKind::indep_and) {
          BigInt lo = 1, hi = 1;
          for (NodeId ch : n.children) {
            if (ch == holder) continue;
            const CountBounds& c = counts(ch);
            lo *= c.lower;
            hi *= c.upper;
          }
          auto [lb, ub] = detail::scale(h.quad.lower_banzhaf, h.quad.upper_banzhaf, lo, hi);
          out.quad = {std::move(lb), h.quad.lower_count * lo, std::move(ub), h.quad.upper_count * hi};
          out.restricted = {h.restricted.lower * lo, h.restricted.upper * hi};
        } else {
          auto [miss_lo, miss_hi] = complement_product(n, holder);
          auto [lb, ub] = detail::scale(h.quad.lower_banzhaf, h.quad.upper_banzhaf, miss_lo, miss_hi);
          std::size_t nh = tree_->node(holder).num_vars();
          BigInt all = pow2(n.num_vars());
          BigInt all_h = pow2(nh);
          out.quad = {std::move(lb), all - (all_h - h.quad.lower_count) * miss_hi, std::move(ub),
                      all - (all_h - h.quad.upper_count) * miss_lo};
          BigInt half = pow2(n.num_vars() - 1), half_h = pow2(nh - 1);
          out.restricted = {half - (half_h - h.restricted.lower) * miss_hi,
                            half - (half_h - h.restricted.upper) * miss_lo};
        }
        return out;
      }
    }
    throw std::logic_error("unreachable");
  }

  const DTree* tree_;
  std::vector<Entry> cache_;
  std::size_t node_evaluations_ = 0;
  std::size_t leaf_evaluations_ = 0;
};

/// One-shot bounds for x at the root of a (possibly partial) d-tree.
inline BoundsQuad propagate_bounds(const DTree& t, VarId x) {
  BoundsPropagator p(t);
  return p.bounds(x).quad;
}

}  // namespace banzhaf

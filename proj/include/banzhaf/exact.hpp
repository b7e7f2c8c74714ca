#pragma once

// Exact Banzhaf values and model counts over complete d-trees.

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "banzhaf/dtree.hpp"
#include "banzhaf/numeric.hpp"

namespace banzhaf {

struct BanzhafResult {
  BigInt banzhaf;
  BigInt model_count;
  friend bool operator==(const BanzhafResult&, const BanzhafResult&) = default;
};

class IncompleteTree : public std::logic_error {
 public:
  IncompleteTree() : std::logic_error("d-tree is not complete") {}
};

namespace detail {

inline void require_complete(const DTree& t) {
  if (!t.complete()) throw IncompleteTree();
}

// Independent-or fold of two counts over disjoint universes of sizes n1, n2.
inline BigInt or_count(const BigInt& c1, std::size_t n1, const BigInt& c2, std::size_t n2) {
  return c1 * pow2(n2) + pow2(n1) * c2 - c1 * c2;
}

inline BigInt leaf_count(const DNode& n) {
  if (n.kind == NodeKind::literal) return 1;
  return n.value ? pow2(n.num_vars()) : BigInt(0);
}

}  // namespace detail

/// Model count of every node of a complete tree, indexed by node id.
inline std::vector<BigInt> model_counts(const DTree& t) {
  detail::require_complete(t);
  std::vector<BigInt> count(t.size());
  for (std::size_t i = t.size(); i-- > 0;) {
    const DNode& n = t.node(static_cast<NodeId>(i));
    switch (n.kind) {
      case NodeKind::literal:
      case NodeKind::constant:
        count[i] = detail::leaf_count(n);
        break;
      case NodeKind::indep_and: {
        BigInt c = 1;
        for (NodeId ch : n.children) c *= count[ch];
        count[i] = std::move(c);
        break;
      }
      case NodeKind::indep_or: {
        BigInt c = count[n.children.front()];
        std::size_t vars = t.node(n.children.front()).num_vars();
        for (std::size_t k = 1; k < n.children.size(); ++k) {
          NodeId ch = n.children[k];
          c = detail::or_count(c, vars, count[ch], t.node(ch).num_vars());
          vars += t.node(ch).num_vars();
        }
        count[i] = std::move(c);
        break;
      }
      case NodeKind::mutex_or: {
        BigInt c = 0;
        for (NodeId ch : n.children) c += count[ch];
        count[i] = std::move(c);
        break;
      }
      case NodeKind::function:
        throw IncompleteTree();
    }
  }
  return count;
}

/// Per-node (Banzhaf(x), #) for a complete tree; Banzhaf is 0 at nodes whose universe
/// lacks x.
inline std::vector<BanzhafResult> exaban_annotations(const DTree& t, VarId x) {
  std::vector<BigInt> count = model_counts(t);
  std::vector<BigInt> banz(t.size());
  for (std::size_t i = t.size(); i-- > 0;) {
    const DNode& n = t.node(static_cast<NodeId>(i));
    if (!n.contains(x)) continue;
    switch (n.kind) {
      case NodeKind::literal:
        banz[i] = n.positive ? 1 : -1;
        break;
      case NodeKind::constant:
        banz[i] = 0;
        break;
      case NodeKind::indep_and:
      case NodeKind::indep_or: {
        BigInt b = 0;
        NodeId holder = kNoNode;
        for (NodeId ch : n.children)
          if (t.node(ch).contains(x)) holder = ch;
        b = banz[holder];
        for (NodeId ch : n.children) {
          if (ch == holder) continue;
          if (n.kind == NodeKind::indep_and) {
            b *= count[ch];
          } else {
            b *= pow2(t.node(ch).num_vars()) - count[ch];
          }
        }
        banz[i] = std::move(b);
        break;
      }
      case NodeKind::mutex_or: {
        BigInt b = 0;
        for (NodeId ch : n.children) b += banz[ch];
        banz[i] = std::move(b);
        break;
      }
      case NodeKind::function:
        throw IncompleteTree();
    }
  }
  std::vector<BanzhafResult> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = {std::move(banz[i]), std::move(count[i])};
  return out;
}

/// Exact (Banzhaf(φ, x), #φ) from a complete d-tree for φ.
inline BanzhafResult exaban(const DTree& t, VarId x) {
  detail::require_complete(t);
  if (!t.node(t.root()).contains(x))
    throw std::invalid_argument("exaban: variable " + std::to_string(index_of(x)) + " is not in the universe");
  return std::move(exaban_annotations(t, x)[t.root()]);
}

/// Banzhaf values for many variables in one bottom-up pass; the model counts are shared.
inline std::map<VarId, BanzhafResult> exaban_all(const DTree& t, const std::vector<VarId>& xs) {
  std::vector<BigInt> count = model_counts(t);
  const DNode& root = t.node(t.root());
  for (VarId x : xs) {
    if (!root.contains(x))
      throw std::invalid_argument("exaban_all: variable " + std::to_string(index_of(x)) + " is not in the universe");
  }
  std::vector<VarId> wanted(xs);
  std::sort(wanted.begin(), wanted.end());
  auto is_wanted = [&](VarId v) { return std::binary_search(wanted.begin(), wanted.end(), v); };

  // Sparse per-node vectors: variables without an entry have Banzhaf value 0.
  using Entries = std::vector<std::pair<VarId, BigInt>>;
  std::vector<Entries> banz(t.size());
  for (std::size_t i = t.size(); i-- > 0;) {
    const DNode& n = t.node(static_cast<NodeId>(i));
    Entries out;
    switch (n.kind) {
      case NodeKind::literal:
        if (is_wanted(n.var)) out.emplace_back(n.var, n.positive ? 1 : -1);
        break;
      case NodeKind::constant:
        break;
      case NodeKind::indep_and:
      case NodeKind::indep_or: {
        const std::size_t k = n.children.size();
        std::vector<BigInt> factor(k);
        for (std::size_t c = 0; c < k; ++c) {
          NodeId ch = n.children[c];
          factor[c] = n.kind == NodeKind::indep_and ? count[ch] : pow2(t.node(ch).num_vars()) - count[ch];
        }
        // prefix/suffix products give each child the product of its siblings' factors
        std::vector<BigInt> prefix(k + 1, BigInt(1)), suffix(k + 1, BigInt(1));
        for (std::size_t c = 0; c < k; ++c) prefix[c + 1] = prefix[c] * factor[c];
        for (std::size_t c = k; c-- > 0;) suffix[c] = suffix[c + 1] * factor[c];
        for (std::size_t c = 0; c < k; ++c) {
          Entries& child = banz[n.children[c]];
          if (child.empty()) continue;
          BigInt others = prefix[c] * suffix[c + 1];
          for (auto& [v, b] : child) out.emplace_back(v, b * others);
          Entries().swap(child);
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        break;
      }
      case NodeKind::mutex_or: {
        for (NodeId ch : n.children) {
          Entries merged;
          Entries& child = banz[ch];
          std::size_t a = 0, b = 0;
          while (a < out.size() || b < child.size()) {
            if (b == child.size() || (a < out.size() && out[a].first < child[b].first)) {
              merged.push_back(std::move(out[a++]));
            } else if (a == out.size() || child[b].first < out[a].first) {
              merged.push_back(std::move(child[b++]));
            } else {
              merged.emplace_back(out[a].first, out[a].second + child[b].second);
              ++a;
              ++b;
            }
          }
          out = std::move(merged);
          Entries().swap(child);
        }
        break;
      }
      case NodeKind::function:
        throw IncompleteTree();
    }
    banz[i] = std::move(out);
  }

  std::map<VarId, BanzhafResult> result;
  for (VarId x : xs) result[x] = {BigInt(0), count[t.root()]};
  for (auto& [v, b] : banz[t.root()]) result[v].banzhaf = std::move(b);
  return result;
}

enum class Normalization { power, index };

/// Penrose-Banzhaf power: b / 2^(n-1).
inline Rational banzhaf_power(const BigInt& b, std::size_t num_vars) {
  if (num_vars == 0) throw std::invalid_argument("banzhaf_power: empty universe");
  return Rational(b, pow2(num_vars - 1));
}

/// Penrose-Banzhaf index: b divided by the sum of all variables' Banzhaf values.
inline Rational banzhaf_index(const BigInt& b, const std::map<VarId, BanzhafResult>& all) {
  BigInt total = 0;
  for (const auto& [v, r] : all) total += r.banzhaf;
  if (total == 0) throw std::domain_error("banzhaf_index: Banzhaf values sum to zero");
  return Rational(b, total);
}

inline Rational normalize(const BanzhafResult& b, Normalization mode, std::size_t num_vars,
                          const std::map<VarId, BanzhafResult>& all) {
  return mode == Normalization::power ? banzhaf_power(b.banzhaf, num_vars) : banzhaf_index(b.banzhaf, all);
}

}  // namespace banzhaf

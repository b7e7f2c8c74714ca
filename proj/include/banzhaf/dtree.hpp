#pragma once

// Decomposition trees (d-trees): inner nodes are independent-or, independent-and
// and mutually-exclusive-or; leaves are literals, constants, or not-yet-compiled
// positive DNF functions. Trees are grown in place, one leaf at a time.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banzhaf/budget.hpp"
#include "banzhaf/lineage.hpp"

namespace banzhaf {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind { literal, constant, function, indep_or, indep_and, mutex_or };

enum class ExpansionKind { trivial, factor, partition, shannon };

struct DNode {
  NodeKind kind = NodeKind::constant;
  VarId var{};            // literal
  bool positive = true;   // literal polarity
  bool value = false;     // constant value
  DnfFunction function;   // function leaf
  std::vector<NodeId> children;
  std::vector<VarId> universe;  // sorted
  NodeId parent = kNoNode;
  std::uint32_t child_index = 0;

  bool is_leaf() const {
    return kind == NodeKind::literal || kind == NodeKind::constant || kind == NodeKind::function;
  }
  bool is_open() const { return kind == NodeKind::function; }
  bool contains(VarId v) const { return std::binary_search(universe.begin(), universe.end(), v); }
  std::size_t num_vars() const { return universe.size(); }
};

/// Returns the variable occurring in the most clauses; ties go to the smallest id.
inline VarId pick_shannon_var(const DnfFunction& f) {
  if (f.is_constant() || f.clauses().empty()) throw std::logic_error("pick_shannon_var: constant function");
  std::vector<VarId> vars = f.mentioned();
  std::vector<std::size_t> count(vars.size(), 0);
  for (const auto& c : f.clauses()) {
    for (VarId v : c) ++count[static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin())];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < vars.size(); ++i)
    if (count[i] > count[best]) best = i;
  return vars[best];
}

class DTree {
 public:
  explicit DTree(DnfFunction f) {
    nodes_.reserve(16);
    make_node(std::move(f), kNoNode);
  }

  // Children always have larger ids than their parent, so descending id order is a
  // valid post-order.
  NodeId root() const { return 0; }
  const DNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  bool complete() const { return open_.empty(); }
  const std::set<NodeId>& open_leaves() const { return open_; }
  std::size_t shannon_expansions() const { return shannon_count_; }
  std::size_t expansions() const { return expansion_count_; }

  /// Applies one decomposition step to an open leaf, in priority order: common-variable
  /// factoring, independence partitioning, Shannon expansion on the most frequent variable.
  /// The leaf node keeps its id and becomes the new inner node.
  ExpansionKind expand_leaf(NodeId leaf) {
    if (leaf >= nodes_.size() || !nodes_[leaf].is_open())
      throw std::invalid_argument("expand_leaf: node " + std::to_string(leaf) + " is not an open leaf");
    DnfFunction f = std::move(nodes_[leaf].function);
    nodes_[leaf].function = DnfFunction();
    open_.erase(leaf);
    ++expansion_count_;

    if (f.is_constant() || is_literal(f)) {
      fill_trivial(leaf, std::move(f));
      return ExpansionKind::trivial;
    }

    if (auto factored = factor_common(f)) {
      auto& [x, rest] = *factored;
      become_inner(leaf, NodeKind::indep_and);
      add_child(leaf, DnfFunction::from_clauses({{x}}, {x}));
      add_child(leaf, std::move(rest));
      return ExpansionKind::factor;
    }

    std::vector<DnfFunction> parts = components(f);
    if (parts.size() >= 2) {
      become_inner(leaf, NodeKind::indep_or);
      for (auto& p : parts) add_child(leaf, std::move(p));
      return ExpansionKind::partition;
    }

    VarId y = pick_shannon_var(f);
    become_inner(leaf, NodeKind::mutex_or);
    for (bool b : {true, false}) {
      NodeId branch = append_node(leaf);
      DNode& n = nodes_[branch];
      n.kind = NodeKind::indep_and;
      n.universe = f.universe();
      NodeId lit = append_node(branch);
      nodes_[lit].kind = NodeKind::literal;
      nodes_[lit].var = y;
      nodes_[lit].positive = b;
      nodes_[lit].universe = {y};
      add_child(branch, restrict(f, y, b));
    }
    ++shannon_count_;
    return ExpansionKind::shannon;
  }

  /// Root-to-node sequence of child positions; lexicographic order is left-to-right order.
  std::vector<std::uint32_t> path(NodeId id) const {
    std::vector<std::uint32_t> p;
    while (nodes_.at(id).parent != kNoNode) {
      p.push_back(nodes_[id].child_index);
      id = nodes_[id].parent;
    }
    std::reverse(p.begin(), p.end());
    return p;
  }

  /// Open leaves in left-to-right order.
  std::vector<NodeId> open_leaves_in_order() const {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{root()};
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      const DNode& n = nodes_[id];
      if (n.is_open()) out.push_back(id);
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    }
    return out;
  }

 private:
  static bool is_literal(const DnfFunction& f) {
    return !f.is_constant() && f.num_vars() == 1 && f.num_clauses() == 1;
  }

  NodeId append_node(NodeId parent) {
    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
    nodes_.back().parent = parent;
    if (parent != kNoNode) {
      nodes_.back().child_index = static_cast<std::uint32_t>(nodes_[parent].children.size());
      nodes_[parent].children.push_back(id);
    }
    return id;
  }

  void fill_trivial(NodeId id, DnfFunction f) {
    DNode& n = nodes_[id];
    n.children.clear();
    n.universe = f.universe();
    if (f.is_constant()) {
      n.kind = NodeKind::constant;
      n.value = *f.constant_value();
    } else {
      n.kind = NodeKind::literal;
      n.var = f.universe().front();
      n.positive = true;
    }
  }

  NodeId make_node(DnfFunction f, NodeId parent) {
    NodeId id = append_node(parent);
    if (f.is_constant() || is_literal(f)) {
      fill_trivial(id, std::move(f));
    } else {
      DNode& n = nodes_[id];
      n.kind = NodeKind::function;
      n.universe = f.universe();
      n.function = std::move(f);
      open_.insert(id);
    }
    return id;
  }

  void add_child(NodeId parent, DnfFunction f) { make_node(std::move(f), parent); }

  void become_inner(NodeId id, NodeKind kind) {
    nodes_[id].kind = kind;
    nodes_[id].children.clear();
  }

  std::vector<DNode> nodes_;
  std::set<NodeId> open_;
  std::size_t shannon_count_ = 0;
  std::size_t expansion_count_ = 0;
};

/// Expands every open leaf until the tree is complete. Throws BudgetExceeded when the
/// budget runs out; the budget's expansion cap counts Shannon expansions.
inline DTree compile_full(DnfFunction f, const Budget& budget = {}) {
  DTree tree(std::move(f));
  while (!tree.complete()) {
    if (budget.exhausted(tree.shannon_expansions()))
      throw BudgetExceeded("compile_full: budget exhausted after " + std::to_string(tree.shannon_expansions()) +
                           " Shannon expansions");
    tree.expand_leaf(*tree.open_leaves().rbegin());
  }
  return tree;
}

inline const char* symbol(NodeKind kind) {
  switch (kind) {
    case NodeKind::indep_or: return "⊗";
    case NodeKind::indep_and: return "⊙";
    case NodeKind::mutex_or: return "⊕";
    default: return "";
  }
}

/// Indented rendering; `annotate` (optional) appends text such as "(3,3)" to each node.
inline std::string render(const DTree& tree, const VariableTable& names,
                          const std::function<std::string(NodeId)>& annotate = {}) {
  std::string out;
  std::vector<std::pair<NodeId, std::size_t>> stack{{tree.root(), 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const DNode& n = tree.node(id);
    out.append(depth * 2, ' ');
    switch (n.kind) {
      case NodeKind::literal:
        out += (n.positive ? "" : "¬") + names.name(n.var);
        break;
      case NodeKind::constant:
        out += n.value ? "1" : "0";
        break;
      case NodeKind::function:
        out += "[" + to_string(n.function, names) + "]";
        break;
      default:
        out += symbol(n.kind);
    }
    if (annotate) {
      std::string note = annotate(id);
      if (!note.empty()) out += "  " + note;
    }
    out += '\n';
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.emplace_back(*it, depth + 1);
  }
  return out;
}

}  // namespace banzhaf

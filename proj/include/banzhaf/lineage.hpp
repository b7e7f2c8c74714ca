#pragma once

// Positive DNF functions over explicit variable universes, and the text
// format used for lineage files.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace banzhaf {

enum class VarId : std::uint32_t {};

constexpr std::uint32_t index_of(VarId v) { return static_cast<std::uint32_t>(v); }
constexpr VarId var(std::uint32_t i) { return static_cast<VarId>(i); }

// Sorted, duplicate-free.
using Clause = std::vector<VarId>;

/// Bijection between display names and dense variable ids.
class VariableTable {
 public:
  VarId intern(std::string_view name) {
    auto it = ids_.find(std::string(name));
    if (it != ids_.end()) return it->second;
    VarId id = var(static_cast<std::uint32_t>(names_.size()));
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
  }

  std::optional<VarId> find(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(VarId v) const { return names_.at(index_of(v)); }
  std::size_t size() const { return names_.size(); }
  bool contains(std::string_view name) const { return ids_.count(std::string(name)) != 0; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> ids_;
};

class DnfFunction {
 public:
  DnfFunction() : constant_(false) {}

  static DnfFunction constant(bool value, std::vector<VarId> universe = {}) {
    DnfFunction f;
    f.universe_ = normalize_set(std::move(universe));
    f.constant_ = value;
    return f;
  }

  /// Normalizes each clause, drops duplicate clauses (first occurrence wins) and
  /// collapses to a constant when the clause list is empty or contains an empty clause.
  static DnfFunction from_clauses(std::vector<Clause> clauses, std::vector<VarId> universe) {
    DnfFunction f;
    f.universe_ = normalize_set(std::move(universe));
    std::set<Clause> seen;
    for (auto& c : clauses) {
      c = normalize_set(std::move(c));
      if (c.empty()) {
        f.clauses_.clear();
        f.constant_ = true;
        return f;
      }
      for (VarId v : c) {
        if (!std::binary_search(f.universe_.begin(), f.universe_.end(), v))
          throw std::invalid_argument("clause variable " + std::to_string(index_of(v)) +
                                      " is not in the universe");
      }
      if (seen.insert(c).second) f.clauses_.push_back(std::move(c));
    }
    if (f.clauses_.empty()) {
      f.constant_ = false;
    } else {
      f.constant_.reset();
    }
    return f;
  }

  /// Universe = variables that occur in the clauses.
  static DnfFunction from_clauses(std::vector<Clause> clauses) {
    std::vector<VarId> universe;
    for (const auto& c : clauses) universe.insert(universe.end(), c.begin(), c.end());
    return from_clauses(std::move(clauses), std::move(universe));
  }

  const std::vector<VarId>& universe() const { return universe_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::optional<bool> constant_value() const { return constant_; }
  bool is_constant() const { return constant_.has_value(); }
  std::size_t num_vars() const { return universe_.size(); }
  std::size_t num_clauses() const { return clauses_.size(); }

  bool contains(VarId v) const { return std::binary_search(universe_.begin(), universe_.end(), v); }

  bool mentions(VarId v) const {
    return std::any_of(clauses_.begin(), clauses_.end(),
                       [v](const Clause& c) { return std::binary_search(c.begin(), c.end(), v); });
  }

  /// Total number of literal occurrences.
  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& c : clauses_) s += c.size();
    return s;
  }

  /// Variables occurring in some clause, sorted.
  std::vector<VarId> mentioned() const {
    std::vector<VarId> out;
    for (const auto& c : clauses_) out.insert(out.end(), c.begin(), c.end());
    return normalize_set(std::move(out));
  }

  /// `is_true(v)` gives the value of variable v.
  template <class Assignment>
  bool evaluate(Assignment&& is_true) const {
    if (constant_) return *constant_;
    for (const auto& c : clauses_) {
      if (std::all_of(c.begin(), c.end(), [&](VarId v) { return static_cast<bool>(is_true(v)); }))
        return true;
    }
    return false;
  }

  friend bool operator==(const DnfFunction&, const DnfFunction&) = default;

 private:
  static std::vector<VarId> normalize_set(std::vector<VarId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  std::vector<VarId> universe_;
  std::vector<Clause> clauses_;
  std::optional<bool> constant_;
};

namespace detail {

inline std::vector<VarId> without(const std::vector<VarId>& sorted, VarId x) {
  std::vector<VarId> out;
  out.reserve(sorted.size());
  for (VarId v : sorted)
    if (v != x) out.push_back(v);
  return out;
}

inline bool clause_has(const Clause& c, VarId v) { return std::binary_search(c.begin(), c.end(), v); }

}  // namespace detail

/// Cofactor f[x:=b] over f's universe minus x, with constant simplification.
inline DnfFunction restrict(const DnfFunction& f, VarId x, bool b) {
  if (!f.contains(x))
    throw std::invalid_argument("restrict: variable " + std::to_string(index_of(x)) +
                                " is not in the universe");
  std::vector<VarId> universe = detail::without(f.universe(), x);
  if (f.is_constant()) return DnfFunction::constant(*f.constant_value(), std::move(universe));
  std::vector<Clause> clauses;
  clauses.reserve(f.num_clauses());
  for (const auto& c : f.clauses()) {
    if (!detail::clause_has(c, x)) {
      clauses.push_back(c);
    } else if (b) {
      if (c.size() == 1) return DnfFunction::constant(true, std::move(universe));
      clauses.push_back(detail::without(c, x));
    }
  }
  return DnfFunction::from_clauses(std::move(clauses), std::move(universe));
}

/// Splits f into variable-disjoint functions whose disjunction is f.
///
/// Clause components come first, in order of their first clause. Every universe
/// variable that occurs in no clause is returned as its own constant-0 function
/// over that single variable.
inline std::vector<DnfFunction> components(const DnfFunction& f) {
  if (f.is_constant()) throw std::logic_error("components: constant function");
  const auto& universe = f.universe();
  auto pos = [&](VarId v) {
    return static_cast<std::size_t>(std::lower_bound(universe.begin(), universe.end(), v) - universe.begin());
  };
  std::vector<std::size_t> parent(universe.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  std::vector<bool> used(universe.size(), false);
  for (const auto& c : f.clauses()) {
    std::size_t first = find(pos(c.front()));
    used[pos(c.front())] = true;
    for (std::size_t i = 1; i < c.size(); ++i) {
      std::size_t p = pos(c[i]);
      used[p] = true;
      std::size_t r = find(p);
      if (r != first) parent[r] = first;
    }
  }

  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<std::vector<Clause>> groups;
  std::vector<std::vector<VarId>> group_vars;
  for (const auto& c : f.clauses()) {
    std::size_t root = find(pos(c.front()));
    auto [it, fresh] = slot.emplace(root, groups.size());
    if (fresh) {
      groups.emplace_back();
      group_vars.emplace_back();
    }
    groups[it->second].push_back(c);
  }
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (used[i]) group_vars[slot.at(find(i))].push_back(universe[i]);
  }

  std::vector<DnfFunction> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    out.push_back(DnfFunction::from_clauses(std::move(groups[g]), std::move(group_vars[g])));
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (!used[i]) out.push_back(DnfFunction::constant(false, {universe[i]}));
  }
  return out;
}

/// If some variable occurs in every clause, returns the smallest such x and f with x
/// removed from each clause (over f's universe minus x).
inline std::optional<std::pair<VarId, DnfFunction>> factor_common(const DnfFunction& f) {
  if (f.is_constant() || f.clauses().empty()) return std::nullopt;
  std::vector<VarId> common = f.clauses().front();
  for (std::size_t i = 1; i < f.clauses().size() && !common.empty(); ++i) {
    std::vector<VarId> next;
    const auto& c = f.clauses()[i];
    std::set_intersection(common.begin(), common.end(), c.begin(), c.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) return std::nullopt;
  VarId x = common.front();
  return std::make_pair(x, restrict(f, x, true));
}

/// True iff every variable occurs at most once across all clauses.
inline bool is_idnf(const DnfFunction& f) {
  if (f.is_constant()) return true;
  std::vector<VarId> all;
  all.reserve(f.size());
  for (const auto& c : f.clauses()) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

// ---------------------------------------------------------------------------
// Text format
//
//   line   := [id TAB] ["vars{" name ("," name)* "}"] dnf
//   dnf    := clause ("|" clause)* | "0" | "1"
//   clause := "(" name ("&" name)* ")" | name
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct ParsedLineage {
  std::optional<std::string> id;
  VariableTable names;
  DnfFunction function;
};

namespace detail {

class DnfParser {
 public:
  explicit DnfParser(std::string_view text) : text_(text) {}

  ParsedLineage parse() {
    ParsedLineage out;
    if (auto tab = text_.find('\t'); tab != std::string_view::npos) {
      out.id = std::string(trim(text_.substr(0, tab)));
      pos_ = tab + 1;
    }
    skip_ws();
    if (at_end()) throw ParseError("empty input", pos_);

    std::vector<VarId> universe;
    if (text_.substr(pos_).starts_with("vars{")) {
      pos_ += 5;
      skip_ws();
      if (peek() != '}') {
        for (;;) {
          std::size_t at = pos_;
          std::string name = parse_name();
          if (out.names.contains(name)) throw ParseError("duplicate variable declaration '" + name + "'", at);
          universe.push_back(out.names.intern(name));
          skip_ws();
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect('}');
      skip_ws();
      if (at_end()) throw ParseError("expected a DNF after the variable declaration", pos_);
    }

    if (peek() == '0' || peek() == '1') {
      bool value = peek() == '1';
      ++pos_;
      skip_ws();
      if (!at_end()) throw ParseError("unexpected input after constant", pos_);
      out.function = DnfFunction::constant(value, std::move(universe));
      return out;
    }

    std::vector<Clause> clauses;
    for (;;) {
      clauses.push_back(parse_clause(out.names, universe));
      skip_ws();
      if (at_end()) break;
      expect('|');
    }
    out.function = DnfFunction::from_clauses(std::move(clauses), std::move(universe));
    return out;
  }

 private:
  Clause parse_clause(VariableTable& names, std::vector<VarId>& universe) {
    skip_ws();
    Clause c;
    auto add = [&](const std::string& name) {
      bool known = names.contains(name);
      VarId v = names.intern(name);
      if (!known) universe.push_back(v);
      c.push_back(v);
    };
    if (peek() == '(') {
      ++pos_;
      for (;;) {
        skip_ws();
        add(parse_name());
        skip_ws();
        if (peek() == '&') {
          ++pos_;
          continue;
        }
        break;
      }
      expect(')');
    } else {
      add(parse_name());
    }
    return c;
  }

  std::string parse_name() {
    skip_ws();
    std::size_t start = pos_;
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      throw ParseError(at_end() ? "expected variable name, found end of input"
                                : std::string("expected variable name, found '") + text_[pos_] + "'",
                       pos_);
    ++pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                         text_[pos_] == '.'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      throw ParseError(at_end() ? std::string("expected '") + c + "', found end of input"
                                : std::string("expected '") + c + "', found '" + text_[pos_] + "'",
                       pos_);
    }
    ++pos_;
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParsedLineage parse_dnf(std::string_view text) { return detail::DnfParser(text).parse(); }

/// Renders f in the lineage grammar. A `vars{...}` prefix is emitted when the universe
/// holds variables that occur in no clause.
inline std::string to_string(const DnfFunction& f, const VariableTable& names) {
  std::string out;
  std::vector<VarId> mentioned = f.mentioned();
  if (mentioned != f.universe()) {
    out += "vars{";
    for (std::size_t i = 0; i < f.universe().size(); ++i) {
      if (i) out += ",";
      out += names.name(f.universe()[i]);
    }
    out += "} ";
  }
  if (f.is_constant()) return out + (*f.constant_value() ? "1" : "0");
  for (std::size_t i = 0; i < f.clauses().size(); ++i) {
    if (i) out += " | ";
    const auto& c = f.clauses()[i];
    if (c.size() == 1) {
      out += names.name(c.front());
      continue;
    }
    out += "(";
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j) out += " & ";
      out += names.name(c[j]);
    }
    out += ")";
  }
  return out;
}

/// Maps an arbitrary label onto the lineage name alphabet `[A-Za-z_][A-Za-z0-9_.]*`.
inline std::string sanitize_name(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  if (out.empty() || !(std::isalpha(static_cast<unsigned char>(out.front())) || out.front() == '_'))
    out.insert(out.begin(), '_');
  return out;
}

}  // namespace banzhaf

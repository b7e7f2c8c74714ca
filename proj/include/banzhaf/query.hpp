#pragma once

// A small SPJU evaluator over CSV relations. Queries are datalog-style rules
//
//   Q(X) :- R(X,Y), S(Y,Z), Z > 5.
//
// where identifiers starting with an upper-case letter or '_' are variables and
// lower-case identifiers, numbers and quoted strings are constants. Several rules
// with the same head form a union. Each satisfying grounding of a rule contributes
// one clause (its endogenous facts) to the lineage of the produced tuple.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "banzhaf/lineage.hpp"
#include "banzhaf/numeric.hpp"

namespace banzhaf {

using Tuple = std::vector<std::string>;

struct Fact {
  std::string relation;
  Tuple tuple;
  bool endogenous = true;
  std::optional<VarId> var;  // endogenous facts only

  std::string display() const {
    std::string s = relation + "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) s += (i ? "," : "") + tuple[i];
    return s + ")";
  }
};

class DatabaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Database {
 public:
  struct Relation {
    std::string name;
    std::size_t arity = 0;
    bool endogenous = true;
    std::vector<std::size_t> facts;  // indices into facts_
  };

  void add_relation(const std::string& name, std::size_t arity, bool endogenous = true) {
    if (by_name_.count(name)) throw DatabaseError("relation " + name + " declared twice");
    by_name_[name] = relations_.size();
    relations_.push_back({name, arity, endogenous, {}});
  }

  /// Adds a fact unless an identical one exists; returns its index.
  std::size_t add_fact(const std::string& relation, Tuple tuple, std::optional<bool> endogenous = std::nullopt) {
    Relation& r = relation_mut(relation);
    if (tuple.size() != r.arity)
      throw DatabaseError("relation " + relation + " has arity " + std::to_string(r.arity) + ", got a tuple of " +
                          std::to_string(tuple.size()));
    std::string key = relation + '\x1f' + join(tuple);
    if (auto it = fact_index_.find(key); it != fact_index_.end()) return it->second;
    Fact f{relation, std::move(tuple), endogenous.value_or(r.endogenous), std::nullopt};
    if (f.endogenous) {
      std::string name = sanitize_name(f.display());
      std::string unique = name;
      for (int n = 2; names_.contains(unique); ++n) unique = name + "." + std::to_string(n);
      f.var = names_.intern(unique);
      var_fact_.push_back(facts_.size());
    }
    std::size_t idx = facts_.size();
    facts_.push_back(std::move(f));
    fact_index_.emplace(std::move(key), idx);
    r.facts.push_back(idx);
    return idx;
  }

  bool has_relation(const std::string& name) const { return by_name_.count(name) != 0; }
  const Relation& relation(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw DatabaseError("unknown relation " + name);
    return relations_[it->second];
  }
  const std::vector<Relation>& relations() const { return relations_; }
  const std::vector<Fact>& facts() const { return facts_; }
  const Fact& fact(std::size_t idx) const { return facts_.at(idx); }
  const Fact& fact_of(VarId v) const { return facts_.at(var_fact_.at(index_of(v))); }

  std::optional<std::size_t> find_fact(const std::string& relation, const Tuple& tuple) const {
    auto it = fact_index_.find(relation + '\x1f' + join(tuple));
    if (it == fact_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Lineage variable names, indexed by VarId.
  const VariableTable& names() const { return names_; }
  std::size_t num_endogenous() const { return var_fact_.size(); }

  /// Loads a schema JSON file; CSV paths are relative to its directory.
  static Database load(const std::filesystem::path& schema_file) {
    std::ifstream in(schema_file);
    if (!in) throw DatabaseError("cannot open schema " + schema_file.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DatabaseError("schema " + schema_file.string() + ": " + e.what());
    }
    Database db;
    const auto base = schema_file.parent_path();
    try {
      for (const auto& r : j.at("relations")) {
        std::string name = r.at("name").get<std::string>();
        db.add_relation(name, r.at("arity").get<std::size_t>(), r.value("endogenous", true));
        db.load_csv(name, base / r.at("csv").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw DatabaseError("schema " + schema_file.string() + ": " + e.what());
    }
    return db;
  }

  /// Header-less CSV; an extra trailing column is read as the `__exo` flag (0/1).
  void load_csv(const std::string& relation, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatabaseError("cannot open " + path.string());
    const std::size_t arity = this->relation(relation).arity;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
      Tuple fields;
      try {
        fields = split_csv(line);
      } catch (const std::runtime_error& e) {
        throw DatabaseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
      std::optional<bool> endo;
      if (fields.size() == arity + 1) {
        const std::string& flag = fields.back();
        if (flag != "0" && flag != "1")
          throw DatabaseError(path.string() + ":" + std::to_string(lineno) + ": __exo column must be 0 or 1, got '" +
                              flag + "'");
        endo = flag == "0";
        fields.pop_back();
      }
      if (fields.size() != arity)
        throw DatabaseError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(arity) +
                            " fields, got " + std::to_string(fields.size()));
      add_fact(relation, std::move(fields), endo);
    }
  }

  static Tuple split_csv(std::string_view line) {
    Tuple out;
    std::string cur;
    bool quoted = false, was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = was_quoted = true;
      } else if (c == ',') {
        out.push_back(was_quoted ? cur : trim(cur));
        cur.clear();
        was_quoted = false;
      } else {
        cur += c;
      }
    }
    if (quoted) throw std::runtime_error("unterminated quote");
    out.push_back(was_quoted ? cur : trim(cur));
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
  }
  static std::string join(const Tuple& t) {
    std::string k;
    for (const auto& v : t) {
      k += v;
      k += '\x1e';
    }
    return k;
  }
  Relation& relation_mut(const std::string& name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw DatabaseError("unknown relation " + name);
    return relations_[it->second];
  }

  std::vector<Relation> relations_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<Fact> facts_;
  std::unordered_map<std::string, std::size_t> fact_index_;
  std::vector<std::size_t> var_fact_;
  VariableTable names_;
};

// ---------------------------------------------------------------------------
// Queries

struct Term {
  bool is_var = false;
  std::string text;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  std::string relation;
  std::vector<Term> args;
};

enum class CmpOp { lt, le, eq, ne, ge, gt };

struct Condition {
  Term lhs;
  CmpOp op = CmpOp::eq;
  Term rhs;
};

struct Rule {
  std::string head;
  std::vector<std::string> head_vars;
  std::vector<Atom> atoms;
  std::vector<Condition> conditions;
};

struct Query {
  std::vector<Rule> rules;
  std::size_t arity() const { return rules.empty() ? 0 : rules.front().head_vars.size(); }
  bool is_boolean() const { return arity() == 0; }
};

namespace detail {

inline std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double d = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return d;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Numeric comparison when both sides parse as numbers, lexicographic otherwise.
inline bool compare(const std::string& a, CmpOp op, const std::string& b) {
  int c;
  auto na = detail::as_number(a), nb = detail::as_number(b);
  if (na && nb) {
    c = *na < *nb ? -1 : (*na > *nb ? 1 : 0);
  } else {
    c = a.compare(b);
    c = c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  switch (op) {
    case CmpOp::lt: return c < 0;
    case CmpOp::le: return c <= 0;
    case CmpOp::eq: return c == 0;
    case CmpOp::ne: return c != 0;
    case CmpOp::ge: return c >= 0;
    case CmpOp::gt: return c > 0;
  }
  return false;
}

namespace detail {

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  Query parse() {
    Query q;
    skip();
    while (!at_end()) {
      q.rules.push_back(rule());
      skip();
    }
    if (q.rules.empty()) throw ParseError("query has no rules", 0);
    for (const auto& r : q.rules) {
      if (r.head != q.rules.front().head || r.head_vars.size() != q.arity())
        throw ParseError("all rules of a union must share the head name and arity", 0);
    }
    return q;
  }

 private:
  Rule rule() {
    Rule r;
    r.head = ident();
    skip();
    if (peek() == '(') {
      ++pos_;
      skip();
      if (peek() != ')') {
        for (;;) {
          Term t = term();
          if (!t.is_var) throw ParseError("head arguments must be variables", pos_);
          r.head_vars.push_back(t.text);
          skip();
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect(")");
    }
    expect(":-");
    for (;;) {
      skip();
      std::size_t save = pos_;
      Term lhs = term();
      skip();
      if (!lhs.is_var && lhs.text.size() && peek() == '(' && std::isalpha(static_cast<unsigned char>(text_[save]))) {
        r.atoms.push_back(atom_rest(lhs.text));
      } else if (lhs.is_var && peek() == '(') {
        r.atoms.push_back(atom_rest(lhs.text));
      } else {
        Condition c;
        c.lhs = std::move(lhs);
        c.op = op();
        c.rhs = term();
        r.conditions.push_back(std::move(c));
      }
      skip();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(".");
      break;
    }
    std::set<std::string> bound;
    for (const auto& a : r.atoms)
      for (const auto& t : a.args)
        if (t.is_var) bound.insert(t.text);
    for (const auto& v : r.head_vars)
      if (!bound.count(v)) throw ParseError("head variable " + v + " does not occur in any atom", pos_);
    for (const auto& c : r.conditions)
      for (const Term* t : {&c.lhs, &c.rhs})
        if (t->is_var && !bound.count(t->text))
          throw ParseError("condition variable " + t->text + " does not occur in any atom", pos_);
    if (r.atoms.empty()) throw ParseError("rule body has no atoms", pos_);
    return r;
  }

  Atom atom_rest(std::string relation) {
    Atom a{std::move(relation), {}};
    expect("(");
    skip();
    if (peek() != ')') {
      for (;;) {
        a.args.push_back(term());
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect(")");
    return a;
  }

  CmpOp op() {
    skip();
    static const std::pair<std::string_view, CmpOp> ops[] = {{"<=", CmpOp::le}, {">=", CmpOp::ge}, {"!=", CmpOp::ne},
                                                              {"<>", CmpOp::ne}, {"<", CmpOp::lt},  {">", CmpOp::gt},
                                                              {"=", CmpOp::eq}};
    for (auto [s, o] : ops) {
      if (text_.substr(pos_).starts_with(s)) {
        pos_ += s.size();
        return o;
      }
    }
    throw ParseError("expected an atom or a comparison", pos_);
  }

  Term term() {
    skip();
    if (at_end()) throw ParseError("unexpected end of query", pos_);
    char c = text_[pos_];
    if (c == '"' || c == '\'') {
      std::size_t end = text_.find(c, pos_ + 1);
      if (end == std::string_view::npos) throw ParseError("unterminated string", pos_);
      Term t{false, std::string(text_.substr(pos_ + 1, end - pos_ - 1))};
      pos_ = end + 1;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      std::size_t start = pos_++;
      while (!at_end() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                           (text_[pos_] == '.' && pos_ + 1 < text_.size() &&
                            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))))
        ++pos_;
      return {false, std::string(text_.substr(start, pos_ - start))};
    }
    std::string id = ident();
    bool var = std::isupper(static_cast<unsigned char>(id.front())) || id.front() == '_';
    return {var, id};
  }

  std::string ident() {
    skip();
    std::size_t start = pos_;
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      throw ParseError("expected identifier", pos_);
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(std::string_view s) {
    skip();
    if (!text_.substr(pos_).starts_with(s)) throw ParseError("expected '" + std::string(s) + "'", pos_);
    pos_ += s.size();
  }

  void skip() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == '%') {
        while (!at_end() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool at_end() const { return pos_ >= text_.size(); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Query parse_query(std::string_view text) { return detail::QueryParser(text).parse(); }

// ---------------------------------------------------------------------------
// Evaluation

/// Which facts exist: exogenous facts always, endogenous ones when the predicate says so.
using Presence = std::function<bool(VarId)>;

/// Calls `emit(rule_index, head_tuple, fact_indices)` for every satisfying grounding.
template <class Emit>
void for_each_grounding(const Query& q, const Database& db, const Emit& emit, const Presence& present = {}) {
  for (std::size_t ri = 0; ri < q.rules.size(); ++ri) {
    const Rule& r = q.rules[ri];
    const std::size_t n = r.atoms.size();
    for (const auto& a : r.atoms) {
      if (!db.has_relation(a.relation)) throw DatabaseError("unknown relation " + a.relation);
      if (db.relation(a.relation).arity != a.args.size())
        throw DatabaseError("atom " + a.relation + " has " + std::to_string(a.args.size()) + " arguments, relation has arity " +
                            std::to_string(db.relation(a.relation).arity));
    }

    // Positions bound before each atom is visited (left-to-right order), and hash indexes on them.
    std::set<std::string> seen;
    std::vector<std::vector<std::size_t>> keypos(n);
    std::vector<std::unordered_map<std::string, std::vector<std::size_t>>> index(n);
    std::vector<std::vector<const Condition*>> checks(n);
    for (std::size_t ai = 0; ai < n; ++ai) {
      const Atom& a = r.atoms[ai];
      for (std::size_t p = 0; p < a.args.size(); ++p)
        if (!a.args[p].is_var || seen.count(a.args[p].text)) keypos[ai].push_back(p);
      for (const auto& t : a.args)
        if (t.is_var) seen.insert(t.text);
      for (const auto& c : r.conditions) {
        bool ready = (!c.lhs.is_var || seen.count(c.lhs.text)) && (!c.rhs.is_var || seen.count(c.rhs.text));
        bool done_before = false;
        for (std::size_t prev = 0; prev < ai; ++prev)
          done_before = done_before || std::find(checks[prev].begin(), checks[prev].end(), &c) != checks[prev].end();
        if (ready && !done_before) checks[ai].push_back(&c);
      }
      for (std::size_t fi : db.relation(a.relation).facts) {
        const Fact& f = db.fact(fi);
        if (f.endogenous && present && !present(*f.var)) continue;
        std::string key;
        for (std::size_t p : keypos[ai]) key += f.tuple[p] + '\x1e';
        index[ai][key].push_back(fi);
      }
    }

    std::map<std::string, std::string> binding;
    std::vector<std::size_t> chosen(n);
    auto value = [&](const Term& t) -> const std::string& { return t.is_var ? binding.at(t.text) : t.text; };

    std::function<void(std::size_t)> step = [&](std::size_t ai) {
      if (ai == n) {
        Tuple head;
        for (const auto& v : r.head_vars) head.push_back(binding.at(v));
        emit(ri, head, chosen);
        return;
      }
      const Atom& a = r.atoms[ai];
      std::string key;
      for (std::size_t p : keypos[ai]) key += value(a.args[p]) + '\x1e';
      auto it = index[ai].find(key);
      if (it == index[ai].end()) return;
      for (std::size_t fi : it->second) {
        const Fact& f = db.fact(fi);
        std::vector<std::string> added;
        bool ok = true;
        for (std::size_t p = 0; p < a.args.size() && ok; ++p) {
          const Term& t = a.args[p];
          if (!t.is_var) continue;
          auto b = binding.find(t.text);
          if (b == binding.end()) {
            binding.emplace(t.text, f.tuple[p]);
            added.push_back(t.text);
          } else {
            ok = b->second == f.tuple[p];  // repeated variable within one atom
          }
        }
        for (const Condition* c : checks[ai]) ok = ok && compare(value(c->lhs), c->op, value(c->rhs));
        if (ok) {
          chosen[ai] = fi;
          step(ai + 1);
        }
        for (const auto& v : added) binding.erase(v);
      }
    };
    step(0);
  }
}

/// Output tuples under set semantics; a Boolean query yields {()} when true.
inline std::set<Tuple> evaluate(const Query& q, const Database& db, const Presence& present = {}) {
  std::set<Tuple> out;
  for_each_grounding(
      q, db, [&](std::size_t, const Tuple& t, const std::vector<std::size_t>&) { out.insert(t); }, present);
  return out;
}

namespace detail {

inline Clause grounding_clause(const Database& db, const std::vector<std::size_t>& facts) {
  Clause c;
  for (std::size_t fi : facts) {
    const Fact& f = db.fact(fi);
    if (f.endogenous) c.push_back(*f.var);
  }
  return c;
}

}  // namespace detail

/// Lineage of one output tuple over the endogenous facts that occur in it.
inline DnfFunction lineage(const Query& q, const Database& db, const Tuple& t) {
  std::vector<Clause> clauses;
  bool found = false;
  for_each_grounding(q, db, [&](std::size_t, const Tuple& head, const std::vector<std::size_t>& facts) {
    if (head != t) return;
    found = true;
    clauses.push_back(detail::grounding_clause(db, facts));
  });
  if (!found) throw std::invalid_argument("tuple is not in the query result");
  return DnfFunction::from_clauses(std::move(clauses));
}

/// Lineage of every output tuple.
inline std::map<Tuple, DnfFunction> lineage_all(const Query& q, const Database& db) {
  std::map<Tuple, std::vector<Clause>> acc;
  for_each_grounding(q, db, [&](std::size_t, const Tuple& head, const std::vector<std::size_t>& facts) {
    acc[head].push_back(detail::grounding_clause(db, facts));
  });
  std::map<Tuple, DnfFunction> out;
  for (auto& [t, cs] : acc) out.emplace(t, DnfFunction::from_clauses(std::move(cs)));
  return out;
}

/// at(X) sets are pairwise nested or disjoint.
inline bool is_hierarchical(const Rule& r) {
  std::map<std::string, std::set<std::size_t>> at;
  for (std::size_t i = 0; i < r.atoms.size(); ++i)
    for (const auto& t : r.atoms[i].args)
      if (t.is_var) at[t.text].insert(i);
  for (auto a = at.begin(); a != at.end(); ++a) {
    for (auto b = std::next(a); b != at.end(); ++b) {
      const auto& x = a->second;
      const auto& y = b->second;
      bool x_in_y = std::includes(y.begin(), y.end(), x.begin(), x.end());
      bool y_in_x = std::includes(x.begin(), x.end(), y.begin(), y.end());
      std::vector<std::size_t> common;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
      if (!x_in_y && !y_in_x && !common.empty()) return false;
    }
  }
  return true;
}

/// Per-rule results for a union.
inline std::vector<bool> is_hierarchical(const Query& q) {
  std::vector<bool> out;
  for (const auto& r : q.rules) out.push_back(is_hierarchical(r));
  return out;
}

}  // namespace banzhaf

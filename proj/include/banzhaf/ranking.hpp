#pragma once

// Top-k selection and ranking of variables by Banzhaf value, driven by the same
// shared partial d-tree as the anytime approximation.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "banzhaf/adaban.hpp"

namespace banzhaf {

struct RankedVar {
  ApproxInterval interval;
  std::size_t rank = 0;                   // 1-based position in the output order
  bool tied = false;                      // equal point value with a neighbour
  std::optional<std::size_t> pruned_at;   // Shannon expansions when dominated
};

struct RankOutcome {
  std::vector<RankedVar> ranked;  // output order
  std::vector<VarId> selected;    // top-k (all variables for rankings)
  bool certain = false;
  bool switched_to_eps = false;   // certain mode hit the expansion cap and fell back
  std::size_t expansions = 0;
};

struct RankOptions {
  Budget budget;
  /// Certain top-k only: after this many Shannon expansions, continue in ε mode.
  std::optional<std::size_t> certain_expansion_cap;
  Epsilon fallback_eps{Rational(1, 10)};
  LeafStrategy strategy = LeafStrategy::widest;
};

namespace detail {

struct Candidate {
  VarId var;
  BigInt lo, hi;
  bool point() const { return lo == hi; }
};

inline bool by_lower_desc(const Candidate& a, const Candidate& b) {
  if (a.lo != b.lo) return a.lo > b.lo;
  return a.var < b.var;
}

class RankState {
 public:
  RankState(const DnfFunction& f, const RankOptions& opt) : approx_(f, opt.strategy), vars_(f.universe()) {}

  Approximator& approx() { return approx_; }
  const std::vector<VarId>& vars() const { return vars_; }

  std::vector<Candidate> refresh(const std::vector<VarId>& which) {
    std::vector<Candidate> out;
    out.reserve(which.size());
    for (VarId v : which) {
      auto [lo, hi] = approx_.update(v);
      out.push_back({v, std::move(lo), std::move(hi)});
    }
    return out;
  }

  ApproxInterval interval(const Candidate& c, const Epsilon& eps) {
    ApproxInterval a;
    a.var = c.var;
    a.lower = c.lo;
    a.upper = c.hi;
    if (auto cert = certify(c.lo, c.hi, eps)) {
      a.certified = true;
      a.certified_lo = std::move(cert->first);
      a.certified_hi = std::move(cert->second);
    }
    a.expansions = approx_.tree().shannon_expansions();
    return a;
  }

 private:
  Approximator approx_;
  std::vector<VarId> vars_;
};

// Variables dominated by at least k others (strictly larger lower bounds).
inline std::vector<VarId> dominated(const std::vector<Candidate>& cs, std::size_t k) {
  std::vector<BigInt> lows;
  lows.reserve(cs.size());
  for (const auto& c : cs) lows.push_back(c.lo);
  std::sort(lows.begin(), lows.end(), std::greater<>());
  std::vector<VarId> out;
  if (k >= lows.size()) return out;
  const BigInt& kth = lows[k - 1];
  for (const auto& c : cs)
    if (kth > c.hi) out.push_back(c.var);
  return out;
}

inline bool separated_top(const std::vector<Candidate>& sorted, std::size_t k) {
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t u = k; u < sorted.size(); ++u) {
      const auto& a = sorted[s];
      const auto& b = sorted[u];
      if (a.lo > b.hi) continue;
      if (a.point() && b.point() && a.lo == b.lo) continue;
      return false;
    }
  }
  return true;
}

// Widest non-point interval among the variables straddling the k-boundary.
inline std::optional<VarId> boundary_target(const std::vector<Candidate>& sorted, std::size_t k) {
  BigInt max_out_hi = -1;
  for (std::size_t u = k; u < sorted.size(); ++u) max_out_hi = std::max(max_out_hi, sorted[u].hi);
  BigInt min_in_lo = sorted.empty() ? BigInt(0) : sorted[k - 1].lo;
  std::optional<VarId> best;
  BigInt best_width = -1;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& c = sorted[i];
    if (c.point()) continue;
    bool straddles = i < k ? c.lo <= max_out_hi : c.hi >= min_in_lo;
    if (!straddles) continue;
    BigInt w = c.hi - c.lo;
    if (w > best_width) {
      best_width = std::move(w);
      best = c.var;
    }
  }
  return best;
}

inline void mark_ties(std::vector<RankedVar>& ranked) {
  for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
    const auto& a = ranked[i].interval;
    const auto& b = ranked[i + 1].interval;
    if (a.lower == a.upper && b.lower == b.upper && a.lower == b.lower) ranked[i].tied = ranked[i + 1].tied = true;
  }
}

}  // namespace detail

/// Top-k by Banzhaf value with pruning of dominated variables. With eps == nullptr the
/// result is exact (up to ties, resolved by smallest id); otherwise every surviving
/// interval is refined to eps and the top-k is read off the interval midpoints.
inline RankOutcome topk(const DnfFunction& f, std::size_t k, const Epsilon* eps, const RankOptions& opt = {}) {
  if (k == 0 || k > f.num_vars()) throw std::invalid_argument("topk: k must lie in [1, number of variables]");
  detail::RankState st(f, opt);
  RankOutcome out;
  std::vector<VarId> alive = st.vars();
  std::map<VarId, std::size_t> pruned_at;
  std::map<VarId, detail::Candidate> last;
  const Epsilon* mode = eps;
  Epsilon zero;

  for (;;) {
    auto cs = st.refresh(alive);
    for (const auto& c : cs) last.insert_or_assign(c.var, c);
    std::vector<VarId> gone = detail::dominated(cs, k);
    if (!gone.empty()) {
      std::set<VarId> g(gone.begin(), gone.end());
      for (VarId v : gone) pruned_at[v] = st.approx().tree().shannon_expansions();
      alive.erase(std::remove_if(alive.begin(), alive.end(), [&](VarId v) { return g.count(v) > 0; }), alive.end());
      cs.erase(std::remove_if(cs.begin(), cs.end(), [&](const auto& c) { return g.count(c.var) > 0; }), cs.end());
    }
    std::sort(cs.begin(), cs.end(), detail::by_lower_desc);

    std::optional<VarId> target;
    if (!mode) {
      if (detail::separated_top(cs, k)) {
        out.certain = true;
        break;
      }
      target = detail::boundary_target(cs, k);
    } else {
      BigInt best_width = -1;
      for (const auto& c : cs) {
        if (certify(c.lo, c.hi, *mode)) continue;
        BigInt w = c.hi - c.lo;
        if (w > best_width) {
          best_width = std::move(w);
          target = c.var;
        }
      }
      if (!target) {
        out.certain = mode->is_zero();
        break;
      }
    }
    if (!target || opt.budget.exhausted(st.approx().tree().shannon_expansions())) break;
    if (!mode && opt.certain_expansion_cap && st.approx().tree().shannon_expansions() >= *opt.certain_expansion_cap) {
      mode = &opt.fallback_eps;
      out.switched_to_eps = true;
      continue;
    }
    if (!st.approx().refine_step(*target)) break;
  }

  const Epsilon& report_eps = mode ? *mode : zero;
  std::vector<RankedVar> survivors, pruned;
  for (VarId v : st.vars()) {
    RankedVar r;
    r.interval = st.interval(last.at(v), report_eps);
    if (auto it = pruned_at.find(v); it != pruned_at.end()) {
      r.pruned_at = it->second;
      pruned.push_back(std::move(r));
    } else {
      survivors.push_back(std::move(r));
    }
  }
  auto order = [&](const RankedVar& a, const RankedVar& b) {
    if (mode) {
      Rational ma = a.interval.midpoint(), mb = b.interval.midpoint();
      if (ma != mb) return ma > mb;
    } else if (a.interval.lower != b.interval.lower) {
      return a.interval.lower > b.interval.lower;
    }
    return a.interval.var < b.interval.var;
  };
  std::sort(survivors.begin(), survivors.end(), order);
  std::sort(pruned.begin(), pruned.end(), order);
  for (std::size_t i = 0; i < k && i < survivors.size(); ++i) out.selected.push_back(survivors[i].interval.var);
  out.ranked = std::move(survivors);
  for (auto& r : pruned) out.ranked.push_back(std::move(r));
  for (std::size_t i = 0; i < out.ranked.size(); ++i) out.ranked[i].rank = i + 1;
  detail::mark_ties(out.ranked);
  out.expansions = st.approx().tree().shannon_expansions();
  return out;
}

inline RankOutcome topk_certain(const DnfFunction& f, std::size_t k, const RankOptions& opt = {}) {
  return topk(f, k, nullptr, opt);
}

inline RankOutcome topk_eps(const DnfFunction& f, std::size_t k, const Epsilon& eps, const RankOptions& opt = {}) {
  return topk(f, k, &eps, opt);
}

/// Full ranking. ε = 0: refine until all intervals are pairwise disjoint or equal points.
/// ε > 0: refine each interval to ε and order by midpoint. Ties go to the smaller id.
inline RankOutcome rank_eps(const DnfFunction& f, const Epsilon& eps, const RankOptions& opt = {}) {
  detail::RankState st(f, opt);
  RankOutcome out;
  std::vector<detail::Candidate> cs;

  if (eps.is_zero()) {
    for (;;) {
      cs = st.refresh(st.vars());
      std::sort(cs.begin(), cs.end(), detail::by_lower_desc);
      std::optional<VarId> target;
      BigInt best_width = -1;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        bool overlaps = false;
        for (std::size_t j = 0; j < cs.size() && !overlaps; ++j) {
          if (i == j) continue;
          const auto& a = cs[i];
          const auto& b = cs[j];
          bool disjoint = a.lo > b.hi || b.lo > a.hi;
          bool equal_points = a.point() && b.point() && a.lo == b.lo;
          overlaps = !disjoint && !equal_points;
        }
        if (!overlaps || cs[i].point()) continue;
        BigInt w = cs[i].hi - cs[i].lo;
        if (w > best_width) {
          best_width = std::move(w);
          target = cs[i].var;
        }
      }
      if (!target) {
        out.certain = true;
        break;
      }
      if (opt.budget.exhausted(st.approx().tree().shannon_expansions()) || !st.approx().refine_step(*target)) break;
    }
  } else {
    for (VarId v : st.vars()) st.approx().approximate(v, eps, opt.budget);
    cs = st.refresh(st.vars());
  }

  for (const auto& c : cs) {
    RankedVar r;
    r.interval = st.interval(c, eps);
    out.ranked.push_back(std::move(r));
  }
  std::sort(out.ranked.begin(), out.ranked.end(), [&](const RankedVar& a, const RankedVar& b) {
    if (eps.is_zero()) {
      if (a.interval.lower != b.interval.lower) return a.interval.lower > b.interval.lower;
    } else {
      Rational ma = a.interval.midpoint(), mb = b.interval.midpoint();
      if (ma != mb) return ma > mb;
    }
    return a.interval.var < b.interval.var;
  });
  for (std::size_t i = 0; i < out.ranked.size(); ++i) {
    out.ranked[i].rank = i + 1;
    out.selected.push_back(out.ranked[i].interval.var);
  }
  detail::mark_ties(out.ranked);
  out.expansions = st.approx().tree().shannon_expansions();
  return out;
}

/// |reported ∩ truth| / k.
inline Rational precision_at_k(const std::set<VarId>& reported, const std::set<VarId>& truth) {
  if (reported.size() != truth.size() || reported.empty())
    throw std::invalid_argument("precision_at_k: sets must be non-empty and of equal size");
  std::size_t hit = 0;
  for (VarId v : reported) hit += truth.count(v);
  return Rational(hit, reported.size());
}

/// Precision against exact values; when several variables tie at the k-th value, the best
/// valid ground-truth set is used.
inline Rational precision_at_k(const std::set<VarId>& reported, const std::map<VarId, BigInt>& exact) {
  const std::size_t k = reported.size();
  if (k == 0 || k > exact.size()) throw std::invalid_argument("precision_at_k: k out of range");
  std::vector<BigInt> values;
  for (const auto& [v, b] : exact) values.push_back(b);
  std::sort(values.begin(), values.end(), std::greater<>());
  const BigInt& kth = values[k - 1];
  std::size_t above = 0, hit_above = 0, hit_tied = 0;
  for (const auto& [v, b] : exact) {
    if (b > kth) {
      ++above;
      hit_above += reported.count(v);
    } else if (b == kth) {
      hit_tied += reported.count(v);
    }
  }
  return Rational(hit_above + std::min(hit_tied, k - above), k);
}

}  // namespace banzhaf

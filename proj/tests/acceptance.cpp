// Acceptance run: one PASS/FAIL line per criterion, with measured detail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "banzhaf/banzhaf.hpp"
#include "support/oracle.hpp"
#include "support/random_db.hpp"

using namespace banzhaf;

namespace {

// Pinned thresholds.
constexpr double kGoldenSeconds = 1.0;
constexpr double kTableSeconds = 30.0;
constexpr double kShapleyTolerance = 5e-4;
constexpr double kCorpusSeconds = 300.0;
constexpr double kPossibleWorldsSeconds = 60.0;
constexpr std::size_t kCorpusSize = 500;
constexpr std::size_t kSandwichCorpus = 100;
constexpr double kHardWinFraction = 0.8;
constexpr std::size_t kHardInstances = 30;
constexpr std::size_t kMcTriples = 20;
constexpr std::size_t kMcRequired = 19;
constexpr std::size_t kMcSamples = 10000;
constexpr double kMcDelta = 0.001;
constexpr std::size_t kRandomDatabases = 50;

const std::filesystem::path kFixtures = FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::size_t unexpected = 0;  // failures outside the known list
  std::vector<std::string> notes;
  std::vector<std::string> warnings;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      ++unexpected;
      notes.push_back("failed: " + what);
    }
  }
  // A golden that contradicts an independent computation. It keeps the criterion red;
  // the run only errors if it starts passing, so the list cannot go stale.
  void known_unattainable(bool ok, const std::string& what, const std::string& why) {
    if (ok) {
      ++unexpected;
      notes.push_back("known-unattainable check now passes, update the list: " + what);
      return;
    }
    pass = false;
    notes.push_back("failed (known unattainable): " + what + "; " + why);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string str(const BigInt& v) { return to_string(v); }

const std::vector<DnfFunction>& corpus() {
  static const std::vector<DnfFunction> c = [] {
    std::mt19937_64 rng(20240601);
    std::vector<DnfFunction> out;
    for (std::size_t i = 0; i < kCorpusSize; ++i) out.push_back(oracle::random_dnf(rng, {5, 20, 1, 25, 4}));
    return out;
  }();
  return c;
}

const std::vector<std::map<VarId, BigInt>>& corpus_truth() {
  static const std::vector<std::map<VarId, BigInt>> t = [] {
    std::vector<std::map<VarId, BigInt>> out;
    for (const auto& f : corpus()) out.push_back(oracle::banzhaf_all(f));
    return out;
  }();
  return t;
}

// ---------------------------------------------------------------------------

Outcome worked_examples() {
  Outcome o;
  const auto start = Clock::now();

  // x1 | (x2 & !x3)
  auto phi = [](std::uint64_t a) { return (a & 1) || ((a & 2) && !(a & 4)); };
  o.check(brute_banzhaf_mask(3, 0, phi) == 3, "negated example x1 = 3");
  o.check(brute_banzhaf_mask(3, 1, phi) == 1, "negated example x2 = 1");
  o.check(brute_banzhaf_mask(3, 2, phi) == -1, "negated example x3 = -1");

  Database db = Database::load(kFixtures / "join_db" / "schema.json");
  Query q = parse_query("Q() :- R(X,Y,Z), S(X,Y,V), T(X,U).");
  // subset-counting definition, enumerated directly: D' ⊆ D∖{f} with Q false without f, true with it
  auto critical_sets = [&](std::size_t fi) {
    const std::uint32_t fv = index_of(*db.fact(fi).var);
    long long n = 0;
    for (std::uint64_t s = 0; s < 16; ++s) {
      if (s >> fv & 1) continue;
      auto without = evaluate(q, db, [&](VarId v) { return (s >> index_of(v) & 1) != 0; });
      auto with = evaluate(q, db, [&](VarId v) { return index_of(v) == fv || (s >> index_of(v) & 1); });
      n += with.size() > without.size();
    }
    return n;
  };
  const std::size_t r123 = *db.find_fact("R", {"1", "2", "3"});
  const std::size_t s124 = *db.find_fact("S", {"1", "2", "4"});
  Rational b_r = banzhaf_fact(q, db, {}, r123).lower;
  Rational b_s = banzhaf_fact(q, db, {}, s124).lower;
  o.known_unattainable(b_r == 2, "fact R(1,2,3) = 2 (got " + to_string(b_r) + ")",
                       "direct enumeration finds " + std::to_string(critical_sets(r123)) +
                           " critical sets: T(1,6) with any non-empty subset of the two S facts");
  o.check(b_s == 1 && critical_sets(s124) == 1, "fact S(1,2,4) = 1");

  auto p32 = parse_dnf("(x&y)|(x&z)");
  auto r32 = exaban(compile_full(p32.function), *p32.names.find("x"));
  o.check(r32.banzhaf == 3 && r32.model_count == 3, "(x&y)|(x&z) gives (3,3)");

  auto p33 = parse_dnf("(x&y)|(x&z)|u");
  VarId x = *p33.names.find("x");
  auto r33 = exaban(compile_full(p33.function), x);
  o.check(r33.model_count == 11, "#phi = 11");
  o.check(r33.banzhaf == 3, "Banzhaf = 3");
  o.check(idnf_count(lower_fn(p33.function)) == 5, "#L = 5");
  o.check(idnf_count(upper_fn(p33.function)) == 13, "#U = 13");
  o.check(idnf_count(lower_fn(restrict(p33.function, x, true))) == 7, "#L[x:=1] = 7");
  o.check(idnf_count(upper_fn(restrict(p33.function, x, false))) == 4, "#U[x:=0] = 4");

  BoundsQuad root = combine_mutex(combine_or({3, 7, 8, 9}, 4, {0, 8, 0, 10}, 4), combine_and({5, 7, 9, 20}, {0, 5, 0, 8}));
  o.check(root == BoundsQuad{43, 219, 136, 374}, "partial tree root quad (43, 219, 136, 374)");
  Epsilon half = Epsilon::parse("0.5");
  Rational lhs = (1 - half.value()) * Rational(root.upper_banzhaf);
  Rational rhs = (1 + half.value()) * Rational(root.lower_banzhaf);
  o.check(lhs == 68 && rhs == Rational(129, 2) && lhs > rhs && !certify(43, 136, half), "eps=0.5 check 68 > 64.5");
  auto six = certify(43, 136, Epsilon::parse("0.6"));
  o.check(six && six->first == Rational(272, 5) && six->second == Rational(344, 5), "eps=0.6 interval [54.4, 68.8]");

  double t = seconds_since(start);
  o.check(t < kGoldenSeconds, "runtime under 1 s");
  o.note("runtime " + std::to_string(t) + " s");
  return o;
}

Outcome star_table() {
  Outcome o;
  const auto start = Clock::now();
  Database db = Database::load(kFixtures / "star_db" / "schema.json");
  Query q = parse_query("Q() :- R(X), S(X,Y), T(X,Z).");
  o.check(db.num_endogenous() == 18, "18 endogenous facts");
  DnfFunction phi = lineage(q, db, {});
  o.check(phi.num_vars() == 18, "lineage over all 18 facts");

  const std::vector<long long> a1{0, 0, 9, 117, 708, 2502, 5968, 10262, 13129, 12695, 9329, 5191, 2156, 649, 134, 17, 1, 0};
  const std::vector<long long> a2{0, 0, 16, 176, 924, 2936, 6430, 10326, 12526, 11638, 8317, 4553, 1883, 572, 121, 16, 1, 0};
  VarId r1 = *db.fact(*db.find_fact("R", {"a1"})).var;
  VarId r2 = *db.fact(*db.find_fact("R", {"a2"})).var;
  CriticalVector c1 = critical_vector(phi, r1), c2 = critical_vector(phi, r2);
  for (std::size_t k = 0; k < a1.size(); ++k) {
    o.check(c1.counts.at(k) == a1[k], "R(a1) row k=" + std::to_string(k));
    o.check(c2.counts.at(k) == a2[k], "R(a2) row k=" + std::to_string(k));
  }
  o.check(c1.total() == 62867, "R(a1) total 62,867 (got " + str(c1.total()) + ")");
  o.check(c2.total() == 60435, "R(a2) total 60,435 (got " + str(c2.total()) + ")");
  double s1 = to_double(shapley_from_critical(c1)), s2 = to_double(shapley_from_critical(c2));
  // the weighted sum of the table's own rows (all matched above) is 0.27296
  Rational from_rows = 0;
  for (std::size_t k = 0; k < a1.size(); ++k) from_rows += shapley_coefficient(k, 18) * a1[k];
  char got1[96];
  std::snprintf(got1, sizeof got1, "Shapley R(a1) within 5e-4 of 0.2723 (got %.5f)", s1);
  o.known_unattainable(std::abs(s1 - 0.2723) <= kShapleyTolerance, got1,
                       "the tabulated rows themselves sum to " + std::to_string(to_double(from_rows)) +
                           ", so the printed total is off by more than the tolerance");
  o.check(std::abs(s2 - 0.2766) <= kShapleyTolerance, "Shapley R(a2) near 0.2766");
  o.check(c1.total() > c2.total() && s1 < s2, "Banzhaf and Shapley orders differ");
  // the exact algorithm agrees with the enumeration
  o.check(exaban(compile_full(phi), r1).banzhaf == c1.total(), "d-tree value for R(a1)");
  double t = seconds_since(start);
  o.check(t < kTableSeconds, "runtime under 30 s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "totals %s / %s, Shapley %.4f / %.4f, %.2f s", str(c1.total()).c_str(),
                str(c2.total()).c_str(), s1, s2, t);
  o.note(buf);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    const auto& f = corpus()[i];
    DTree t = compile_full(f);
    auto all = exaban_all(t, f.universe());
    BigInt count = oracle::count(f);
    bool ok = count == brute_count(f);
    for (VarId x : f.universe()) {
      ok = ok && all.at(x).banzhaf == corpus_truth()[i].at(x) && all.at(x).banzhaf == brute_banzhaf(f, x) &&
           all.at(x).model_count == count;
    }
    if (!ok) ++mismatches;
  }
  double t = seconds_since(start);
  o.check(mismatches == 0, std::to_string(mismatches) + " instances disagree");
  o.check(t < kCorpusSeconds, "runtime under 5 min");
  o.note(std::to_string(corpus().size()) + " instances, " + std::to_string(t) + " s");
  return o;
}

Outcome adaban_soundness() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t intervals = 0, bad = 0, uncertified = 0, not_nested = 0;
  for (const char* e : {"0", "0.01", "0.1", "0.5"}) {
    Epsilon eps = Epsilon::parse(e);
    for (std::size_t i = 0; i < corpus().size(); ++i) {
      const auto& f = corpus()[i];
      const auto& truth = corpus_truth()[i];
      Approximator a(f);
      for (VarId x : f.universe()) {
        std::optional<std::pair<BigInt, BigInt>> prev;
        auto r = a.approximate(x, eps, {}, [&](const TraceEvent& ev) {
          bool brackets = ev.lower <= truth.at(x) && truth.at(x) <= ev.upper;
          bool nested = !prev || (prev->first <= ev.lower && ev.upper <= prev->second);
          if (!brackets || !nested) ++not_nested;
          prev.emplace(ev.lower, ev.upper);
        });
        ++intervals;
        if (!r.certified) {
          ++uncertified;
          continue;
        }
        Rational b(truth.at(x));
        Rational lo_ok = (1 - eps.value()) * b, hi_ok = (1 + eps.value()) * b;
        bool sound = r.lo() >= lo_ok && r.hi() <= hi_ok && r.lo() <= r.hi();
        if (eps.is_zero()) sound = sound && r.lo() == b && r.hi() == b;
        if (!sound) ++bad;
      }
    }
  }
  o.check(bad == 0, std::to_string(bad) + " unsound certified intervals");
  o.check(uncertified == 0, std::to_string(uncertified) + " intervals not certified");
  o.check(not_nested == 0, std::to_string(not_nested) + " steps not nested or not bracketing");
  o.note(std::to_string(intervals) + " intervals over 4 eps values, " + std::to_string(seconds_since(start)) + " s");
  return o;
}

Outcome bounds_sandwich() {
  Outcome o;
  std::mt19937_64 rng(777);
  std::size_t checks = 0, violations = 0, snapshots = 0;
  for (std::size_t i = 0; i < kSandwichCorpus; ++i) {
    auto f = oracle::random_dnf(rng, {4, 12, 2, 16, 3});
    DTree t(f);
    for (;;) {
      ++snapshots;
      BoundsPropagator props(t);
      for (NodeId id = 0; id < t.size(); ++id) {
        auto truth = oracle::node_truth(t, id);
        CountBounds c = props.counts(id);
        ++checks;
        if (c.lower > truth.count || c.upper < truth.count) ++violations;
        for (VarId x : t.node(id).universe) {
          BoundsQuad q = props.bounds(id, x).quad;
          const BigInt& b = truth.banzhaf.at(x);
          ++checks;
          if (q.lower_banzhaf > b || q.upper_banzhaf < b || q.lower_count > truth.count || q.upper_count < truth.count)
            ++violations;
        }
      }
      if (t.complete()) break;
      // expand a random open leaf
      const auto& open = t.open_leaves();
      auto it = open.begin();
      std::advance(it, static_cast<long>(rng() % open.size()));
      t.expand_leaf(*it);
    }
  }
  o.check(violations == 0, std::to_string(violations) + " bracket violations");
  o.note(std::to_string(snapshots) + " snapshots, " + std::to_string(checks) + " node checks");
  return o;
}

std::vector<VarId> oracle_topk(const std::map<VarId, BigInt>& b, std::size_t k) {
  std::vector<VarId> vs;
  for (const auto& [v, _] : b) vs.push_back(v);
  std::stable_sort(vs.begin(), vs.end(), [&](VarId a, VarId c) { return b.at(a) > b.at(c); });
  vs.resize(k);
  return vs;
}

Outcome ichiban() {
  Outcome o;
  std::size_t runs = 0, wrong = 0, separated = 0, imprecise = 0;
  for (std::size_t i = 0; i < corpus().size(); ++i) {
    const auto& f = corpus()[i];
    const auto& truth = corpus_truth()[i];
    for (std::size_t k : {1u, 3u, 5u}) {
      if (k > f.num_vars()) continue;
      ++runs;
      auto r = topk_certain(f, k);
      auto want = oracle_topk(truth, k);
      if (!r.certain || std::set<VarId>(r.selected.begin(), r.selected.end()) != std::set<VarId>(want.begin(), want.end()))
        ++wrong;

      if (k + 1 > f.num_vars()) continue;
      auto order = oracle_topk(truth, f.num_vars());
      const BigInt& kth = truth.at(order[k - 1]);
      const BigInt& next = truth.at(order[k]);
      if (Rational(kth - next) <= Rational(kth) * Rational(1, 5)) continue;
      ++separated;
      auto e = topk_eps(f, k, Epsilon::parse("0.1"));
      std::set<VarId> got(e.selected.begin(), e.selected.end());
      auto top = oracle_topk(truth, k);
      if (precision_at_k(got, std::set<VarId>(top.begin(), top.end())) != 1) ++imprecise;
    }
  }
  o.check(wrong == 0, std::to_string(wrong) + " certain top-k results differ from the oracle");
  o.check(imprecise == 0, std::to_string(imprecise) + " eps=0.1 results below precision 1");
  o.check(separated > 0, "some separated instances exist");
  o.note(std::to_string(runs) + " certain runs, " + std::to_string(separated) + " separated eps runs");
  return o;
}

Outcome efficiency() {
  Outcome o;
  std::size_t wins = 0, single_wins = 0;
  std::vector<double> t_full, t_ada;
  std::size_t min_vars = 1000, max_vars = 0;
  for (std::size_t seed = 0; seed < kHardInstances; ++seed) {
    std::mt19937_64 rng(seed);
    std::size_t target = 25 + rng() % 16;
    auto f = oracle::random_pp2dnf(rng, target / 2, target - target / 2, 0.15);
    min_vars = std::min(min_vars, f.num_vars());
    max_vars = std::max(max_vars, f.num_vars());

    auto t0 = Clock::now();
    DTree full = compile_full(f);
    auto t1 = Clock::now();
    auto all = adaban_all(f, f.universe(), Epsilon::parse("0.1"));
    auto t2 = Clock::now();
    std::size_t used = 0;
    for (const auto& [v, a] : all) used = std::max(used, a.expansions);
    wins += used < full.shannon_expansions();
    single_wins += adaban(f, f.universe().front(), Epsilon::parse("0.1")).expansions < full.shannon_expansions();
    t_full.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    t_ada.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  double frac = static_cast<double>(wins) / static_cast<double>(kHardInstances);
  o.check(frac >= kHardWinFraction, "fewer Shannon expansions on " + std::to_string(wins) + "/" +
                                        std::to_string(kHardInstances) + " instances");
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu-%zu vars; fewer expansions: all variables %zu/%zu, single variable %zu/%zu; median ms: "
                "compile_full %.3f, adaban_all %.3f",
                min_vars, max_vars, wins, kHardInstances, single_wins, kHardInstances, median(t_full), median(t_ada));
  o.note(buf);
  if (!(median(t_ada) < median(t_full))) o.warnings.push_back("median wall time of adaban_all is not lower");
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < kMcTriples; ++i) {
    auto f = oracle::random_dnf(rng, {8, 16, 3, 15, 3});
    VarId x = f.universe()[rng() % f.num_vars()];
    std::uint64_t seed = 1000 + i;
    BigInt truth = oracle::banzhaf(f, x);
    auto est = mc_banzhaf(f, x, kMcSamples, seed);
    double r = hoeffding_radius(f.num_vars(), kMcSamples, kMcDelta);
    inside += std::abs(to_double(est.estimate) - to_double(truth)) <= r;
  }
  o.check(inside >= kMcRequired, std::to_string(inside) + "/20 within the band");
  o.note(std::to_string(inside) + "/" + std::to_string(kMcTriples) + " estimates inside the 99.9% Hoeffding band");
  return o;
}

Outcome possible_worlds() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(99);
  std::size_t worlds = 0, mismatches = 0;
  for (std::size_t i = 0; i < kRandomDatabases; ++i) {
    auto inst = oracle::random_instance(rng, 12);
    Query q = parse_query(inst.query_text);
    auto lin = lineage_all(q, inst.db);
    const std::size_t n = inst.db.num_endogenous();
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      auto present = [&](VarId v) { return (s >> index_of(v) & 1) != 0; };
      std::set<Tuple> expected;
      for (const auto& [t, f] : lin) {
        bool value = f.is_constant() ? *f.constant_value() : false;
        for (const auto& c : f.clauses()) value = value || std::all_of(c.begin(), c.end(), present);
        if (value) expected.insert(t);
      }
      ++worlds;
      if (evaluate(q, inst.db, present) != expected) ++mismatches;
    }
  }
  double t = seconds_since(start);
  o.check(mismatches == 0, std::to_string(mismatches) + " worlds disagree");
  o.check(t < kPossibleWorldsSeconds, "runtime under 1 min");
  o.note(std::to_string(worlds) + " worlds over " + std::to_string(kRandomDatabases) + " databases, " +
         std::to_string(t) + " s");
  return o;
}

Outcome hierarchical() {
  Outcome o;
  o.check(is_hierarchical(parse_query("Q() :- R(X,Y,Z), S(X,Y,V), T(X,U).").rules[0]), "first query is hierarchical");
  o.check(!is_hierarchical(parse_query("Q() :- R(X), S(X,Y), T(Y).").rules[0]), "second query is not hierarchical");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked-example goldens", worked_examples},
      {"18-fact Banzhaf/Shapley table", star_table},
      {"exact vs oracle on 500 random DNFs", oracle_equivalence},
      {"AdaBan interval soundness", adaban_soundness},
      {"bounds sandwich on partial trees", bounds_sandwich},
      {"IchiBan top-k correctness", ichiban},
      {"AdaBan expansions on PP2DNF family", efficiency},
      {"Monte Carlo within Hoeffding band", monte_carlo},
      {"lineage vs possible worlds", possible_worlds},
      {"hierarchical classifier", hierarchical},
  };
  int failed = 0, unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      ++o.unexpected;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    std::printf("criterion %2zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str());
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    for (const auto& w : o.warnings) std::printf("    warning: %s\n", w.c_str());
    std::fflush(stdout);
    failed += !o.pass;
    unexpected += static_cast<int>(o.unexpected);
  }
  std::printf("%d of %zu criteria failed; %d unexpected check failures\n", failed, criteria.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}

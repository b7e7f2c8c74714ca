#pragma once

// Banzhaf value of a database fact for one query answer.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "banzhaf/adaban.hpp"
#include "banzhaf/baselines.hpp"
#include "banzhaf/exact.hpp"
#include "banzhaf/query.hpp"

namespace banzhaf {

enum class Method { exact, adaban, mc };

struct MethodConfig {
  Method method = Method::exact;
  Epsilon eps;
  std::size_t samples_per_var = 50;
  std::uint64_t seed = 0;
  Budget budget;
};

struct FactValue {
  Rational lower;
  Rational upper;
  bool certified = true;  // false for MC estimates and budget-limited approximations
};

/// Value of fact `fact_index` in the lineage of tuple t. Facts that do not occur in the
/// lineage get 0.
inline FactValue banzhaf_fact(const Query& q, const Database& db, const Tuple& t, std::size_t fact_index,
                              const MethodConfig& cfg = {}) {
  const Fact& f = db.fact(fact_index);
  if (!f.endogenous) throw std::invalid_argument("fact " + f.display() + " is exogenous");
  DnfFunction phi = lineage(q, db, t);
  if (!phi.contains(*f.var)) return {0, 0, true};
  switch (cfg.method) {
    case Method::exact: {
      Rational b(exaban(compile_full(phi, cfg.budget), *f.var).banzhaf);
      return {b, b, true};
    }
    case Method::adaban: {
      ApproxInterval a = banzhaf::adaban(phi, *f.var, cfg.eps, cfg.budget);
      return {a.lo(), a.hi(), a.certified};
    }
    case Method::mc: {
      McEstimate m = mc_banzhaf(phi, *f.var, cfg.samples_per_var, cfg.seed);
      return {m.estimate, m.estimate, false};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace banzhaf

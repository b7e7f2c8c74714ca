#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "banzhaf/banzhaf.hpp"

namespace attr {
namespace {

using namespace banzhaf;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string lineage, lineage_dir, db, query;
  std::string var, epsilon, format = "json", trace, dump_dtree, output;
  std::optional<std::size_t> k, max_expansions;
  std::size_t samples = 50;
  std::optional<std::uint64_t> seed;
  double timeout = 60;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool mc_shared = false;
  std::string leaf_strategy = "widest";
  std::string algorithms = "exact,adaban0.1";
  std::size_t oracle_cap = 20;
};

struct Instance {
  std::string id;
  std::shared_ptr<const VariableTable> names;
  DnfFunction f;
};

struct Result {
  std::string status = "ok";  // ok | partial | timeout | error
  json record;
  double wall_ms = 0;
  std::string trace_csv;
  std::string dtree;
  bool failed() const { return status == "timeout" || status == "error"; }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void add_lineage_lines(const std::string& text, const std::string& fallback_id, bool single_file_id,
                       std::vector<Instance>& out) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::size_t, std::string>> lines;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.emplace_back(n, line);
  }
  for (const auto& [n, l] : lines) {
    ParsedLineage p;
    try {
      p = parse_dnf(l);
    } catch (const ParseError& e) {
      throw ConfigError(fallback_id + ":" + std::to_string(n) + ": column " + std::to_string(e.offset() + 1) + ": " +
                        e.what());
    }
    std::string id = p.id ? *p.id : (single_file_id && lines.size() == 1 ? fallback_id : fallback_id + ":" + std::to_string(n));
    out.push_back({std::move(id), std::make_shared<VariableTable>(std::move(p.names)), std::move(p.function)});
  }
}

std::vector<Instance> load_instances(const Options& o) {
  std::vector<Instance> out;
  int modes = !o.lineage.empty() + !o.lineage_dir.empty() + !o.db.empty();
  if (modes != 1) throw ConfigError("exactly one of --lineage, --lineage-dir, --db is required");
  if (!o.lineage.empty()) {
    add_lineage_lines(read_file(o.lineage), fs::path(o.lineage).stem().string(), true, out);
  } else if (!o.lineage_dir.empty()) {
    if (!fs::is_directory(o.lineage_dir)) throw ConfigError(o.lineage_dir + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(o.lineage_dir))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) add_lineage_lines(read_file(p), p.stem().string(), true, out);
    if (out.empty()) throw ConfigError("no lineage instances in " + o.lineage_dir);
  } else {
    if (o.query.empty()) throw ConfigError("--db requires --query");
    fs::path schema = fs::is_directory(o.db) ? fs::path(o.db) / "schema.json" : fs::path(o.db);
    Database db;
    Query q;
    try {
      db = Database::load(schema);
    } catch (const DatabaseError& e) {
      throw ConfigError(e.what());
    }
    std::string qtext = read_file(o.query);
    try {
      q = parse_query(qtext);
    } catch (const ParseError& e) {
      throw ConfigError(o.query + ": offset " + std::to_string(e.offset()) + ": " + e.what());
    }
    auto names = std::make_shared<VariableTable>(db.names());
    std::map<Tuple, DnfFunction> all;
    try {
      all = lineage_all(q, db);
    } catch (const DatabaseError& e) {
      throw ConfigError(e.what());
    }
    for (auto& [t, f] : all) {
      std::string id = "(";
      for (std::size_t i = 0; i < t.size(); ++i) id += (i ? "," : "") + t[i];
      out.push_back({id + ")", names, std::move(f)});
    }
  }
  return out;
}

Budget budget_for(const Options& o) {
  Budget b = Budget::timeout(std::chrono::milliseconds(static_cast<long long>(o.timeout * 1000)));
  b.max_expansions = o.max_expansions;
  return b;
}

std::vector<VarId> target_vars(const Options& o, const Instance& in) {
  if (o.var.empty()) return in.f.universe();
  auto v = in.names->find(o.var);
  if (!v || !in.f.contains(*v)) throw std::invalid_argument("variable " + o.var + " is not in this lineage");
  return {*v};
}

std::string dump_tree(const Instance& in, const DTree& t, const std::function<std::string(NodeId)>& note = {}) {
  return "# " + in.id + "\n" + render(t, *in.names, note);
}

// ---------------------------------------------------------------------------

Result run_exact(const Options& o, const Instance& in) {
  Result r;
  auto xs = target_vars(o, in);
  DTree t = compile_full(in.f, budget_for(o));
  auto all = exaban_all(t, xs);
  json vars = json::array();
  for (VarId x : xs)
    vars.push_back({{"variable", in.names->name(x)}, {"banzhaf", to_string(all.at(x).banzhaf)}});
  r.record["model_count"] = to_string(model_counts(t)[t.root()]);
  r.record["expansions"] = t.shannon_expansions();
  r.record["certified"] = true;
  r.record["variables"] = std::move(vars);
  if (!o.dump_dtree.empty()) {
    if (xs.size() == 1) {
      auto ann = exaban_annotations(t, xs.front());
      r.dtree = dump_tree(in, t, [&](NodeId id) {
        return "(" + to_string(ann[id].banzhaf) + "," + to_string(ann[id].model_count) + ")";
      });
    } else {
      auto counts = model_counts(t);
      r.dtree = dump_tree(in, t, [&](NodeId id) { return "#" + to_string(counts[id]); });
    }
  }
  return r;
}

Result run_adaban(const Options& o, const Instance& in) {
  Result r;
  Epsilon eps = Epsilon::parse(o.epsilon);
  auto xs = target_vars(o, in);
  Approximator a(in.f, parse_leaf_strategy(o.leaf_strategy));
  Budget b = budget_for(o);
  std::ostringstream trace;
  std::size_t step = 0;
  VarId current{};
  TraceFn tf;
  if (!o.trace.empty()) {
    tf = [&](const TraceEvent& e) {
      if (e.var != current) step = 0;
      current = e.var;
      trace << in.id << ',' << in.names->name(e.var) << ',' << step++ << ',' << e.lower << ',' << e.upper << ','
            << std::chrono::duration<double, std::milli>(e.elapsed).count() << '\n';
    };
  }
  json vars = json::array();
  bool all_certified = true;
  for (VarId x : xs) {
    ApproxInterval ai = a.approximate(x, eps, b, tf);
    all_certified = all_certified && ai.certified;
    vars.push_back({{"variable", in.names->name(x)},
                    {"certified", ai.certified},
                    {"lower", to_string(ai.lower)},
                    {"upper", to_string(ai.upper)},
                    {"lo", to_string(ai.lo())},
                    {"hi", to_string(ai.hi())},
                    {"lo_value", to_double(ai.lo())},
                    {"hi_value", to_double(ai.hi())},
                    {"expansions", ai.expansions}});
  }
  r.status = all_certified ? "ok" : "partial";
  r.record["expansions"] = a.tree().shannon_expansions();
  r.record["certified"] = all_certified;
  r.record["variables"] = std::move(vars);
  r.trace_csv = trace.str();
  if (!o.dump_dtree.empty()) r.dtree = dump_tree(in, a.tree());
  return r;
}

json ranked_json(const Instance& in, const RankOutcome& ro) {
  json vars = json::array();
  for (const auto& rv : ro.ranked) {
    const auto& ai = rv.interval;
    json v = {{"variable", in.names->name(ai.var)},
              {"rank", rv.rank},
              {"certified", ai.certified},
              {"lower", to_string(ai.lower)},
              {"upper", to_string(ai.upper)},
              {"midpoint", to_string(ai.midpoint())},
              {"midpoint_value", to_double(ai.midpoint())},
              {"tied", rv.tied}};
    v["pruned_at"] = rv.pruned_at ? json(*rv.pruned_at) : json(nullptr);
    vars.push_back(std::move(v));
  }
  return vars;
}

Result run_rank(const Options& o, const Instance& in, bool topk_mode) {
  Result r;
  RankOptions ro;
  ro.budget = budget_for(o);
  ro.strategy = parse_leaf_strategy(o.leaf_strategy);
  RankOutcome out;
  if (topk_mode) {
    if (!o.k) throw ConfigError("topk requires --k");
    std::size_t k = std::min(*o.k, in.f.num_vars());
    if (k == 0) throw ConfigError("--k must be positive");
    if (o.epsilon.empty()) {
      out = topk_certain(in.f, k, ro);
    } else {
      out = topk_eps(in.f, k, Epsilon::parse(o.epsilon), ro);
    }
    json sel = json::array();
    for (VarId v : out.selected) sel.push_back(in.names->name(v));
    r.record["selected"] = std::move(sel);
  } else {
    out = rank_eps(in.f, Epsilon::parse(o.epsilon.empty() ? "0" : o.epsilon), ro);
  }
  bool done = out.certain || std::all_of(out.ranked.begin(), out.ranked.end(), [](const RankedVar& v) {
                return v.pruned_at || v.interval.certified;
              });
  r.status = done ? "ok" : "partial";
  r.record["certain"] = out.certain;
  r.record["switched_to_eps"] = out.switched_to_eps;
  r.record["expansions"] = out.expansions;
  r.record["variables"] = ranked_json(in, out);
  return r;
}

Result run_mc(const Options& o, const Instance& in) {
  Result r;
  if (!o.seed) throw ConfigError("mc requires --seed");
  auto xs = target_vars(o, in);
  std::map<VarId, McEstimate> est;
  if (o.mc_shared && o.var.empty()) {
    est = mc_banzhaf_all(in.f, o.samples, *o.seed, true);
  } else {
    for (VarId x : xs) est[x] = mc_banzhaf(in.f, x, o.samples, *o.seed);
  }
  json vars = json::array();
  for (VarId x : xs) {
    const auto& e = est.at(x);
    vars.push_back({{"variable", in.names->name(x)},
                    {"estimate", to_string(e.estimate)},
                    {"estimate_value", to_double(e.estimate)},
                    {"samples", e.samples}});
  }
  r.record["seed"] = *o.seed;
  r.record["generator"] = "mt19937_64";
  r.record["shared_samples"] = o.mc_shared;
  r.record["hoeffding_radius_999"] = hoeffding_radius(in.f.num_vars(), o.samples);
  r.record["certified"] = false;
  r.record["variables"] = std::move(vars);
  return r;
}

Result run_oracle(const Options& o, const Instance& in) {
  Result r;
  auto xs = target_vars(o, in);
  json vars = json::array();
  for (VarId x : xs) {
    CriticalVector cv = critical_vector(in.f, x, o.oracle_cap);
    Rational sh = shapley_from_critical(cv);
    json crit = json::array();
    for (const auto& c : cv.counts) crit.push_back(to_string(c));
    vars.push_back({{"variable", in.names->name(x)},
                    {"banzhaf", to_string(cv.total())},
                    {"shapley", to_string(sh)},
                    {"shapley_value", to_double(sh)},
                    {"critical", std::move(crit)}});
  }
  r.record["model_count"] = to_string(brute_count(in.f, o.oracle_cap));
  r.record["certified"] = true;
  r.record["variables"] = std::move(vars);
  return r;
}

Result process(const Options& o, const Instance& in) {
  const auto start = Clock::now();
  Result r;
  try {
    if (o.command == "exact") r = run_exact(o, in);
    else if (o.command == "adaban") r = run_adaban(o, in);
    else if (o.command == "topk") r = run_rank(o, in, true);
    else if (o.command == "rank") r = run_rank(o, in, false);
    else if (o.command == "mc") r = run_mc(o, in);
    else if (o.command == "oracle") r = run_oracle(o, in);
  } catch (const ConfigError&) {
    throw;
  } catch (const BudgetExceeded& e) {
    r = Result{};
    r.status = "timeout";
    r.record["error"] = e.what();
  } catch (const std::exception& e) {
    r = Result{};
    r.status = "error";
    r.record["error"] = e.what();
  }
  r.wall_ms = ms_since(start);
  json head = {{"id", in.id},
               {"status", r.status},
               {"num_vars", in.f.num_vars()},
               {"num_clauses", in.f.num_clauses()},
               {"wall_ms", r.wall_ms}};
  head.update(r.record);
  r.record = std::move(head);
  return r;
}

template <class Fn>
std::vector<Result> run_pool(std::size_t n, unsigned threads, const Fn& fn) {
  std::vector<Result> results(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(threads, n); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);
  return results;
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

json runtime_summary(const std::vector<double>& ms) {
  double mean = 0;
  for (double m : ms) mean += m;
  if (!ms.empty()) mean /= static_cast<double>(ms.size());
  return {{"mean", mean},
          {"p50", percentile(ms, 50)},
          {"p75", percentile(ms, 75)},
          {"p90", percentile(ms, 90)},
          {"p95", percentile(ms, 95)},
          {"p99", percentile(ms, 99)},
          {"max", ms.empty() ? 0.0 : *std::max_element(ms.begin(), ms.end())}};
}

std::string csv_cell(const json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  return v.dump();
}

void write_csv(std::ostream& out, const std::vector<Result>& results) {
  std::vector<std::string> cols;
  for (const auto& r : results) {
    if (!r.record.contains("variables") || r.record["variables"].empty()) continue;
    for (auto it = r.record["variables"][0].begin(); it != r.record["variables"][0].end(); ++it)
      cols.push_back(it.key());
    break;
  }
  out << "instance,status";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  for (const auto& r : results) {
    const json& rec = r.record;
    if (!rec.contains("variables") || rec["variables"].empty()) {
      out << csv_cell(rec["id"]) << ',' << r.status;
      for (std::size_t i = 0; i < cols.size(); ++i) out << ',';
      out << '\n';
      continue;
    }
    for (const auto& v : rec["variables"]) {
      out << csv_cell(rec["id"]) << ',' << r.status;
      for (const auto& c : cols) out << ',' << (v.contains(c) ? csv_cell(v[c]) : "");
      out << '\n';
    }
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

// ---------------------------------------------------------------------------
// bench

struct BenchAlgo {
  std::string label;
  enum Kind { exact, adaban, mc } kind;
  std::string param;
};

std::vector<BenchAlgo> parse_algorithms(const std::string& spec) {
  std::vector<BenchAlgo> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "exact") {
      out.push_back({item, BenchAlgo::exact, ""});
    } else if (item.rfind("adaban", 0) == 0 && item.size() > 6) {
      Epsilon::parse(item.substr(6));
      out.push_back({item, BenchAlgo::adaban, item.substr(6)});
    } else if (item.rfind("mc", 0) == 0 && item.size() > 2) {
      if (item.find_first_not_of("0123456789", 2) != std::string::npos)
        throw ConfigError("bad algorithm " + item);
      out.push_back({item, BenchAlgo::mc, item.substr(2)});
    } else {
      throw ConfigError("unknown algorithm '" + item + "' (use exact, adaban<eps>, mc<samples per var>)");
    }
  }
  if (out.empty()) throw ConfigError("--algorithms is empty");
  return out;
}

int run_bench(const Options& o, const std::vector<Instance>& instances, std::ostream& out) {
  auto algos = parse_algorithms(o.algorithms);
  // oracle values, when enumerable
  std::vector<std::optional<std::map<VarId, BigInt>>> oracle(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].f.num_vars() > o.oracle_cap) continue;
    std::map<VarId, BigInt> m;
    for (VarId x : instances[i].f.universe()) m[x] = brute_banzhaf(instances[i].f, x, o.oracle_cap);
    oracle[i] = std::move(m);
  }
  out << "algorithm,instances,succeeded,success_rate,mean_ms,p50_ms,p75_ms,p90_ms,p95_ms,p99_ms,max_ms,l1_mean\n";
  bool any_ok = false;
  for (const auto& a : algos) {
    auto results = run_pool(instances.size(), o.threads, [&](std::size_t i) {
      const Instance& in = instances[i];
      Result r;
      auto start = Clock::now();
      std::map<VarId, double> est;
      try {
        Budget b = budget_for(o);
        if (a.kind == BenchAlgo::exact) {
          auto all = exaban_all(compile_full(in.f, b), in.f.universe());
          for (auto& [v, res] : all) est[v] = to_double(res.banzhaf);
        } else if (a.kind == BenchAlgo::adaban) {
          auto all = adaban_all(in.f, in.f.universe(), Epsilon::parse(a.param), b, {},
                                parse_leaf_strategy(o.leaf_strategy));
          bool cert = true;
          for (auto& [v, ai] : all) {
            est[v] = to_double(ai.midpoint());
            cert = cert && ai.certified;
          }
          if (!cert) r.status = "timeout";
        } else {
          auto all = mc_banzhaf_all(in.f, std::stoul(a.param), o.seed.value_or(0), o.mc_shared);
          for (auto& [v, e] : all) est[v] = to_double(e.estimate);
        }
      } catch (const BudgetExceeded&) {
        r.status = "timeout";
      } catch (const std::exception& e) {
        r.status = "error";
      }
      r.wall_ms = ms_since(start);
      if (!r.failed() && oracle[i]) {
        double l1 = 0;
        for (const auto& [v, b] : *oracle[i]) l1 += std::abs(est[v] - to_double(b));
        r.record["l1"] = l1;
      }
      return r;
    });
    std::vector<double> ms;
    double l1 = 0;
    std::size_t l1_n = 0;
    for (const auto& r : results) {
      if (r.failed()) continue;
      ms.push_back(r.wall_ms);
      if (r.record.contains("l1")) {
        l1 += r.record["l1"].get<double>();
        ++l1_n;
      }
    }
    any_ok = any_ok || !ms.empty();
    json s = runtime_summary(ms);
    out << a.label << ',' << instances.size() << ',' << ms.size() << ','
        << static_cast<double>(ms.size()) / static_cast<double>(instances.size());
    for (const char* key : {"mean", "p50", "p75", "p90", "p95", "p99", "max"}) out << ',' << s[key].get<double>();
    out << ',';
    if (l1_n) out << l1 / static_cast<double>(l1_n);
    out << '\n';
  }
  return any_ok ? kOk : kAllFailed;
}

// ---------------------------------------------------------------------------

int execute(const Options& o, std::ostream& out) {
  std::vector<Instance> instances = load_instances(o);
  if (instances.empty()) throw ConfigError("no instances");
  if (o.format != "json" && o.format != "csv") throw ConfigError("--format must be json or csv");
  if (o.command == "adaban" && o.epsilon.empty()) throw ConfigError("adaban requires --epsilon");
  if (o.command == "topk" && !o.k) throw ConfigError("topk requires --k");
  if (o.command == "mc" && !o.seed) throw ConfigError("mc requires --seed");
  try {
    if (!o.epsilon.empty()) Epsilon::parse(o.epsilon);
    parse_leaf_strategy(o.leaf_strategy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) throw ConfigError("cannot write " + o.output);
    sink = &file;
  }

  if (o.command == "lineage") {
    for (const auto& in : instances) *sink << in.id << '\t' << to_string(in.f, *in.names) << '\n';
    return kOk;
  }
  if (o.command == "bench") return run_bench(o, instances, *sink);

  auto results = run_pool(instances.size(), o.threads, [&](std::size_t i) { return process(o, instances[i]); });

  if (!o.trace.empty()) {
    std::string t = "instance,variable,step,L,U,elapsed_ms\n";
    for (const auto& r : results) t += r.trace_csv;
    write_text(o.trace, t);
  }
  if (!o.dump_dtree.empty()) {
    std::string t;
    for (const auto& r : results) t += r.dtree;
    write_text(o.dump_dtree, t);
  }

  std::vector<double> ms;
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.failed()) {
      ++failed;
    } else {
      ms.push_back(r.wall_ms);
    }
  }

  if (o.format == "csv") {
    write_csv(*sink, results);
  } else {
    json params = {{"timeout_s", o.timeout}, {"leaf_strategy", o.leaf_strategy}};
    if (!o.epsilon.empty()) params["epsilon"] = o.epsilon;
    if (o.k) params["k"] = *o.k;
    if (o.max_expansions) params["max_expansions"] = *o.max_expansions;
    if (o.command == "mc") {
      params["samples_per_var"] = o.samples;
      params["seed"] = *o.seed;
    }
    json doc = {{"algorithm", o.command}, {"parameters", params}, {"instances", json::array()}};
    for (auto& r : results) doc["instances"].push_back(std::move(r.record));
    doc["summary"] = {{"instances", results.size()},
                      {"succeeded", results.size() - failed},
                      {"success_rate", static_cast<double>(results.size() - failed) / static_cast<double>(results.size())},
                      {"wall_ms", runtime_summary(ms)}};
    *sink << doc.dump(2) << '\n';
  }
  return failed == results.size() ? kAllFailed : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Banzhaf-value attribution for positive DNF lineage"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s) {
    s->add_option("--lineage", o.lineage, "file with one lineage per line");
    s->add_option("--lineage-dir", o.lineage_dir, "directory of lineage files");
    s->add_option("--db", o.db, "database directory (schema.json) or schema file");
    s->add_option("--query", o.query, "datalog query file (with --db)");
    s->add_option("--var", o.var, "restrict to one variable");
    s->add_option("--epsilon", o.epsilon, "relative error in [0,1]");
    s->add_option("--k", o.k, "top-k size");
    s->add_option("--samples-per-var", o.samples, "Monte Carlo samples per variable");
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--timeout", o.timeout, "per-instance timeout in seconds");
    s->add_option("--max-expansions", o.max_expansions, "cap on Shannon expansions");
    s->add_option("--format", o.format, "json or csv");
    s->add_option("--trace", o.trace, "write per-step bounds CSV");
    s->add_option("--dump-dtree", o.dump_dtree, "write the d-tree of each instance");
    s->add_option("--output,-o", o.output, "output file (default stdout)");
    s->add_option("--threads", o.threads, "worker threads");
    s->add_flag("--mc-shared-samples", o.mc_shared, "reuse one sample stream for all variables");
    s->add_option("--leaf-strategy", o.leaf_strategy, "widest, largest, leftmost or round-robin");
    s->add_option("--oracle-cap", o.oracle_cap, "largest universe for enumeration");
  };
  const std::pair<const char*, const char*> subs[] = {
      {"exact", "exact Banzhaf values"},
      {"adaban", "anytime ε-approximation"},
      {"topk", "top-k variables"},
      {"rank", "rank all variables"},
      {"mc", "Monte Carlo estimates"},
      {"oracle", "enumeration: Banzhaf, Shapley, critical-set counts"},
      {"bench", "runtime and error summary over many instances"},
      {"lineage", "print lineage only"}};
  for (auto [name, desc] : subs) {
    CLI::App* s = app.add_subcommand(name, desc);
    common(s);
    if (std::string(name) == "bench")
      s->add_option("--algorithms", o.algorithms, "comma list: exact, adaban<eps>, mc<samples>");
    s->callback([&o, name] { o.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  if (o.threads == 0) o.threads = 1;

  try {
    return execute(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace attr

// Acceptance gate: runs criteria 1-10 and prints one PASS/FAIL line each.
// Arguments select a subset ("acceptance 1 5 9"); exit status is non-zero
// when any selected criterion fails.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "primlearn/dedup.h"
#include "primlearn/generation.h"
#include "primlearn/reference.h"
#include "primlearn/report.h"
#include "primlearn/selection.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace primlearn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Expr E(const char* text) { return parse_expr(text); }

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("primlearn-acceptance-" + std::to_string(getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// --- 1 -------------------------------------------------------------------

Outcome cut_enumeration() {
  std::set<std::string> got;
  for (const Expr& c : cut_expr(E("(log (+ 1 (* x y)))"))) got.insert(print(c));
  std::set<std::string> want = {"(log t1)", "(log (+ 1 t1))", "(log (+ 1 (* t1 t2)))"};
  bool excluded = !got.count("(log (+ t1 (* t2 t3)))");
  std::string list;
  for (const auto& s : got) list += (list.empty() ? "" : ", ") + s;
  return {got == want && excluded, "{" + list + "}"};
}

// --- 2 -------------------------------------------------------------------

Outcome dedup_merges() {
  struct Pair {
    const char* a;
    const char* b;
    bool merge;
  };
  const Pair pairs[] = {{"(/ x (+ 1 y))", "(/ y (+ 1 x))", true},
                        {"(* (+ 1 x) y)", "(* x (+ 1 y))", true},
                        {"(log (+ 1 x))", "(log (+ x 1))", true},
                        {"(log (+ 1 x))", "(log (+ 1 (* x y)))", false}};
  std::string detail;
  bool ok = true;
  for (const Pair& p : pairs) {
    std::vector<RawCandidate> raw = {{alpha_normalize(E(p.a)), 3, {"k1"}},
                                     {alpha_normalize(E(p.b)), 4, {"k2"}}};
    auto pool = dedup_pool(raw, default_rules(), dedup_limits());
    bool merged = pool.size() == 1 && pool[0].frequency == 7;
    bool good = p.merge ? merged : pool.size() == 2;
    ok = ok && good;
    detail += std::string(good ? "" : "WRONG ") + (merged ? "merged " : "separate ") + p.a + "~" +
              p.b + "; ";
  }
  return {ok, detail};
}

// --- 3 -------------------------------------------------------------------

Outcome error_oracle() {
  Kernel k = parse_fpcore(
      "(FPCore (x) :pre (<= (fabs x) 1e-6) (log (/ (+ 1 x) (- 1 x))))")[0];
  auto samples = sample_points(k, 256, 1);
  Platform p = default_platform();
  ErrorReport naive = measure_error(k.body, *samples, p);
  ErrorReport atanh = measure_error(E("(* 2 (atanh x))"), *samples, p);
  return {naive.mean_bits >= 20 && atanh.mean_bits <= 2,
          "naive " + fmt(naive.mean_bits) + " bits, 2*atanh " + fmt(atanh.mean_bits) + " bits"};
}

// --- 4 -------------------------------------------------------------------

Outcome counterfactual_utility() {
  Kernel k = parse_fpcore(
      "(FPCore log1pmd (x) :pre (<= -0.999 x 0.999) (log (/ (+ 1 x) (- 1 x))))")[0];
  Platform base = default_platform();
  Platform ext = extend_with_candidate(base, Symbol("log1pmd"), E("(log (/ (+ 1 t1) (- 1 t1)))"));
  auto fb = optimize(k, base, default_rules(), SearchLimits{}, kDefaultSamples, 1);
  auto fe = optimize(k, ext, default_rules(), SearchLimits{}, kDefaultSamples, 1);
  auto cb = cost_at_accuracy(fb, 0.95);
  auto ce = cost_at_accuracy(fe, 0.95);
  double op_cost = ext.find("log1pmd")->cost;
  double naive_cost = expr_cost(base, k.body);
  bool cost_rule = op_cost == std::max(1.0, naive_cost / 5);
  bool lower = ce && (!cb || *ce < *cb);
  return {best_accuracy(fe) == 1.0 && lower && cost_rule,
          "best acc " + fmt(best_accuracy(fb), 4) + " -> " + fmt(best_accuracy(fe), 4) +
              ", cost@0.95 " + (cb ? fmt(*cb) : "none") + " -> " + (ce ? fmt(*ce) : "none") +
              ", op cost " + fmt(op_cost) + " (naive " + fmt(naive_cost) + ")"};
}

// --- 5 -------------------------------------------------------------------

std::vector<std::vector<size_t>> brute_force_sources(size_t n,
                                                     const std::vector<std::pair<size_t, size_t>>& edges) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (auto [a, b] : edges) reach[a][b] = true;
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  // v is in a source component iff everything reaching v is reachable from v.
  std::vector<std::vector<size_t>> out;
  std::vector<bool> placed(n, false);
  for (size_t v = 0; v < n; ++v) {
    if (placed[v]) continue;
    bool source = true;
    for (size_t u = 0; u < n; ++u)
      if (reach[u][v] && !reach[v][u]) source = false;
    std::vector<size_t> comp;
    for (size_t u = 0; u < n; ++u)
      if (reach[u][v] && reach[v][u]) {
        comp.push_back(u);
        placed[u] = true;
      }
    if (source) out.push_back(comp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Candidate> make_pool(const std::vector<const char*>& patterns) {
  std::vector<Candidate> pool;
  for (const char* p : patterns) {
    Candidate c;
    c.pattern = alpha_normalize(E(p));
    c.frequency = 1;
    c.size = expr_cost(default_platform(), c.pattern);
    c.members = {c.pattern};
    pool.push_back(c);
  }
  return pool;
}

void score_all(std::vector<Candidate>& pool, const EvalContext& ctx) {
  for (size_t i = 0; i < pool.size(); ++i) {
    pool[i].urgency = urgency(pool, i, {}, default_platform(), ctx);
    pool[i].score = full_score(pool[i]);
  }
}

Outcome implication_scc() {
  EvalContext ctx;
  SelectionConfig cfg;
  std::string detail;
  bool ok = true;

  auto logs = make_pool({"(log (+ 1 t1))", "(log (+ 1 (* t1 t2)))"});
  score_all(logs, ctx);
  auto g1 = build_implication_graph(logs, {0, 1}, {}, default_platform(), cfg, ctx);
  std::vector<std::pair<size_t, size_t>> e1;
  for (const auto& e : g1.edges) e1.emplace_back(e.from, e.to);
  auto comps1 = strongly_connected_components(2, e1);
  auto chosen1 = choose_from_graph(g1, logs);
  bool log_ok = comps1.size() == 1 && chosen1.size() == 1;
  ok = ok && log_ok;
  detail += "log pair edges [";
  for (const auto& e : g1.edges)
    detail += " " + std::to_string(e.from) + "->" + std::to_string(e.to) + "@" + fmt(e.accuracy);
  detail += " ] chosen " + std::to_string(chosen1.size()) + "; ";

  auto pows = make_pool({"(pow t1 6)", "(pow (cos t1) 6)"});
  score_all(pows, ctx);
  auto g2 = build_implication_graph(pows, {0, 1}, {}, default_platform(), cfg, ctx);
  auto chosen2 = choose_from_graph(g2, pows);
  bool pow_ok = g2.edges.size() == 1 && g2.edges[0].from == 0 && g2.edges[0].to == 1 &&
                chosen2 == std::vector<size_t>{0};
  ok = ok && pow_ok;
  detail += "pow pair edges [";
  for (const auto& e : g2.edges)
    detail += " " + std::to_string(e.from) + "->" + std::to_string(e.to) + "@" + fmt(e.accuracy);
  detail += " ] chosen " + std::to_string(chosen2.size()) + "; ";

  std::mt19937_64 rng(2024);
  size_t agree = 0;
  for (int t = 0; t < 200; ++t) {
    size_t n = 1 + rng() % 12;
    double density = std::uniform_real_distribution<double>(0, 0.4)(rng);
    std::vector<std::pair<size_t, size_t>> edges;
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b)
        if (a != b && std::uniform_real_distribution<double>(0, 1)(rng) < density)
          edges.emplace_back(a, b);
    agree += source_components(n, edges) == brute_force_sources(n, edges);
  }
  ok = ok && agree == 200;
  detail += "random digraphs " + std::to_string(agree) + "/200";
  return {ok, detail};
}

// --- 6, 7, 8 -------------------------------------------------------------

struct LearnRun {
  int status = -1;
  double seconds = 0;
  fs::path out;
};

LearnRun run_learn(const std::string& name, const fs::path& corpus,
                   const std::string& extra = "") {
  LearnRun r;
  r.out = scratch_dir() / name;
  std::string cmd = std::string(PRIMLEARN_CLI) + " learn --corpus " + corpus.string() +
                    " --out " + r.out.string() + " --seed 1 " + extra + " 2> " +
                    (scratch_dir() / (name + ".log")).string();
  auto t0 = std::chrono::steady_clock::now();
  r.status = std::system(cmd.c_str());
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const fs::path kMiniCorpus = fs::path(PRIMLEARN_CORPUS_DIR) / "proj_log1pmd.fpcore";
const fs::path kToyCorpus = fs::path(PRIMLEARN_CORPUS_DIR) / "toy.fpcore";

LearnRun& mini_run() {
  static LearnRun run = run_learn("mini-a", kMiniCorpus);
  return run;
}

bool in_log1pmd_class(const json& cand) {
  std::vector<Expr> target = canonical_forms(E("(log (/ (+ 1 t1) (- 1 t1)))"));
  for (const auto& m : cand["members"]) {
    Expr e = parse_expr(m.get<std::string>());
    if (free_vars(e).size() != 1) continue;
    for (const Expr& f : canonical_forms(e))
      if (std::find(target.begin(), target.end(), f) != target.end()) return true;
  }
  // The representative may be a different member of the same class.
  Expr rep = parse_expr(cand["formula"].get<std::string>());
  return prove_equivalent(rep, target[0], default_rules(), dedup_limits());
}

Outcome end_to_end() {
  LearnRun& r = mini_run();
  if (r.status != 0) return {false, "learn exited with status " + std::to_string(r.status)};
  json rep = json::parse(slurp(r.out / "report.json"));
  if (rep["rounds"].empty()) return {false, "no selection rounds"};
  std::map<std::string, json> cands;
  for (const auto& c : rep["candidates"]) cands[c["id"].get<std::string>()] = c;
  std::string hit;
  for (const auto& id : rep["rounds"][0]["chosen"])
    if (cands.count(id) && in_log1pmd_class(cands[id])) hit = id;
  size_t uses = 0;
  for (const auto& p : rep["proposed"])
    if (p["id"] == hit) uses = p["uses"];
  std::string chosen;
  for (const auto& id : rep["rounds"][0]["chosen"])
    chosen += " " + cands[id]["formula"].get<std::string>();
  bool ok = !hit.empty() && uses >= 5 && r.seconds <= 600;
  return {ok, "round 1 chose" + chosen + "; log1pmd class " + (hit.empty() ? "absent" : hit) +
                  " uses " + std::to_string(uses) + "; " + fmt(r.seconds, 4) + " s"};
}

Outcome determinism() {
  LearnRun& a = mini_run();
  LearnRun b = run_learn("mini-b", kMiniCorpus);
  if (a.status != 0 || b.status != 0) return {false, "a learn run failed"};
  std::string ra = slurp(a.out / "report.json"), rb = slurp(b.out / "report.json");
  bool same = !ra.empty() && ra == rb;
  return {same, std::string(same ? "identical" : "different") + " report.json (" +
                    std::to_string(ra.size()) + " bytes)"};
}

Outcome budget() {
  LearnRun& r = mini_run();
  if (r.status != 0) return {false, "learn run failed"};
  json rep = json::parse(slurp(r.out / "report.json"));
  size_t k = rep["kernels"].size();
  size_t rounds = rep["rounds"].size();
  size_t t1 = rep["config"]["t1"], t2 = rep["config"]["t2"];
  size_t calls = rep["budget"]["optimize_calls"];
  size_t bound = k + rounds * (t1 + t2 * t2) + 2 * k;
  return {calls <= bound, std::to_string(calls) + " calls <= " + std::to_string(bound) + " (|K|=" +
                              std::to_string(k) + ", rounds=" + std::to_string(rounds) + ")"};
}

// --- 9 -------------------------------------------------------------------

// Relative agreement to at least `bits` bits between two enclosures.
bool agree(const Enclosure& a, const Enclosure& b, int bits) {
  mpq_class lo = std::min(a.lo, b.lo), hi = std::max(a.hi, b.hi);
  mpq_class mag = std::max(abs(lo), abs(hi));
  if (mag == 0) return true;
  mpf_class tol(mag, 256);
  tol = mpf_class(mag, 256) / mpf_class(std::ldexp(1.0, bits), 256);
  return mpf_class(hi - lo, 256) <= tol;
}

double sample_value(std::mt19937_64& rng) {
  double m = std::uniform_real_distribution<double>(1, 2)(rng);
  int e = static_cast<int>(rng() % 17) - 8;
  return (rng() & 1 ? -1 : 1) * std::ldexp(m, e);
}

Outcome rule_soundness() {
  constexpr int kChecks = 10000;
  constexpr int kBits = 100;
  RuleSet rules = default_rules();
  std::vector<std::string> bad;
  size_t checked = 0;
  for (const Rule& r : rules.rules) {
    std::vector<Symbol> vars = free_vars(r.lhs);
    ReferenceEvaluator lhs(r.lhs, vars), rhs(r.rhs, vars);
    std::mt19937_64 rng(std::hash<std::string>{}(r.name));
    int done = 0, attempts = 0, failures = 0;
    std::vector<double> pt(vars.size());
    while (done < kChecks && attempts < 50 * kChecks) {
      ++attempts;
      for (double& v : pt) v = sample_value(rng);
      bool cond = true;
      for (const Condition& c : r.conditions) {
        size_t i = std::find(vars.begin(), vars.end(), c.var) - vars.begin();
        cond = cond && c.holds(pt[i]);
      }
      if (!cond) continue;
      Enclosure l = lhs.enclose(pt.data(), kBits + 8, 4096);
      if (l.status == RefStatus::kUndefined) continue;
      Enclosure rr = rhs.enclose(pt.data(), kBits + 8, 4096);
      ++done;
      if (rr.status == RefStatus::kUndefined || !agree(l, rr, kBits)) ++failures;
    }
    checked += done;
    if (failures > 0 || done < kChecks)
      bad.push_back(r.name + "(" + std::to_string(failures) + " bad, " + std::to_string(done) +
                    " checked)");
  }
  std::string detail = std::to_string(rules.size()) + " rules, " + std::to_string(checked) +
                       " checks";
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty(), detail};
}

// --- 10 ------------------------------------------------------------------

Outcome greedy_consistency() {
  auto kernels = parse_fpcore(slurp(kToyCorpus));
  auto pool = make_pool({"(log (/ (+ 1 t1) (- 1 t1)))", "(- (exp t1) 1)", "(/ t1 (+ 1 t2))",
                         "(log (+ 1 t1))", "(+ 1 t1)", "(- 1 t1)"});
  const size_t freq[] = {6, 5, 4, 3, 8, 8};
  for (size_t i = 0; i < pool.size(); ++i) pool[i].frequency = freq[i];
  EvalContext ctx;
  SelectionConfig cfg;
  cfg.t1 = 6;
  cfg.t2 = 3;
  cfg.target_size = 2;
  Platform base = default_platform();
  SelectionState st = run_selection(pool, kernels, base, cfg, ctx);
  size_t k = st.selected.size();
  auto workload = [&](const std::vector<size_t>& s) {
    return acc_workload(kernels, platform_with(base, pool, s), ctx.rules, ctx.limits, ctx.samples,
                        ctx.seed);
  };
  double batched = workload(st.selected);

  // One candidate at a time, each maximizing the workload accuracy.
  std::vector<size_t> greedy;
  for (size_t step = 0; step < k; ++step) {
    double best = -1;
    size_t pick = 0;
    for (size_t c = 0; c < pool.size(); ++c) {
      if (std::find(greedy.begin(), greedy.end(), c) != greedy.end()) continue;
      auto s = greedy;
      s.push_back(c);
      double a = workload(s);
      if (a > best) {
        best = a;
        pick = c;
      }
    }
    greedy.push_back(pick);
  }
  double oracle = workload(greedy);
  bool ok = k > 0 && std::abs(batched - oracle) <= 0.02;
  std::string sel, gr;
  for (size_t i : st.selected) sel += " " + print(pool[i].pattern);
  for (size_t i : greedy) gr += " " + print(pool[i].pattern);
  return {ok, "batched{" + sel + " } acc " + fmt(batched, 4) + ", greedy{" + gr + " } acc " +
                  fmt(oracle, 4)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no time bound beyond the criterion's own
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "cut enumeration", 1, cut_enumeration},
      {2, "dedup merges", 30, dedup_merges},
      {3, "error-metric oracle", 60, error_oracle},
      {4, "counterfactual utility", 60, counterfactual_utility},
      {5, "implication and SCC", 300, implication_scc},
      {6, "end-to-end mini-corpus", 0, end_to_end},
      {7, "determinism", 0, determinism},
      {8, "budget accounting", 0, budget},
      {9, "rule soundness", 300, rule_soundness},
      {10, "greedy-oracle consistency", 300, greedy_consistency},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && s > c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt(c.limit_s) + " s limit";
    }
    failed += !o.pass;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.name << ": "
              << o.detail << " [" << fmt(s, 3) << " s]" << std::endl;
  }
  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);
  return failed ? 1 : 0;
}

#include "primlearn/superopt.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <unordered_set>

#include "primlearn/numerics.h"
#include "primlearn/parallel.h"

namespace primlearn {

namespace {
constexpr size_t kAlternatives = 3;
constexpr size_t kFoldIters = 3;
// Fold rules are never banned; a rule with more matches than this applies
// the first ones only.
constexpr size_t kFoldMatchLimit = 4096;
constexpr size_t kScreenFactor = 20;
constexpr size_t kScreenPoints = 32;
}  // namespace

Extractor::Extractor(const EGraph& g) : g_(g) {
  size_t n = 0;
  for (Id c : g.classes()) n = std::max<size_t>(n, c + 1);
  cost_.assign(n, INFINITY);
  best_node_.assign(n, -1);
  best_.resize(n);
  reps_.resize(n);
  reps_done_.assign(n, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (Id c : g.classes()) {
      for (uint32_t i : g.class_nodes(c)) {
        double k = node_cost(g.node(i));
        if (k < cost_[c]) {
          cost_[c] = k;
          changed = true;
        }
      }
    }
  }
  for (Id c : g.classes()) {
    double best = INFINITY;
    for (uint32_t i : g.class_nodes(c)) {
      double k = node_cost(g.node(i));
      if (k < best || (k == best && static_cast<int64_t>(i) < best_node_[c])) {
        best = k;
        best_node_[c] = i;
      }
    }
  }
}

double Extractor::node_cost(const ENode& n) const {
  if (n.head < kHeadOps) return kLeafCost;
  double k = g_.head_cost(n.head);
  for (int i = 0; i < n.arity; ++i) k += cost_[g_.find(n.kids[i])];
  return k;
}

double Extractor::best_cost(Id c) const { return cost_[g_.find(c)]; }

Expr Extractor::best(Id c) const {
  c = g_.find(c);
  if (best_[c]) return best_[c];
  if (best_node_[c] < 0) return Expr();
  best_[c] = node_term(static_cast<uint32_t>(best_node_[c]));
  return best_[c];
}

Expr Extractor::node_term(uint32_t i) const {
  const ENode& n = g_.node(i);
  if (n.head < kHeadOps) return g_.leaf_expr(n);
  std::vector<Expr> args;
  for (int k = 0; k < n.arity; ++k) {
    Expr a = best(n.kids[k]);
    if (!a) return Expr();
    args.push_back(std::move(a));
  }
  return Expr::app(g_.head_symbol(n.head), std::move(args));
}

const std::vector<Expr>& Extractor::representatives(Id c) const {
  c = g_.find(c);
  if (reps_done_[c]) return reps_[c];
  reps_done_[c] = 1;
  std::vector<std::pair<double, uint32_t>> order;
  for (uint32_t i : g_.class_nodes(c)) {
    double k = node_cost(g_.node(i));
    if (std::isfinite(k)) order.emplace_back(k, i);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [k, i] : order) {
    if (reps_[c].size() >= kAlternatives) break;
    reps_[c].push_back(node_term(i));
  }
  return reps_[c];
}

std::vector<Expr> Extractor::enumerate(Id c, size_t limit) const {
  c = g_.find(c);
  const Platform& p = g_.platform();
  std::vector<std::pair<double, Expr>> terms;
  std::unordered_set<Expr, ExprHash> seen;
  auto push = [&](Expr e) {
    if (!e || !seen.insert(e).second) return;
    double k = expr_cost(p, e);
    terms.emplace_back(k, std::move(e));
  };
  for (uint32_t i : g_.class_nodes(c)) {
    const ENode& n = g_.node(i);
    if (!std::isfinite(node_cost(n))) continue;
    if (n.head < kHeadOps) {
      push(g_.leaf_expr(n));
      continue;
    }
    std::vector<const std::vector<Expr>*> alts;
    for (int k = 0; k < n.arity; ++k) alts.push_back(&representatives(n.kids[k]));
    std::vector<size_t> idx(n.arity, 0);
    for (;;) {
      std::vector<Expr> args;
      for (int k = 0; k < n.arity; ++k) args.push_back((*alts[k])[idx[k]]);
      push(Expr::app(g_.head_symbol(n.head), std::move(args)));
      int k = 0;
      while (k < n.arity && ++idx[k] == alts[k]->size()) idx[k++] = 0;
      if (k == n.arity) break;
    }
  }
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  std::vector<Expr> out;
  for (auto& [k, e] : terms) {
    if (out.size() >= limit) break;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Expr> harvest_intermediates(const EGraph& g, Id root, const SearchLimits& lim) {
  Extractor ex(g);
  // Breadth-first class distance from the root.
  std::map<Id, size_t> depth;
  std::vector<Id> frontier{g.find(root)};
  depth[g.find(root)] = 0;
  for (size_t d = 0; !frontier.empty(); ++d) {
    std::vector<Id> next;
    for (Id c : frontier)
      for (uint32_t i : g.class_nodes(c))
        for (int k = 0; k < g.node(i).arity; ++k) {
          Id kid = g.find(g.node(i).kids[k]);
          if (depth.emplace(kid, d + 1).second) next.push_back(kid);
        }
    frontier = std::move(next);
  }
  struct Entry {
    size_t depth;
    double cost;
    Expr e;
  };
  std::vector<Entry> terms;
  std::unordered_set<Expr, ExprHash> seen;
  for (Id c : g.classes()) {
    // Closed constant classes only hold arithmetic on literals.
    if (g.constant(c) && g.classes().size() > 1) continue;
    auto d = depth.find(c);
    size_t dist = d == depth.end() ? SIZE_MAX : d->second;
    for (uint32_t i : g.class_nodes(c)) {
      Expr e = ex.node_term(i);
      if (!e || !seen.insert(e).second) continue;
      terms.push_back({dist, expr_cost(g.platform(), e), std::move(e)});
    }
  }
  std::sort(terms.begin(), terms.end(), [](const Entry& a, const Entry& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    if (a.e.size() != b.e.size()) return a.e.size() < b.e.size();
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.e < b.e;
  });
  bool only_leaves =
      std::all_of(terms.begin(), terms.end(), [](const Entry& t) { return t.e.is_leaf(); });
  std::vector<Expr> out;
  for (Entry& t : terms) {
    if (out.size() >= lim.harvest_cap) break;
    if (t.e.is_leaf() && !only_leaves) continue;
    out.push_back(std::move(t.e));
  }
  return out;
}

std::vector<Expr> harvest_intermediates(const Saturation& s, const SearchLimits& lim) {
  return harvest_intermediates(*s.graph, s.root, lim);
}

bool prove_equivalent(const Expr& a, const Expr& b, const RuleSet& rules,
                      const SearchLimits& lim) {
  if (a == b) return true;
  Platform p = default_platform();
  EGraph g(p);
  Id ia = g.add_expr(a);
  Id ib = g.add_expr(b);
  run_rules(g, rules, lim, [&] { return g.find(ia) == g.find(ib); });
  return g.find(ia) == g.find(ib);
}

std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.expr < b.expr;
  });
  std::vector<ParetoPoint> out;
  for (ParetoPoint& p : pts) {
    if (!out.empty() && p.accuracy <= out.back().accuracy) continue;
    out.push_back(std::move(p));
  }
  return out;
}

double best_accuracy(const std::vector<ParetoPoint>& frontier) {
  double best = 0;
  for (const ParetoPoint& p : frontier) best = std::max(best, p.accuracy);
  return best;
}

namespace {

std::atomic<size_t> g_optimize_calls{0};

struct BaseEntry {
  std::vector<ParetoPoint> frontier;
  std::set<Symbol> ops;  // operators present anywhere in the saturated graph
};

struct OptimizeCache {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<const BaseEntry>> entries;
};

OptimizeCache& optimize_cache() {
  static OptimizeCache* c = new OptimizeCache;
  return *c;
}

std::string rules_fingerprint(const RuleSet& rules) {
  std::string text = write_rules(rules);
  return std::to_string(rules.size()) + ":" + std::to_string(std::hash<std::string>()(text));
}

std::string base_key(const Kernel& k, const Platform& p, const RuleSet& rules,
                     const SearchLimits& lim, size_t n, uint64_t seed) {
  std::string key = print(k.body) + "|";
  for (size_t i = 0; i < k.args.size(); ++i)
    key += k.args[i].str() + ":" + std::to_string(ordinal(k.ranges[i].lo)) + ":" +
           std::to_string(ordinal(k.ranges[i].hi)) + ",";
  key += "|" + rules_fingerprint(rules);
  key += "|" + std::to_string(lim.max_nodes) + "," + std::to_string(lim.max_iters) + "," +
         std::to_string(lim.max_extracted);
  key += "|" + std::to_string(n) + "|" + std::to_string(seed) + "|";
  for (const OpSpec& op : p.ops()) {
    if (op.builtin) {
      key += format_cost(op.cost) + ",";
    } else if (count_op(k.body, op.name)) {
      key += op.name.str() + "=" + print(op.formula) + "@" + format_cost(op.cost) +
             (op.assumed_exact ? "!" : "") + ",";
    }
  }
  return key;
}

std::set<Symbol> graph_ops(const EGraph& g) {
  std::set<Symbol> ops;
  for (Id c : g.classes())
    for (uint32_t i : g.class_nodes(c))
      if (g.node(i).head >= kHeadOps) ops.insert(g.head_symbol(g.node(i).head));
  return ops;
}

SampleSet head_subset(const SampleSet& s, size_t m) {
  SampleSet sub;
  sub.vars = s.vars;
  m = std::min(m, s.size());
  sub.requested = m;
  sub.coords.assign(s.coords.begin(), s.coords.begin() + m * s.vars.size());
  sub.reference.assign(s.reference.begin(), s.reference.begin() + m);
  sub.status.assign(s.status.begin(), s.status.begin() + m);
  return sub;
}

// Picks the terms to measure in full: the screening frontier first, then the
// cheapest remaining terms.
std::vector<Expr> choose_terms(const std::vector<Expr>& pool, const SampleSet& screen,
                               const Platform& p, size_t limit) {
  if (pool.size() <= limit) return pool;
  std::vector<ParetoPoint> quick;
  for (const Expr& t : pool)
    quick.push_back({t, expr_cost(p, t), accuracy(measure_error(t, screen, p))});
  std::vector<Expr> out;
  std::unordered_set<Expr, ExprHash> taken;
  for (const ParetoPoint& q : pareto_frontier(quick)) {
    if (out.size() >= limit) break;
    out.push_back(q.expr);
    taken.insert(q.expr);
  }
  for (const Expr& t : pool) {
    if (out.size() >= limit) break;
    if (taken.insert(t).second) out.push_back(t);
  }
  return out;
}

std::vector<ParetoPoint> extract_frontier(const Saturation& s, const Kernel& k,
                                          const Platform& p, const SearchLimits& lim,
                                          size_t n, uint64_t seed) {
  Extractor ex(*s.graph);
  auto samples = sample_points(k, n, seed, &p);
  std::vector<Expr> pool = ex.enumerate(s.root, kScreenFactor * lim.max_extracted);
  std::vector<Expr> terms =
      choose_terms(pool, head_subset(*samples, kScreenPoints), p, lim.max_extracted);
  if (std::find(terms.begin(), terms.end(), k.body) == terms.end()) terms.push_back(k.body);
  std::vector<ParetoPoint> pts;
  for (const Expr& t : terms)
    pts.push_back({t, expr_cost(p, t), accuracy(measure_error(t, *samples, p))});
  return pareto_frontier(std::move(pts));
}

bool fold_applicable(const RuleSet& fold, const std::set<Symbol>& ops) {
  for (const Rule& r : fold.rules) {
    bool all = true;
    for (const Expr& s : subexpressions(r.lhs))
      if (!ops.count(s.name())) all = false;
    if (all) return true;
  }
  return false;
}

}  // namespace

std::vector<ParetoPoint> optimize(const Kernel& k, const Platform& p, const RuleSet& rules,
                                  const SearchLimits& lim, size_t n_samples, uint64_t seed) {
  ++g_optimize_calls;
  std::string key = base_key(k, p, rules, lim, n_samples, seed);
  RuleSet fold = fold_rules(p);
  OptimizeCache& cache = optimize_cache();
  std::shared_ptr<const BaseEntry> base;
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    if (auto it = cache.entries.find(key); it != cache.entries.end()) base = it->second;
  }
  std::optional<Saturation> sat;
  if (!base) {
    sat = saturate(k.body, rules, lim, p, &k);
    auto entry = std::make_shared<BaseEntry>();
    entry->frontier = extract_frontier(*sat, k, p, lim, n_samples, seed);
    entry->ops = graph_ops(*sat->graph);
    std::lock_guard<std::mutex> lock(cache.mu);
    base = cache.entries.emplace(key, entry).first->second;
  }
  if (fold.rules.empty() || !fold_applicable(fold, base->ops)) return base->frontier;
  if (!sat) sat = saturate(k.body, rules, lim, p, &k);
  SearchLimits fl = lim;
  fl.max_iters = kFoldIters;
  run_rules(*sat->graph, fold, fl, {}, kFoldMatchLimit, OverLimit::kTruncate);
  sat->root = sat->graph->find(sat->root);
  std::vector<ParetoPoint> pts = extract_frontier(*sat, k, p, lim, n_samples, seed);
  // Points found without the defined ops stay valid.
  for (const ParetoPoint& b : base->frontier) pts.push_back(b);
  return pareto_frontier(std::move(pts));
}

double acc_workload(const std::vector<Kernel>& ks, const Platform& p, const RuleSet& rules,
                    const SearchLimits& lim, size_t n_samples, uint64_t seed, size_t jobs) {
  if (ks.empty()) return 0;
  std::vector<double> best(ks.size());
  parallel_for(ks.size(), jobs, [&](size_t i) {
    best[i] = best_accuracy(optimize(ks[i], p, rules, lim, n_samples, seed));
  });
  double sum = 0;
  for (double b : best) sum += b;
  return sum / static_cast<double>(ks.size());
}

size_t optimize_call_count() { return g_optimize_calls.load(); }
void reset_optimize_call_count() { g_optimize_calls = 0; }

void clear_optimize_cache() {
  OptimizeCache& cache = optimize_cache();
  std::lock_guard<std::mutex> lock(cache.mu);
  cache.entries.clear();
}

}  // namespace primlearn

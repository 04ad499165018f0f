#include "primlearn/selection.h"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>

#include "primlearn/parallel.h"

namespace primlearn {
namespace {

// Descending by key, then frequency, then ascending pattern text.
bool rank_before(const std::vector<Candidate>& pool, size_t a, size_t b, double ka, double kb) {
  if (ka != kb) return ka > kb;
  if (pool[a].frequency != pool[b].frequency) return pool[a].frequency > pool[b].frequency;
  return print(pool[a].pattern) < print(pool[b].pattern);
}

double stage1_key(const Candidate& c) { return static_cast<double>(c.frequency) / c.size; }

double score_of(const Candidate& c) { return c.score.value_or(0); }

}  // namespace

std::string candidate_op_name(size_t index, std::string_view prefix) {
  return std::string(prefix) + std::to_string(index);
}

std::string free_op_prefix(const Platform& p) {
  auto clashes = [&](const std::string& prefix) {
    for (const OpSpec& op : p.ops()) {
      const std::string& n = op.name.str();
      if (n.size() > prefix.size() && n.starts_with(prefix) &&
          std::all_of(n.begin() + prefix.size(), n.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        return true;
    }
    return false;
  };
  std::string prefix = "c";
  while (clashes(prefix)) prefix += "c";
  return prefix;
}

Platform platform_with(const Platform& base, const std::vector<Candidate>& pool,
                       const std::vector<size_t>& chosen, std::string_view prefix) {
  Platform p = base;
  for (size_t i : chosen)
    p = extend_with_candidate(p, Symbol(candidate_op_name(i, prefix)), pool[i].pattern);
  return p;
}

Kernel candidate_kernel(const Candidate& c, size_t index, std::string_view prefix) {
  return kernel_from_expr(candidate_op_name(index, prefix), c.pattern);
}

std::vector<size_t> stage1_rank(const std::vector<Candidate>& pool,
                                const std::vector<size_t>& indices, size_t t1) {
  std::vector<size_t> order = indices;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return rank_before(pool, a, b, stage1_key(pool[a]), stage1_key(pool[b]));
  });
  if (order.size() > t1) order.resize(t1);
  return order;
}

double urgency(const std::vector<Candidate>& pool, size_t index,
               const std::vector<size_t>& selected, const Platform& base,
               const EvalContext& ctx, bool* failed) {
  if (failed) *failed = false;
  Platform p = platform_with(base, pool, selected, ctx.op_prefix);
  try {
    auto frontier = optimize(candidate_kernel(pool[index], index, ctx.op_prefix), p, ctx.rules, ctx.limits,
                             ctx.samples, ctx.seed);
    return std::clamp(1.0 - best_accuracy(frontier), 0.0, 1.0);
  } catch (const SamplingError&) {
    if (failed) *failed = true;
    return 0;
  }
}

double full_score(const Candidate& c) {
  return static_cast<double>(c.frequency) * c.urgency.value_or(0) / c.size;
}

ImplicationGraph build_implication_graph(const std::vector<Candidate>& pool,
                                         const std::vector<size_t>& batch,
                                         const std::vector<size_t>& selected,
                                         const Platform& base, const SelectionConfig& cfg,
                                         const EvalContext& ctx) {
  ImplicationGraph g;
  g.nodes = batch;
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t f : batch)
    for (size_t gi : batch)
      if (f != gi) pairs.emplace_back(f, gi);
  Platform with_s = platform_with(base, pool, selected, ctx.op_prefix);
  std::vector<double> best(pairs.size(), -1);
  parallel_for(pairs.size(), ctx.jobs, [&](size_t i) {
    auto [f, gi] = pairs[i];
    Symbol op(candidate_op_name(f, ctx.op_prefix));
    Platform p = extend_with_candidate(with_s, op, pool[f].pattern);
    std::vector<ParetoPoint> frontier;
    try {
      frontier = optimize(candidate_kernel(pool[gi], gi, ctx.op_prefix), p, ctx.rules, ctx.limits, ctx.samples,
                          ctx.seed);
    } catch (const SamplingError&) {
      return;
    }
    for (const ParetoPoint& pt : frontier)
      if (count_op(pt.expr, op)) best[i] = std::max(best[i], pt.accuracy);
  });
  for (size_t i = 0; i < pairs.size(); ++i)
    if (best[i] >= cfg.implication_threshold)
      g.edges.push_back({pairs[i].first, pairs[i].second, best[i]});
  return g;
}

std::vector<std::vector<size_t>> strongly_connected_components(
    size_t n, const std::vector<std::pair<size_t, size_t>>& edges) {
  std::vector<std::vector<size_t>> adj(n);
  for (auto [a, b] : edges) adj[a].push_back(b);
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<size_t> stack;
  std::vector<std::vector<size_t>> comps;
  int counter = 0;
  std::function<void(size_t)> visit = [&](size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (size_t w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<size_t> comp;
      size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (size_t v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return comps;
}

std::vector<std::vector<size_t>> source_components(
    size_t n, const std::vector<std::pair<size_t, size_t>>& edges) {
  auto comps = strongly_connected_components(n, edges);
  std::vector<size_t> comp_of(n);
  for (size_t c = 0; c < comps.size(); ++c)
    for (size_t v : comps[c]) comp_of[v] = c;
  std::vector<bool> has_in(comps.size(), false);
  for (auto [a, b] : edges)
    if (comp_of[a] != comp_of[b]) has_in[comp_of[b]] = true;
  std::vector<std::vector<size_t>> out;
  for (size_t c = 0; c < comps.size(); ++c)
    if (!has_in[c]) out.push_back(comps[c]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<size_t> choose_from_graph(const ImplicationGraph& g,
                                      const std::vector<Candidate>& pool) {
  std::map<size_t, size_t> local;
  for (size_t i = 0; i < g.nodes.size(); ++i) local.emplace(g.nodes[i], i);
  std::vector<std::pair<size_t, size_t>> edges;
  for (const ImplicationEdge& e : g.edges) edges.emplace_back(local.at(e.from), local.at(e.to));
  auto better = [&](size_t a, size_t b) {
    return rank_before(pool, a, b, full_score(pool[a]), full_score(pool[b]));
  };
  std::vector<size_t> chosen;
  for (const auto& comp : source_components(g.nodes.size(), edges)) {
    size_t best = g.nodes[comp[0]];
    for (size_t v : comp)
      if (better(g.nodes[v], best)) best = g.nodes[v];
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end(), better);
  return chosen;
}

SelectionState run_selection(std::vector<Candidate> pool, const std::vector<Kernel>& kernels,
                             const Platform& base, const SelectionConfig& cfg,
                             const EvalContext& ctx, const StageTimer& timer) {
  using Clock = std::chrono::steady_clock;
  auto lap = [&](const std::string& stage, Clock::time_point since) {
    if (timer) timer(stage, std::chrono::duration<double>(Clock::now() - since).count());
  };
  SelectionState st;
  st.op_prefix = ctx.op_prefix;
  st.pool = std::move(pool);
  auto t0 = Clock::now();
  st.workload_acc_history.push_back(
      acc_workload(kernels, base, ctx.rules, ctx.limits, ctx.samples, ctx.seed, ctx.jobs));
  lap("initial-superoptimization", t0);
  while (st.selected.size() < cfg.target_size) {
    t0 = Clock::now();
    std::string stage = "selection-stage-" + std::to_string(st.rounds.size() + 1);
    std::set<size_t> taken(st.selected.begin(), st.selected.end());
    std::vector<size_t> remaining;
    for (size_t i = 0; i < st.pool.size(); ++i)
      if (!taken.count(i)) remaining.push_back(i);
    RoundRecord rec;
    if (remaining.empty()) {
      st.rounds.push_back(std::move(rec));
      lap(stage, t0);
      break;
    }
    rec.stage1 = stage1_rank(st.pool, remaining, cfg.t1);
    std::vector<double> urg(rec.stage1.size());
    std::vector<char> failed(rec.stage1.size());
    parallel_for(rec.stage1.size(), ctx.jobs, [&](size_t i) {
      bool f = false;
      urg[i] = urgency(st.pool, rec.stage1[i], st.selected, base, ctx, &f);
      failed[i] = f;
    });
    for (size_t i = 0; i < rec.stage1.size(); ++i) {
      Candidate& c = st.pool[rec.stage1[i]];
      c.urgency = urg[i];
      c.urgency_failed = failed[i];
      c.score = full_score(c);
      rec.urgencies.emplace_back(rec.stage1[i], urg[i]);
    }
    std::vector<size_t> order = rec.stage1;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return rank_before(st.pool, a, b, score_of(st.pool[a]), score_of(st.pool[b]));
    });
    for (size_t i : order) {
      if (rec.batch.size() >= cfg.t2) break;
      if (score_of(st.pool[i]) > 0) rec.batch.push_back(i);
    }
    if (rec.batch.empty()) {
      rec.workload_acc = st.workload_acc_history.back();
      st.rounds.push_back(std::move(rec));
      lap(stage, t0);
      break;
    }
    rec.graph = build_implication_graph(st.pool, rec.batch, st.selected, base, cfg, ctx);
    rec.chosen = choose_from_graph(rec.graph, st.pool);
    st.selected.insert(st.selected.end(), rec.chosen.begin(), rec.chosen.end());
    rec.workload_acc = acc_workload(kernels, platform_with(base, st.pool, st.selected, ctx.op_prefix), ctx.rules,
                                    ctx.limits, ctx.samples, ctx.seed, ctx.jobs);
    st.workload_acc_history.push_back(rec.workload_acc);
    st.rounds.push_back(std::move(rec));
    lap(stage, t0);
  }
  return st;
}

std::optional<double> cost_at_accuracy(const std::vector<ParetoPoint>& frontier,
                                       double threshold) {
  std::optional<double> best;
  for (const ParetoPoint& p : frontier)
    if (p.accuracy >= threshold && (!best || p.cost < *best)) best = p.cost;
  return best;
}

FinalReport final_pass(const std::vector<Kernel>& kernels, SelectionState& state,
                       const Platform& base, const SelectionConfig& cfg,
                       const EvalContext& ctx) {
  FinalReport rep;
  Platform extended = platform_with(base, state.pool, state.selected, state.op_prefix);
  rep.kernels.resize(kernels.size());
  parallel_for(2 * kernels.size(), ctx.jobs, [&](size_t t) {
    const Kernel& k = kernels[t / 2];
    const Platform& p = t % 2 ? extended : base;
    auto frontier = optimize(k, p, ctx.rules, ctx.limits, ctx.final_samples, ctx.seed);
    KernelOutcome& out = rep.kernels[t / 2];
    (t % 2 ? out.extended_frontier : out.base_frontier) = std::move(frontier);
  });
  for (size_t i = 0; i < kernels.size(); ++i) {
    rep.kernels[i].name = kernels[i].name;
    rep.base_acc += best_accuracy(rep.kernels[i].base_frontier);
    rep.extended_acc += best_accuracy(rep.kernels[i].extended_frontier);
  }
  if (!kernels.empty()) {
    rep.base_acc /= static_cast<double>(kernels.size());
    rep.extended_acc /= static_cast<double>(kernels.size());
  }
  for (int t = 50; t <= 99; ++t) rep.thresholds.push_back(t / 100.0);

  std::vector<size_t> kept;
  for (size_t idx : state.selected) {
    ProposedPrimitive pp;
    pp.index = idx;
    pp.op = candidate_op_name(idx, state.op_prefix);
    pp.formula = state.pool[idx].pattern;
    pp.cost = extended.find(pp.op)->cost;
    Symbol op(pp.op);
    for (const KernelOutcome& ko : rep.kernels)
      for (const ParetoPoint& pt : ko.extended_frontier) pp.uses += count_op(pt.expr, op);
    state.pool[idx].uses = pp.uses;
    if (pp.uses >= cfg.min_uses) {
      kept.push_back(idx);
      rep.proposed.push_back(std::move(pp));
    } else {
      rep.dropped.push_back(std::move(pp));
    }
  }
  rep.proposed_platform = platform_with(base, state.pool, kept, state.op_prefix);
  rep.proposed_platform.set_name(base.name() + "-grown");
  return rep;
}

}  // namespace primlearn

#include <algorithm>
#include <array>
#include <map>

#include "primlearn/superopt.h"

namespace primlearn {
namespace {

constexpr Id kUnset = UINT32_MAX;
constexpr size_t kMaxPatternVars = 8;
using Subst = std::array<Id, kMaxPatternVars>;

struct PNode {
  ExprKind kind = ExprKind::kVar;
  uint32_t head = 0;
  uint32_t payload = 0;
  std::vector<int> kids;
};

struct Pattern {
  std::vector<PNode> nodes;
  int root = -1;
};

struct CompiledRule {
  const Rule* rule = nullptr;
  Pattern lhs;
  Pattern rhs;
  std::vector<std::pair<int, Condition>> conditions;  // pattern var index
};

class Compiler {
 public:
  explicit Compiler(EGraph& g) : g_(g) {}

  int var(Symbol s) {
    auto it = vars_.find(s);
    if (it != vars_.end()) return it->second;
    int i = static_cast<int>(vars_.size());
    vars_.emplace(s, i);
    return i;
  }
  size_t var_count() const { return vars_.size(); }

  int compile(const Expr& e, Pattern& p) {
    PNode n;
    n.kind = e.kind();
    switch (e.kind()) {
      case ExprKind::kVar:
        n.payload = static_cast<uint32_t>(var(e.name()));
        break;
      case ExprKind::kNum:
        n.payload = g_.num_index(e.value());
        break;
      case ExprKind::kConst:
        n.payload = static_cast<uint32_t>(e.const_name());
        break;
      case ExprKind::kApp:
        n.head = g_.op_head(e.name());
        for (const Expr& a : e.args()) n.kids.push_back(compile(a, p));
        break;
    }
    p.nodes.push_back(std::move(n));
    return static_cast<int>(p.nodes.size() - 1);
  }

 private:
  EGraph& g_;
  std::map<Symbol, int> vars_;
};

std::optional<CompiledRule> compile_rule(EGraph& g, const Rule& r) {
  for (const Expr& side : {r.lhs, r.rhs})
    for (const Expr& s : subexpressions(side))
      if (!g.find_op_head(s.name())) return std::nullopt;
  CompiledRule c;
  c.rule = &r;
  Compiler comp(g);
  c.lhs.root = comp.compile(r.lhs, c.lhs);
  c.rhs.root = comp.compile(r.rhs, c.rhs);
  if (comp.var_count() > kMaxPatternVars) return std::nullopt;
  for (const Condition& cond : r.conditions) c.conditions.emplace_back(comp.var(cond.var), cond);
  return c;
}

// Search steps allowed per admitted match. Patterns with repeated variables
// can explore far more candidate nodes than they ever return.
constexpr size_t kStepsPerMatch = 64;

// Backtracking matcher over an explicit stack of (pattern node, class) goals.
class Matcher {
 public:
  Matcher(const EGraph& g, const Pattern& p, size_t cap)
      : g_(g), p_(p), cap_(cap), step_cap_(cap * kStepsPerMatch) {}

  // Appends substitutions matching class c; false once the match cap or the
  // step budget (shared by all calls) is exceeded.
  bool match(Id c, std::vector<Subst>& out) {
    out_ = &out;
    Subst s;
    s.fill(kUnset);
    todo_.clear();
    todo_.emplace_back(p_.root, g_.find(c));
    search(s);
    return !exhausted();
  }

 private:
  bool exhausted() const { return out_->size() > cap_ || steps_ > step_cap_; }

  void search(Subst& s) {
    if (exhausted()) return;
    ++steps_;
    if (todo_.empty()) {
      out_->push_back(s);
      return;
    }
    auto [pi, c] = todo_.back();
    todo_.pop_back();
    const PNode& pn = p_.nodes[pi];
    switch (pn.kind) {
      case ExprKind::kVar: {
        Id bound = s[pn.payload];
        if (bound == kUnset) {
          s[pn.payload] = c;
          search(s);
          s[pn.payload] = kUnset;
        } else if (g_.find(bound) == c) {
          search(s);
        }
        break;
      }
      case ExprKind::kNum: {
        const mpq_class* k = g_.constant(c);
        if (k && *k == g_.num(pn.payload)) search(s);
        break;
      }
      case ExprKind::kConst:
        for (uint32_t i : g_.class_nodes_with_head(c, kHeadConst)) {
          if (g_.node(i).payload == pn.payload) {
            search(s);
            break;
          }
        }
        break;
      case ExprKind::kApp:
        for (uint32_t i : g_.class_nodes_with_head(c, pn.head)) {
          const ENode& n = g_.node(i);
          if (n.arity != pn.kids.size()) continue;
          size_t mark = todo_.size();
          for (size_t k = pn.kids.size(); k-- > 0;)
            todo_.emplace_back(pn.kids[k], g_.find(n.kids[k]));
          search(s);
          todo_.resize(mark);
          if (exhausted()) break;
        }
        break;
    }
    todo_.emplace_back(pi, c);
  }

  const EGraph& g_;
  const Pattern& p_;
  size_t cap_;
  size_t step_cap_;
  size_t steps_ = 0;
  std::vector<Subst>* out_ = nullptr;
  std::vector<std::pair<int, Id>> todo_;
};

Id instantiate(EGraph& g, const Pattern& p, int pi, const Subst& s) {
  const PNode& pn = p.nodes[pi];
  ENode n;
  switch (pn.kind) {
    case ExprKind::kVar:
      return g.find(s[pn.payload]);
    case ExprKind::kNum:
      n.head = kHeadNum;
      n.payload = pn.payload;
      return g.add(n);
    case ExprKind::kConst:
      n.head = kHeadConst;
      n.payload = pn.payload;
      return g.add(n);
    case ExprKind::kApp:
      break;
  }
  n.head = pn.head;
  n.arity = static_cast<uint8_t>(pn.kids.size());
  for (size_t k = 0; k < pn.kids.size(); ++k) n.kids[k] = instantiate(g, p, pn.kids[k], s);
  return g.add(n);
}

struct RuleState {
  size_t banned_until = 0;
  int times_banned = 0;
};

constexpr size_t kBanLength = 5;

}  // namespace

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kSaturated: return "saturated";
    case StopReason::kIterLimit: return "iter-limit";
    case StopReason::kNodeLimit: return "node-limit";
    case StopReason::kGoal: return "goal";
  }
  return "?";
}

RunStats run_rules(EGraph& g, const RuleSet& rules, const SearchLimits& lim,
                   const std::function<bool()>& goal, size_t match_limit,
                   OverLimit over_limit) {
  RunStats stats;
  g.rebuild();
  if (goal && goal()) {
    stats.stop = StopReason::kGoal;
    return stats;
  }
  std::vector<CompiledRule> compiled;
  for (const Rule& r : rules.rules)
    if (auto c = compile_rule(g, r)) compiled.push_back(std::move(*c));
  std::vector<RuleState> state(compiled.size());

  stats.stop = StopReason::kIterLimit;
  for (size_t iter = 0; iter < lim.max_iters; ++iter) {
    if (g.node_count() >= lim.max_nodes) {
      stats.stop = StopReason::kNodeLimit;
      break;
    }
    std::vector<std::vector<std::pair<Id, Subst>>> matches(compiled.size());
    bool any_banned = false;
    for (size_t ri = 0; ri < compiled.size(); ++ri) {
      RuleState& st = state[ri];
      if (st.banned_until > iter) {
        any_banned = true;
        continue;
      }
      const CompiledRule& cr = compiled[ri];
      size_t cap = match_limit << st.times_banned;
      Matcher m(g, cr.lhs, cap);
      std::vector<Subst> substs;
      bool within = true;
      // Copy: the head index is rebuilt only between iterations, but keep
      // the search independent of later mutation anyway.
      std::vector<Id> roots = g.classes_with_head(cr.lhs.nodes[cr.lhs.root].head);
      for (Id c : roots) {
        size_t before = substs.size();
        within = m.match(c, substs);
        for (size_t i = before; i < substs.size(); ++i) matches[ri].emplace_back(c, substs[i]);
        if (!within) break;
      }
      if (!within && over_limit == OverLimit::kTruncate) {
        if (matches[ri].size() > cap) matches[ri].resize(cap);
      } else if (!within) {
        st.banned_until = iter + (kBanLength << st.times_banned);
        ++st.times_banned;
        matches[ri].clear();
        any_banned = true;
      }
    }

    size_t applied = 0;
    bool node_limit = false;
    for (size_t ri = 0; ri < compiled.size() && !node_limit; ++ri) {
      const CompiledRule& cr = compiled[ri];
      size_t rhs_size = cr.rhs.nodes.size();
      for (const auto& [c, s] : matches[ri]) {
        bool ok = true;
        for (const auto& [v, cond] : cr.conditions)
          if (!cond.holds(g.range(s[v]))) ok = false;
        if (!ok) continue;
        if (g.node_count() + 2 * rhs_size > lim.max_nodes) {
          node_limit = true;
          break;
        }
        Id r = instantiate(g, cr.rhs, cr.rhs.root, s);
        if (g.merge(c, r)) ++applied;
      }
    }
    g.rebuild();
    ++stats.iterations;
    stats.applied += applied;
    if (goal && goal()) {
      stats.stop = StopReason::kGoal;
      break;
    }
    if (node_limit) {
      stats.stop = StopReason::kNodeLimit;
      break;
    }
    if (applied == 0 && !any_banned) {
      stats.stop = StopReason::kSaturated;
      break;
    }
  }
  return stats;
}

Saturation saturate(const Expr& e, const RuleSet& rules, const SearchLimits& lim,
                    const Platform& p, const Kernel* context) {
  Saturation s;
  s.platform = std::make_shared<const Platform>(p);
  s.graph = std::make_unique<EGraph>(*s.platform);
  if (context) {
    for (size_t i = 0; i < context->args.size(); ++i)
      s.graph->set_var_range(context->args[i], context->ranges[i]);
  }
  s.root = s.graph->add_expr(e);
  s.stats = run_rules(*s.graph, rules, lim);
  s.root = s.graph->find(s.root);
  return s;
}

}  // namespace primlearn

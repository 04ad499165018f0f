#include "primlearn/dedup.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "primlearn/parallel.h"
#include "primlearn/reference.h"

namespace primlearn {
namespace {

constexpr size_t kNodesPerForm = 500;
constexpr size_t kBucketNodeCap = 200000;

struct UnionFind {
  std::vector<size_t> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  size_t find(size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Exactly rounded values at fixed points in (0, 1); patterns with the same
// real semantics under some variable permutation get the same fingerprint.
constexpr double kProbe[3][kMaxPatternVars] = {
    {0.0123, 0.371, 0.613}, {0.0711, 0.293, 0.829}, {0.4142, 0.1732, 0.0577}};

using Fingerprint = std::array<double, 3>;

Fingerprint probe(const Expr& form, size_t nvars) {
  std::vector<Symbol> vars;
  for (size_t i = 0; i < nvars; ++i) vars.push_back(canonical_var(static_cast<int>(i) + 1));
  ReferenceEvaluator ref(form, vars);
  Fingerprint fp;
  for (size_t k = 0; k < 3; ++k) {
    RefResult r = ref.eval(kProbe[k]);
    // Undefined and unresolved points get distinct sentinels.
    fp[k] = r.status == RefStatus::kOk ? r.value
            : r.status == RefStatus::kUndefined ? -HUGE_VAL : HUGE_VAL;
    if (std::isnan(fp[k])) fp[k] = -HUGE_VAL;
  }
  return fp;
}

std::pair<size_t, Fingerprint> bucket_key(const std::vector<Expr>& forms) {
  size_t nvars = free_vars(forms.front()).size();
  Fingerprint best{};
  for (size_t i = 0; i < forms.size(); ++i) {
    Fingerprint fp = probe(forms[i], nvars);
    if (i == 0 || fp < best) best = fp;
  }
  return {nvars, best};
}

bool better_rep(const Expr& a, double ca, const Expr& b, double cb) {
  if (ca != cb) return ca < cb;
  std::string pa = print(a), pb = print(b);
  if (pa.size() != pb.size()) return pa.size() < pb.size();
  return pa < pb;
}

}  // namespace

std::vector<Expr> canonical_forms(const Expr& e) {
  std::vector<Symbol> vars = free_vars(e);
  if (vars.size() > kMaxPatternVars)
    throw std::invalid_argument("pattern has more than " + std::to_string(kMaxPatternVars) +
                                " variables");
  std::vector<size_t> perm(vars.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Expr> out;
  do {
    Binding b;
    for (size_t i = 0; i < vars.size(); ++i) b[vars[i]] = Expr::var(canonical_var(perm[i] + 1));
    Expr f = substitute(e, b);
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<Candidate> dedup_pool(const std::vector<RawCandidate>& raw, const RuleSet& rules,
                                  const SearchLimits& lim, const Platform& p, size_t jobs,
                                  DedupStats* stats) {
  // Identical patterns after alpha-normalization are one entry.
  std::map<std::string, RawCandidate> unique;
  for (const RawCandidate& rc : raw) {
    Expr n = alpha_normalize(rc.pattern);
    RawCandidate& u = unique[print(n)];
    if (!u.pattern) u.pattern = n;
    u.occurrences += rc.occurrences;
    u.source_kernels.insert(rc.source_kernels.begin(), rc.source_kernels.end());
  }
  std::vector<RawCandidate> items;
  for (auto& [text, rc] : unique) items.push_back(std::move(rc));
  std::sort(items.begin(), items.end(),
            [](const RawCandidate& a, const RawCandidate& b) { return a.pattern < b.pattern; });

  std::vector<std::vector<Expr>> forms(items.size());
  for (size_t i = 0; i < items.size(); ++i) forms[i] = canonical_forms(items[i].pattern);

  UnionFind uf(items.size());
  // Permutation-equal patterns share a form.
  std::map<std::string, size_t> form_owner;
  for (size_t i = 0; i < items.size(); ++i) {
    for (const Expr& f : forms[i]) {
      auto [it, inserted] = form_owner.emplace(print(f), i);
      if (!inserted) uf.unite(i, it->second);
    }
  }

  std::vector<std::pair<size_t, Fingerprint>> keys(items.size());
  parallel_for(items.size(), jobs, [&](size_t i) { keys[i] = bucket_key(forms[i]); });
  std::map<std::pair<size_t, Fingerprint>, std::vector<size_t>> buckets;
  for (size_t i = 0; i < items.size(); ++i) buckets[keys[i]].push_back(i);
  std::vector<std::vector<size_t>> work;
  for (auto& [key, members] : buckets)
    if (members.size() > 1) work.push_back(members);

  std::vector<std::vector<std::pair<size_t, size_t>>> unions(work.size());
  Platform base = default_platform();
  for (const OpSpec& op : p.ops())
    if (op.builtin) base.set_cost(op.name, op.cost);
  parallel_for(work.size(), jobs, [&](size_t w) {
    const std::vector<size_t>& members = work[w];
    EGraph g(base);
    std::vector<std::vector<Id>> roots(members.size());
    size_t nforms = 0;
    for (size_t m = 0; m < members.size(); ++m) {
      for (const Expr& f : forms[members[m]]) {
        roots[m].push_back(g.add_expr(f));
        ++nforms;
      }
    }
    SearchLimits bl = lim;
    bl.max_nodes = std::min(kBucketNodeCap, std::max(lim.max_nodes, kNodesPerForm * nforms));
    // Stop once every member sits in one class.
    auto merged = [&] {
      for (size_t m = 1; m < members.size(); ++m)
        if (g.find(roots[m][0]) != g.find(roots[0][0])) return false;
      return true;
    };
    run_rules(g, rules, bl, merged);
    std::map<Id, size_t> class_owner;
    for (size_t m = 0; m < members.size(); ++m) {
      for (Id r : roots[m]) {
        auto [it, inserted] = class_owner.emplace(g.find(r), m);
        if (!inserted) unions[w].emplace_back(members[it->second], members[m]);
      }
    }
  });
  for (const auto& u : unions)
    for (const auto& [a, b] : u) uf.unite(a, b);

  std::map<size_t, std::vector<size_t>> classes;
  for (size_t i = 0; i < items.size(); ++i) classes[uf.find(i)].push_back(i);

  std::vector<Candidate> out;
  for (const auto& [root, members] : classes) {
    Candidate c;
    double best_cost = 0;
    for (size_t i : members) {
      const RawCandidate& rc = items[i];
      double cost = expr_cost(p, rc.pattern);
      if (!c.pattern || better_rep(rc.pattern, cost, c.pattern, best_cost)) {
        c.pattern = rc.pattern;
        best_cost = cost;
      }
      c.frequency += rc.occurrences;
      c.source_kernels.insert(rc.source_kernels.begin(), rc.source_kernels.end());
      c.members.push_back(rc.pattern);
    }
    c.size = best_cost;
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.pattern < b.pattern; });
  if (stats) {
    stats->buckets = buckets.size();
    stats->saturated_buckets = work.size();
    stats->classes = out.size();
  }
  return out;
}

}  // namespace primlearn

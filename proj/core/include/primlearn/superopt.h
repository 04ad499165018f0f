#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "primlearn/egraph.h"
#include "primlearn/expr.h"
#include "primlearn/fpcore.h"
#include "primlearn/platform.h"
#include "primlearn/rules.h"

namespace primlearn {

struct SearchLimits {
  size_t max_nodes = 20000;
  size_t max_iters = 8;
  size_t max_extracted = 50;
  size_t harvest_cap = 1000;
};

// Limits used for dedup equivalence checks.
inline SearchLimits dedup_limits() { return SearchLimits{5000, 6, 50, 1000}; }

struct ParetoPoint {
  Expr expr;
  double cost = 0;
  double accuracy = 0;
};

enum class StopReason { kSaturated, kIterLimit, kNodeLimit, kGoal };
const char* stop_reason_name(StopReason r);

struct RunStats {
  size_t iterations = 0;
  size_t applied = 0;  // rewrites that changed the graph
  StopReason stop = StopReason::kSaturated;
};

// Matches per rule and iteration before the rule is banned for a while; the
// limit and the ban length double with each ban.
inline constexpr size_t kDefaultMatchLimit = 1000;

// What happens to a rule whose matches exceed the limit: it is banned and
// its matches dropped, or only the first `limit` matches are applied.
enum class OverLimit { kBan, kTruncate };

// Equality saturation on an existing graph. `goal` is polled after every
// iteration; returning true stops early.
RunStats run_rules(EGraph& g, const RuleSet& rules, const SearchLimits& lim,
                   const std::function<bool()>& goal = {},
                   size_t match_limit = kDefaultMatchLimit,
                   OverLimit over_limit = OverLimit::kBan);

struct Saturation {
  std::shared_ptr<const Platform> platform;
  std::unique_ptr<EGraph> graph;
  Id root = 0;
  RunStats stats;
};

// Saturates e. With a kernel context, variable ranges come from its
// precondition; otherwise variables are unbounded.
Saturation saturate(const Expr& e, const RuleSet& rules, const SearchLimits& lim,
                    const Platform& p = default_platform(), const Kernel* context = nullptr);

// Cheapest term per class plus up to three alternatives per class, each
// rooted at a different node.
class Extractor {
 public:
  explicit Extractor(const EGraph& g);

  double best_cost(Id c) const;
  Expr best(Id c) const;
  // Term of one node built from its children's cheapest terms.
  Expr node_term(uint32_t node) const;
  const std::vector<Expr>& representatives(Id c) const;
  // Up to `limit` distinct terms of class c by ascending cost.
  std::vector<Expr> enumerate(Id c, size_t limit) const;

 private:
  double node_cost(const ENode& n) const;

  const EGraph& g_;
  std::vector<double> cost_;
  std::vector<int64_t> best_node_;
  mutable std::vector<Expr> best_;
  mutable std::vector<std::vector<Expr>> reps_;
  mutable std::vector<uint8_t> reps_done_;
};

// Terms from every class of a saturated graph: for each live node the term
// using the cheapest child terms. Classes nearer the root come first, then
// smaller terms; at most harvest_cap terms.
std::vector<Expr> harvest_intermediates(const EGraph& g, Id root, const SearchLimits& lim);
std::vector<Expr> harvest_intermediates(const Saturation& s, const SearchLimits& lim);

// Sound but incomplete: true only when a and b end in one e-class.
bool prove_equivalent(const Expr& a, const Expr& b, const RuleSet& rules,
                      const SearchLimits& lim);

// Non-dominated (cost, accuracy) points sorted by ascending cost.
std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> pts);

std::vector<ParetoPoint> optimize(const Kernel& k, const Platform& p, const RuleSet& rules,
                                  const SearchLimits& lim, size_t n_samples, uint64_t seed);

double best_accuracy(const std::vector<ParetoPoint>& frontier);

double acc_workload(const std::vector<Kernel>& ks, const Platform& p, const RuleSet& rules,
                    const SearchLimits& lim, size_t n_samples, uint64_t seed, size_t jobs = 1);

// Number of optimize() calls issued by this process, cached or not.
size_t optimize_call_count();
void reset_optimize_call_count();
// Drops cached base-rule frontiers.
void clear_optimize_cache();

}  // namespace primlearn

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "primlearn/egraph.h"
#include "primlearn/fpcore.h"
#include "primlearn/rules.h"
#include "primlearn/superopt.h"

namespace primlearn {
namespace {

Expr E(const char* s) { return parse_expr(s); }

TEST(EGraph, HashConsing) {
  Platform p = default_platform();
  EGraph g(p);
  Id a = g.add_expr(E("(+ x (* y 2))"));
  Id b = g.add_expr(E("(+ x (* y 2))"));
  EXPECT_EQ(a, b);
  EXPECT_EQ(g.node_count(), 5u);
}

TEST(EGraph, CongruenceAfterMerge) {
  Platform p = default_platform();
  EGraph g(p);
  Id fx = g.add_expr(E("(sin (+ x 0))"));
  Id fy = g.add_expr(E("(sin x)"));
  EXPECT_NE(g.find(fx), g.find(fy));
  g.merge(g.add_expr(E("(+ x 0)")), g.add_expr(E("x")));
  g.rebuild();
  EXPECT_EQ(g.find(fx), g.find(fy));
}

TEST(EGraph, ConstantAnalysis) {
  Platform p = default_platform();
  EGraph g(p);
  Id c = g.add_expr(E("(+ 1/3 (* 2 1/6))"));
  g.rebuild();
  ASSERT_NE(g.constant(c), nullptr);
  EXPECT_EQ(*g.constant(c), mpq_class(2, 3));
}

TEST(EGraph, RangesFollowPreconditions) {
  Platform p = default_platform();
  EGraph g(p);
  g.set_var_range(Symbol("x"), {1, 2});
  Id c = g.add_expr(E("(+ x 1)"));
  g.rebuild();
  EXPECT_TRUE(g.range(c).positive());
  EXPECT_GE(g.range(c).lo, 1.99);
}

TEST(Rules, TextRoundTrip) {
  RuleSet rs = default_rules();
  ASSERT_GT(rs.size(), 50u);
  RuleSet again = parse_rules(write_rules(rs));
  ASSERT_EQ(again.size(), rs.size());
  for (size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(again.rules[i].name, rs.rules[i].name);
    EXPECT_EQ(again.rules[i].lhs, rs.rules[i].lhs);
    EXPECT_EQ(again.rules[i].conditions.size(), rs.rules[i].conditions.size());
  }
}

TEST(Rules, Conditions) {
  RuleSet rs = parse_rules("(rule r (sqrt (* a a)) a (>= a 0))");
  const Condition& c = rs.rules[0].conditions[0];
  EXPECT_TRUE(c.holds(0.0));
  EXPECT_FALSE(c.holds(-1.0));
  EXPECT_TRUE(c.holds(Range{0, 5}));
  EXPECT_FALSE(c.holds(Range{-1, 5}));
  EXPECT_THROW(parse_rules("(rule r (+ a b) (+ a c))"), std::runtime_error);
}

TEST(Saturate, ProvesSimpleIdentities) {
  RuleSet rs = default_rules();
  SearchLimits lim;
  EXPECT_TRUE(prove_equivalent(E("(+ x y)"), E("(+ y x)"), rs, lim));
  EXPECT_TRUE(prove_equivalent(E("(* (+ x 1) 2)"), E("(+ (* 2 x) 2)"), rs, lim));
  EXPECT_FALSE(prove_equivalent(E("(+ x 1)"), E("(+ x 2)"), rs, lim));
}

TEST(Saturate, NodeLimitRespected) {
  SearchLimits lim;
  lim.max_nodes = 300;
  Saturation s = saturate(E("(+ (+ (+ a b) (+ c d)) (+ (* a b) (* c d)))"), default_rules(), lim);
  EXPECT_EQ(s.stats.stop, StopReason::kNodeLimit);
  EXPECT_LT(s.graph->node_count(), 300u * 4);
}

TEST(Extract, CheapestTermIsNoWorse) {
  Platform p = default_platform();
  Expr e = E("(- (+ x 1) 1)");
  Saturation s = saturate(e, default_rules(), SearchLimits{});
  Extractor ex(*s.graph);
  Expr best = ex.best(s.root);
  EXPECT_LE(expr_cost(p, best), expr_cost(p, e));
  EXPECT_DOUBLE_EQ(ex.best_cost(s.root), expr_cost(p, best));
  EXPECT_EQ(best, E("x"));
}

TEST(Extract, EnumerateAscendingDistinct) {
  Platform p = default_platform();
  Saturation s = saturate(E("(* (+ x 1) (+ x 1))"), default_rules(), SearchLimits{});
  Extractor ex(*s.graph);
  auto terms = ex.enumerate(s.root, 20);
  ASSERT_FALSE(terms.empty());
  std::set<Expr> seen(terms.begin(), terms.end());
  EXPECT_EQ(seen.size(), terms.size());
  for (size_t i = 1; i < terms.size(); ++i)
    EXPECT_LE(expr_cost(p, terms[i - 1]), expr_cost(p, terms[i]) + 1e-9);
}

TEST(Harvest, CapAndRootFirst) {
  SearchLimits lim;
  lim.harvest_cap = 25;
  Expr e = E("(log (/ (+ 1 x) (- 1 x)))");
  Saturation s = saturate(e, default_rules(), lim);
  auto terms = harvest_intermediates(s, lim);
  EXPECT_LE(terms.size(), 25u);
  ASSERT_FALSE(terms.empty());
  Extractor ex(*s.graph);
  // The root class is harvested before anything deeper.
  Id root_class = s.graph->find(s.root);
  EGraph& g = *s.graph;
  Id first = g.find(g.add_expr(terms[0]));
  g.rebuild();
  EXPECT_EQ(g.find(first), g.find(root_class));
}

// Brute-force non-dominated set over (cost, accuracy) pairs.
TEST(Pareto, MatchesBruteForce) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ParetoPoint> pts;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i)
      pts.push_back({Expr::num(i), static_cast<double>(rng() % 6), (rng() % 6) / 5.0});
    std::set<std::pair<double, double>> expect;
    for (const auto& a : pts) {
      bool dominated = false;
      for (const auto& b : pts)
        if (b.cost <= a.cost && b.accuracy >= a.accuracy &&
            (b.cost < a.cost || b.accuracy > a.accuracy))
          dominated = true;
      if (!dominated) expect.insert({a.cost, a.accuracy});
    }
    auto front = pareto_frontier(pts);
    std::set<std::pair<double, double>> got;
    for (size_t i = 0; i < front.size(); ++i) {
      got.insert({front[i].cost, front[i].accuracy});
      if (i) {
        EXPECT_LT(front[i - 1].cost, front[i].cost);
        EXPECT_LT(front[i - 1].accuracy, front[i].accuracy);
      }
    }
    EXPECT_EQ(got, expect);
    EXPECT_EQ(front.size(), expect.size());
  }
}

TEST(Optimize, FindsAccurateRewrite) {
  auto ks = parse_fpcore("(FPCore (x) :pre (<= (fabs x) 1e-6) (- (+ 1 x) 1))");
  auto front = optimize(ks[0], default_platform(), default_rules(), SearchLimits{}, 128, 1);
  ASSERT_FALSE(front.empty());
  EXPECT_EQ(best_accuracy(front), 1.0);
  for (const auto& pt : front) EXPECT_GE(pt.accuracy, 0);
}

TEST(Optimize, CallCounterAndCache) {
  auto ks = parse_fpcore("(FPCore (x) :pre (<= 1 x 2) (* x x))");
  reset_optimize_call_count();
  auto a = optimize(ks[0], default_platform(), default_rules(), SearchLimits{}, 64, 3);
  auto b = optimize(ks[0], default_platform(), default_rules(), SearchLimits{}, 64, 3);
  EXPECT_EQ(optimize_call_count(), 2u);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].expr, b[i].expr);
    EXPECT_EQ(a[i].accuracy, b[i].accuracy);
  }
}

TEST(Optimize, UsesDefinedOps) {
  Platform p = extend_with_candidate(default_platform(), Symbol("lpmd"),
                                     E("(log (/ (+ 1 t1) (- 1 t1)))"));
  auto ks = parse_fpcore("(FPCore (x) :pre (<= -0.5 x 0.5) (* 3 (log (/ (+ 1 x) (- 1 x)))))");
  auto front = optimize(ks[0], p, default_rules(), SearchLimits{}, 128, 1);
  bool calls = false;
  for (const auto& pt : front) calls |= count_op(pt.expr, Symbol("lpmd")) > 0;
  EXPECT_TRUE(calls);
}

}  // namespace
}  // namespace primlearn

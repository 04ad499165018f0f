#include <gtest/gtest.h>

#include <random>

#include "primlearn/fpcore.h"
#include "primlearn/platform.h"
#include "primlearn/sexpr.h"

namespace primlearn {
namespace {

Expr E(const char* s) { return parse_expr(s); }

std::vector<std::string> names(const std::vector<Symbol>& v) {
  std::vector<std::string> out;
  for (Symbol s : v) out.push_back(s.str());
  return out;
}

TEST(Expr, FreeVarsFirstOccurrence) {
  EXPECT_EQ(names(free_vars(E("(log (+ 1 (* x y)))"))), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(names(free_vars(E("(/ y (+ 1 x))"))), (std::vector<std::string>{"y", "x"}));
  EXPECT_TRUE(free_vars(E("(+ 1 PI)")).empty());
}

TEST(Expr, AlphaNormalize) {
  EXPECT_EQ(print(alpha_normalize(E("(/ y (+ 1 x))"))), "(/ t1 (+ 1 t2))");
  EXPECT_EQ(alpha_normalize(E("(* a (+ a b))")), alpha_normalize(E("(* q (+ q r))")));
}

TEST(Expr, Substitute) {
  Binding b{{Symbol("x"), E("(+ y 1)")}};
  EXPECT_EQ(print(substitute(E("(* x x)"), b)), "(* (+ y 1) (+ y 1))");
}

TEST(Expr, CountOpCountsCallSites) {
  Expr e = E("(+ (log1p x) (log1p (log1p y)))");
  EXPECT_EQ(count_op(e, Symbol("log1p")), 3u);
  EXPECT_EQ(count_apps(e), 4u);
}

TEST(Expr, SubexpressionsPreorderDistinct) {
  auto subs = subexpressions(E("(+ (* x y) (* x y))"));
  ASSERT_EQ(subs.size(), 2u);
  EXPECT_EQ(print(subs[0]), "(+ (* x y) (* x y))");
  EXPECT_EQ(print(subs[1]), "(* x y)");
}

TEST(Expr, NumbersAreExactRationals) {
  Expr a = E("0.1"), b = E("1/10");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.approx(), 0.1);
  EXPECT_EQ(E("(- x)").name().str(), "neg");
  EXPECT_EQ(print(E("(- x)")), "(- x)");
}

// Random trees print and re-parse to the same tree.
Expr random_expr(std::mt19937& rng, int depth) {
  static const char* unary[] = {"log", "exp", "sqrt", "sin", "neg", "fabs", "log1p"};
  static const char* binary[] = {"+", "-", "*", "/", "pow", "atan2", "hypot"};
  if (depth == 0 || rng() % 4 == 0) {
    switch (rng() % 4) {
      case 0: return Expr::var(std::string(1, static_cast<char>('a' + rng() % 3)));
      case 1: return Expr::num(mpq_class(static_cast<long>(rng() % 19) - 9, 1 + rng() % 4));
      case 2: return Expr::constant(ConstName::kPi);
      default: return Expr::var("x");
    }
  }
  if (rng() % 5 == 0)
    return Expr::app("fma", {random_expr(rng, depth - 1), random_expr(rng, depth - 1),
                             random_expr(rng, depth - 1)});
  if (rng() % 2)
    return Expr::app(unary[rng() % 7], {random_expr(rng, depth - 1)});
  return Expr::app(binary[rng() % 7], {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
}

TEST(Expr, PrintParseRoundTrip) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    Expr e = random_expr(rng, 5);
    EXPECT_EQ(parse_expr(print(e)), e) << print(e);
  }
}

TEST(Expr, OrderIsTotalAndConsistent) {
  std::mt19937 rng(11);
  std::vector<Expr> v;
  for (int i = 0; i < 200; ++i) v.push_back(random_expr(rng, 3));
  for (const Expr& a : v)
    for (const Expr& b : v) {
      EXPECT_EQ(compare(a, b) == 0, a == b);
      EXPECT_EQ(compare(a, b), -compare(b, a));
    }
}

TEST(Fpcore, ParsesKernelWithPrecondition) {
  auto ks = parse_fpcore(
      "(FPCore tmerc (ml0 b) :name \"t\" :pre (and (<= 1 ml0 10) (<= -0.5 b 0.5))"
      " (* ml0 (log (/ (+ 1 b) (- 1 b)))))");
  ASSERT_EQ(ks.size(), 1u);
  EXPECT_EQ(ks[0].name, "tmerc");
  ASSERT_EQ(ks[0].ranges.size(), 2u);
  EXPECT_EQ(ks[0].ranges[0].lo, 1);
  EXPECT_EQ(ks[0].ranges[1].hi, 0.5);
  double inside[] = {2, 0.25}, outside[] = {2, 0.75};
  EXPECT_TRUE(satisfies_precondition(ks[0], inside));
  EXPECT_FALSE(satisfies_precondition(ks[0], outside));
}

TEST(Fpcore, NameFallsBackToProperty) {
  auto ks = parse_fpcore("(FPCore (x) :name \"from-prop\" (+ x 1))");
  EXPECT_EQ(ks[0].name, "from-prop");
}

TEST(Fpcore, FabsPrecondition) {
  auto ks = parse_fpcore("(FPCore (x) :pre (<= (fabs x) 1e-6) x)");
  EXPECT_EQ(ks[0].ranges[0].lo, -1e-6);
  EXPECT_EQ(ks[0].ranges[0].hi, 1e-6);
}

TEST(Fpcore, Errors) {
  EXPECT_THROW(parse_fpcore("(FPCore (x) (frobnicate x))"), ParseError);
  EXPECT_THROW(parse_fpcore("(FPCore (x x) (+ x 1))"), ParseError);
  EXPECT_THROW(parse_fpcore("(FPCore (x) (+ x 1)"), ParseError);
  EXPECT_THROW(parse_fpcore("(FPCore (x) (+ x y))"), ParseError);
  try {
    parse_fpcore("(FPCore (x)\n  (+ x (sin)))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
  }
}

TEST(Fpcore, PrintRoundTrip) {
  auto ks = parse_fpcore("(FPCore k (x y) :pre (<= 0 x 1) (hypot x (sin y)))");
  auto again = parse_fpcore(print_fpcore(ks[0]));
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].body, ks[0].body);
  EXPECT_EQ(again[0].ranges[0].hi, 1);
}

TEST(Platform, DefaultCostsAndTreeCost) {
  Platform p = default_platform();
  double add = p.find("+")->cost;
  double log = p.find("log")->cost;
  EXPECT_DOUBLE_EQ(expr_cost(p, E("(log (+ x 1))")), log + add + 2 * kLeafCost);
  EXPECT_THROW(expr_cost(p, Expr::app("nosuch", {E("x")})), PlatformError);
}

TEST(Platform, CandidateCostIsFifthFlooredAtOne) {
  Platform p = default_platform();
  Expr big = E("(log (/ (+ 1 t1) (- 1 t1)))");
  Expr small = E("(+ t1 t2)");
  EXPECT_DOUBLE_EQ(candidate_cost(p, big), std::max(1.0, expr_cost(p, big) / 5));
  EXPECT_DOUBLE_EQ(candidate_cost(p, small), 1.0);
  Platform q = extend_with_candidate(p, Symbol("log1pmd"), big);
  const OpSpec* op = q.find("log1pmd");
  ASSERT_NE(op, nullptr);
  EXPECT_TRUE(op->assumed_exact);
  EXPECT_EQ(op->arity, 1);
  EXPECT_THROW(extend_with_candidate(q, Symbol("log1pmd"), big), PlatformError);
  EXPECT_THROW(extend_with_candidate(q, Symbol("+"), big), PlatformError);
}

TEST(Platform, TextRoundTrip) {
  Platform p = default_platform();
  p.set_cost(Symbol("exp"), 33);
  p = extend_with_candidate(p, Symbol("c7"), E("(- (exp t1) 1)"));
  Platform q = read_platform(write_platform(p));
  EXPECT_EQ(write_platform(q), write_platform(p));
  EXPECT_EQ(q.find("exp")->cost, 33);
  EXPECT_EQ(q.find("c7")->formula, p.find("c7")->formula);
  EXPECT_THROW(read_platform("(builtin + 2 -1)"), std::runtime_error);
}

TEST(Platform, KernelsMayCallDefinedOps) {
  Platform p = extend_with_candidate(default_platform(), Symbol("lpmd"),
                                     E("(log (/ (+ 1 t1) (- 1 t1)))"));
  auto ks = parse_fpcore("(FPCore (x) (* 2 (lpmd x)))", &p);
  EXPECT_EQ(count_op(ks[0].body, Symbol("lpmd")), 1u);
  EXPECT_THROW(parse_fpcore("(FPCore (x) (lpmd x x))", &p), ParseError);
}

}  // namespace
}  // namespace primlearn

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "primlearn/dedup.h"
#include "primlearn/fpcore.h"
#include "primlearn/generation.h"
#include "primlearn/rules.h"

namespace primlearn {
namespace {

Expr E(const char* s) { return parse_expr(s); }

std::set<std::string> printed(const std::vector<Expr>& v) {
  std::set<std::string> out;
  for (const Expr& e : v) out.insert(print(e));
  return out;
}

// Oracle: walk every subset of cuttable positions directly.
void positions(const Expr& e, bool below_root, std::vector<const Expr*>& out) {
  if (!e.is_app()) return;
  if (below_root && e.arity() >= 2) out.push_back(&e);
  for (const Expr& a : e.args()) positions(a, true, out);
}

Expr cut_subset(const Expr& e, const std::set<const Expr*>& cut, int& fresh) {
  if (cut.count(&e)) return Expr::var("~" + std::to_string(fresh++));
  if (!e.is_app()) return e;
  std::vector<Expr> args;
  for (const Expr& a : e.args()) args.push_back(cut_subset(a, cut, fresh));
  return Expr::app(e.name(), std::move(args));
}

std::set<std::string> brute_cuts(const Expr& e) {
  std::vector<const Expr*> pos;
  positions(e, false, pos);
  std::set<std::string> out;
  for (size_t mask = 0; mask < (size_t{1} << pos.size()); ++mask) {
    std::set<const Expr*> cut;
    for (size_t i = 0; i < pos.size(); ++i)
      if (mask >> i & 1) cut.insert(pos[i]);
    int fresh = 0;
    out.insert(print(alpha_normalize(cut_subset(e, cut, fresh))));
  }
  return out;
}

Expr random_expr(std::mt19937& rng, int depth) {
  static const char* ops1[] = {"log", "exp", "sqrt", "neg"};
  static const char* ops2[] = {"+", "-", "*", "/"};
  if (depth == 0 || rng() % 4 == 0) {
    if (rng() % 3 == 0) return Expr::num(static_cast<long>(rng() % 3));
    return Expr::var(std::string(1, static_cast<char>('x' + rng() % 3)));
  }
  if (rng() % 3 == 0) return Expr::app(ops1[rng() % 4], {random_expr(rng, depth - 1)});
  return Expr::app(ops2[rng() % 4], {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
}

TEST(Cut, WorkedExample) {
  EXPECT_EQ(printed(cut_expr(E("(log (+ 1 (* x y)))"))),
            (std::set<std::string>{"(log t1)", "(log (+ 1 t1))", "(log (+ 1 (* t1 t2)))"}));
  EXPECT_TRUE(cut_expr(E("x")).empty());
}

TEST(Cut, RepeatedVariablesStayShared) {
  auto cuts = printed(cut_expr(E("(/ (+ 1 x) (- 1 x))")));
  EXPECT_TRUE(cuts.count("(/ (+ 1 t1) (- 1 t1))"));
  EXPECT_TRUE(cuts.count("(/ t1 t2)"));
  EXPECT_TRUE(cuts.count("(/ t1 (- 1 t2))"));
}

TEST(Cut, MatchesSubsetEnumeration) {
  std::mt19937 rng(23);
  for (int i = 0; i < 300; ++i) {
    Expr e = random_expr(rng, 4);
    if (!e.is_app()) continue;
    bool capped = false;
    auto got = printed(cut_expr(e, 1u << 20, &capped));
    EXPECT_FALSE(capped);
    EXPECT_EQ(got, brute_cuts(e)) << print(e);
  }
}

TEST(Cut, CapIsReported) {
  Expr e = E("(+ (+ (+ (* a b) (* c d)) (+ (* a c) (* b d))) (+ (+ (* a d) (* b c)) (+ (* a a) (* b b))))");
  bool capped = false;
  auto cuts = cut_expr(e, 16, &capped);
  EXPECT_TRUE(capped);
  EXPECT_LE(cuts.size(), 16u);
}

TEST(Generation, ExistingPrimitivesExcluded) {
  Platform p = default_platform();
  EXPECT_TRUE(is_existing_primitive(E("(log1p t1)"), p));
  EXPECT_TRUE(is_existing_primitive(E("(+ t1 t2)"), p));
  EXPECT_FALSE(is_existing_primitive(E("(+ t1 t1)"), p));
  EXPECT_FALSE(is_existing_primitive(E("(+ t1 1)"), p));
}

TEST(Generation, OccurrencesCoverSources) {
  auto ks = parse_fpcore(
      "(FPCore a (x) :pre (<= -0.5 x 0.5) (log (/ (+ 1 x) (- 1 x))))"
      "(FPCore b (x y) :pre (and (<= 0 x 1) (<= 0 y 1)) (* y (log (/ (+ 1 x) (- 1 x)))))");
  SearchLimits lim;
  lim.harvest_cap = 200;
  GenerationStats st;
  auto pool = generate(ks, default_platform(), default_rules(), lim, 1, &st);
  ASSERT_FALSE(pool.empty());
  EXPECT_GT(st.harvested_terms, 0u);
  bool shared = false;
  for (const RawCandidate& rc : pool) {
    EXPECT_GE(rc.occurrences, rc.source_kernels.size());
    size_t nv = free_vars(rc.pattern).size();
    EXPECT_GE(nv, 1u);
    EXPECT_LE(nv, kMaxPatternVars);
    EXPECT_EQ(rc.pattern, alpha_normalize(rc.pattern));
    EXPECT_FALSE(is_existing_primitive(rc.pattern, default_platform()));
    if (print(rc.pattern) == "(log (/ (+ 1 t1) (- 1 t1)))") shared = rc.source_kernels.size() == 2;
  }
  EXPECT_TRUE(shared);
  for (size_t i = 1; i < pool.size(); ++i) EXPECT_TRUE(pool[i - 1].pattern < pool[i].pattern);
}

TEST(Generation, PoolRoundTrip) {
  std::vector<RawCandidate> pool = {{E("(log (+ 1 t1))"), 4, {"a", "b"}},
                                    {E("(/ t1 (* t2 t3))"), 1, {"c"}}};
  auto back = read_pool(write_pool(pool));
  ASSERT_EQ(back.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].pattern, pool[i].pattern);
    EXPECT_EQ(back[i].occurrences, pool[i].occurrences);
    EXPECT_EQ(back[i].source_kernels, pool[i].source_kernels);
  }
}

TEST(Dedup, CanonicalForms) {
  auto forms = canonical_forms(E("(/ t1 (+ t2 t3))"));
  EXPECT_EQ(forms.size(), 6u);
  EXPECT_EQ(canonical_forms(E("(+ t1 t2)")).size(), 2u);
  EXPECT_EQ(canonical_forms(E("(* t1 t1)")).size(), 1u);
  EXPECT_THROW(canonical_forms(E("(+ (+ t1 t2) (+ t3 t4))")), std::invalid_argument);
  EXPECT_EQ(forms[0], E("(/ t1 (+ t2 t3))"));
}

TEST(Dedup, FrequencyConserved) {
  std::vector<RawCandidate> raw = {
      {E("(/ t1 (+ 1 t2))"), 3, {"k1"}}, {E("(/ t2 (+ 1 t1))"), 4, {"k2"}},
      {E("(log (+ 1 t1))"), 2, {"k1"}},  {E("(log (+ t1 1))"), 5, {"k3"}},
      {E("(sqrt (* t1 t1))"), 1, {"k1"}}, {E("(exp (- t1 t2))"), 6, {"k2"}}};
  for (auto& r : raw) r.pattern = alpha_normalize(r.pattern);
  DedupStats st;
  auto pool = dedup_pool(raw, default_rules(), dedup_limits(), default_platform(), 1, &st);
  size_t in = 0, out = 0, members = 0;
  for (const auto& r : raw) in += r.occurrences;
  for (const auto& c : pool) {
    out += c.frequency;
    members += c.members.size();
    EXPECT_TRUE(std::is_sorted(c.members.begin(), c.members.end()));
    EXPECT_GT(c.size, 0);
  }
  EXPECT_EQ(in, out);
  // The first two are the same pattern once alpha-normalized.
  EXPECT_EQ(members, raw.size() - 1);
  EXPECT_EQ(pool.size(), 4u);
  EXPECT_EQ(st.classes, pool.size());
}

TEST(Dedup, KeepsDistinctFunctionsApart) {
  std::vector<RawCandidate> raw = {{E("(- (exp t1) 1)"), 2, {"a"}},
                                   {E("(+ (exp t1) 1)"), 2, {"a"}},
                                   {E("(log (+ 1 t1))"), 2, {"a"}}};
  EXPECT_EQ(dedup_pool(raw, default_rules(), dedup_limits()).size(), 3u);
}

}  // namespace
}  // namespace primlearn

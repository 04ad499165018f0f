#include <gtest/gtest.h>

#include <json.hpp>

#include <random>
#include <set>

#include "primlearn/fpcore.h"
#include "primlearn/report.h"
#include "primlearn/selection.h"

namespace primlearn {
namespace {

Expr E(const char* s) { return parse_expr(s); }

Candidate cand(const char* pattern, size_t freq, double size, std::optional<double> urg = {}) {
  Candidate c;
  c.pattern = E(pattern);
  c.frequency = freq;
  c.size = size;
  c.urgency = urg;
  if (urg) c.score = static_cast<double>(freq) * *urg / size;
  c.members = {c.pattern};
  return c;
}

TEST(Selection, OpNames) {
  EXPECT_EQ(candidate_op_name(7), "c7");
  EXPECT_EQ(candidate_op_name(7, "cc"), "cc7");
  Platform p = default_platform();
  EXPECT_EQ(free_op_prefix(p), "c");
  p = extend_with_candidate(p, Symbol("c3"), E("(+ t1 1)"));
  EXPECT_EQ(free_op_prefix(p), "cc");
}

TEST(Selection, Stage1Order) {
  std::vector<Candidate> pool = {cand("(+ t1 1)", 10, 5),     // 2
                                 cand("(+ t1 2)", 30, 10),    // 3
                                 cand("(+ t1 3)", 8, 4),      // 2, lower frequency
                                 cand("(+ t1 4)", 3, 1),      // 3, lower frequency
                                 cand("(+ t1 5)", 1, 10)};    // 0.1
  std::vector<size_t> all = {0, 1, 2, 3, 4};
  EXPECT_EQ(stage1_rank(pool, all, 10), (std::vector<size_t>{1, 3, 0, 2, 4}));
  EXPECT_EQ(stage1_rank(pool, all, 2), (std::vector<size_t>{1, 3}));
  EXPECT_EQ(stage1_rank(pool, {4, 0}, 5), (std::vector<size_t>{0, 4}));
}

TEST(Selection, FullScore) {
  Candidate c = cand("(log t1)", 12, 8, 0.5);
  EXPECT_DOUBLE_EQ(full_score(c), 12 * 0.5 / 8);
  c.urgency.reset();
  EXPECT_EQ(full_score(c), 0);
}

// Oracle: components by mutual reachability from a Floyd-Warshall closure.
TEST(Selection, SccMatchesReachability) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    size_t n = 1 + rng() % 9;
    std::vector<std::pair<size_t, size_t>> edges;
    size_t m = rng() % (2 * n + 1);
    for (size_t i = 0; i < m; ++i) edges.push_back({rng() % n, rng() % n});
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) r[i][i] = true;
    for (auto [a, b] : edges) r[a][b] = true;
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
          if (r[i][k] && r[k][j]) r[i][j] = true;
    std::set<std::vector<size_t>> want, want_sources;
    for (size_t i = 0; i < n; ++i) {
      std::vector<size_t> comp;
      for (size_t j = 0; j < n; ++j)
        if (r[i][j] && r[j][i]) comp.push_back(j);
      want.insert(comp);
      bool source = true;
      for (size_t j = 0; j < n; ++j)
        if (r[j][i] && !r[i][j]) source = false;
      if (source) want_sources.insert(comp);
    }
    auto comps = strongly_connected_components(n, edges);
    std::set<std::vector<size_t>> got(comps.begin(), comps.end());
    EXPECT_EQ(got, want);
    EXPECT_EQ(comps.size(), want.size());
    auto src = source_components(n, edges);
    EXPECT_EQ(std::set<std::vector<size_t>>(src.begin(), src.end()), want_sources);
  }
}

TEST(Selection, ChooseFromGraph) {
  std::vector<Candidate> pool = {cand("(+ t1 1)", 10, 1, 0.5),   // 5
                                 cand("(+ t1 2)", 10, 1, 0.8),   // 8
                                 cand("(+ t1 3)", 10, 1, 0.3),   // 3
                                 cand("(+ t1 4)", 10, 1, 0.9),   // 9
                                 cand("(+ t1 5)", 10, 1, 0.1)};  // 1
  // 0 <-> 1 form a source component; 1 implies 2; 3 is isolated; 4 is implied by 3.
  ImplicationGraph g;
  g.nodes = {0, 1, 2, 3, 4};
  g.edges = {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {3, 4, 1}};
  EXPECT_EQ(choose_from_graph(g, pool), (std::vector<size_t>{3, 1}));
  g.edges.clear();
  EXPECT_EQ(choose_from_graph(g, pool), (std::vector<size_t>{3, 1, 0, 2, 4}));
}

TEST(Selection, CostAtAccuracy) {
  std::vector<ParetoPoint> f = {{E("x"), 1, 0.4}, {E("y"), 3, 0.9}, {E("z"), 7, 0.99}};
  EXPECT_EQ(cost_at_accuracy(f, 0.5), 3);
  EXPECT_EQ(cost_at_accuracy(f, 0.9), 3);
  EXPECT_EQ(cost_at_accuracy(f, 0.95), 7);
  EXPECT_EQ(cost_at_accuracy(f, 0.4), 1);
  EXPECT_FALSE(cost_at_accuracy(f, 0.995));
}

TEST(Selection, PlatformWith) {
  std::vector<Candidate> pool = {cand("(log (+ 1 t1))", 1, 1), cand("(- (exp t1) 1)", 1, 1)};
  Platform p = platform_with(default_platform(), pool, {1});
  EXPECT_EQ(p.find("c0"), nullptr);
  ASSERT_NE(p.find("c1"), nullptr);
  EXPECT_EQ(p.find("c1")->formula, pool[1].pattern);
  Kernel k = candidate_kernel(pool[0], 0);
  EXPECT_EQ(k.name, "c0");
  EXPECT_EQ(k.body, pool[0].pattern);
}

TEST(Report, Budget) {
  EXPECT_EQ(optimize_budget(10, 2, 625, 25), 10 + 2 * (625 + 625) + 20u);
  EXPECT_EQ(optimize_budget(3, 0, 6, 3), 9u);
}

TEST(Report, CheckReportRejectsBrokenDocuments) {
  EXPECT_FALSE(check_report("not json").empty());
  EXPECT_FALSE(check_report("{}").empty());
  EXPECT_FALSE(check_report("[]").empty());
}

// A tiny end-to-end run whose report must validate and be reproducible.
class SmallRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    kernels_ = new std::vector<Kernel>(parse_fpcore(
        "(FPCore a (x) :pre (<= -0.5 x 0.5) (log (/ (+ 1 x) (- 1 x))))"
        "(FPCore b (x) :pre (<= 0.1 x 0.5) (* x (log (/ (+ 1 x) (- 1 x)))))"));
  }
  static void TearDownTestSuite() { delete kernels_; }

  std::string run(std::string* markdown = nullptr) {
    std::vector<Candidate> pool = {cand("(log (/ (+ 1 t1) (- 1 t1)))", 6, 10),
                                   cand("(/ (+ 1 t1) (- 1 t1))", 4, 4),
                                   cand("(- 1 t1)", 3, 2)};
    for (auto& c : pool) {
      c.urgency.reset();
      c.score.reset();
      c.source_kernels = {"a", "b"};
    }
    clear_optimize_cache();
    reset_optimize_call_count();
    EvalContext ctx;
    ctx.samples = 64;
    ctx.final_samples = 128;
    SelectionConfig cfg;
    cfg.t1 = 3;
    cfg.t2 = 2;
    cfg.target_size = 1;
    std::vector<std::string> stages;
    SelectionState st = run_selection(pool, *kernels_, default_platform(), cfg, ctx,
                                      [&](const std::string& s, double) { stages.push_back(s); });
    EXPECT_EQ(stages.front(), "initial-superoptimization");
    EXPECT_EQ(stages.size(), st.rounds.size() + 1);
    FinalReport fin = final_pass(*kernels_, st, default_platform(), cfg, ctx);
    RunSettings settings;
    settings.samples = ctx.samples;
    settings.final_samples = ctx.final_samples;
    settings.selection = cfg;
    settings.rules = ctx.rules.size();
    ReportInputs in{settings, *kernels_, 3, st, fin, optimize_call_count()};
    if (markdown) *markdown = report_markdown(in);
    calls_ = optimize_call_count();
    rounds_ = st.rounds.size();
    return report_json(in);
  }

  static std::vector<Kernel>* kernels_;
  size_t calls_ = 0;
  size_t rounds_ = 0;
};
std::vector<Kernel>* SmallRun::kernels_ = nullptr;

TEST_F(SmallRun, ReportValidatesAndRepeats) {
  std::string md;
  std::string a = run(&md);
  EXPECT_EQ(check_report(a), std::vector<std::string>{});
  EXPECT_NE(md.find("log"), std::string::npos);
  auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j["pool"]["raw"], 3);
  EXPECT_EQ(j["budget"]["optimize_calls"], calls_);
  EXPECT_LE(calls_, optimize_budget(2, rounds_, 3, 2));
  EXPECT_TRUE(j["budget"]["within"].get<bool>());
  ASSERT_FALSE(j["rounds"].empty());
  auto chosen = j["rounds"][0]["chosen"];
  EXPECT_GE(chosen.size(), 1u);
  EXPECT_EQ(a, run());
}

}  // namespace
}  // namespace primlearn

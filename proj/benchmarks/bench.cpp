#include <benchmark/benchmark.h>

#include "primlearn/dedup.h"
#include "primlearn/fpcore.h"
#include "primlearn/generation.h"
#include "primlearn/numerics.h"
#include "primlearn/superopt.h"

using namespace primlearn;

namespace {

const Kernel& tmerc() {
  static const auto ks = parse_fpcore(
      "(FPCore (b ml0) :pre (and (<= -0.99 b 0.99) (<= 1 ml0 10))"
      " (* ml0 (log (/ (+ 1 b) (- 1 b)))))");
  return ks[0];
}

void BM_Reference(benchmark::State& st) {
  ReferenceEvaluator ev(tmerc().body, tmerc().args);
  double pt[] = {0.3, 2.5};
  for (auto _ : st) benchmark::DoNotOptimize(ev.eval(pt));
}
BENCHMARK(BM_Reference);

void BM_Sample(benchmark::State& st) {
  uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_points(tmerc(), 256, ++seed));
}
BENCHMARK(BM_Sample)->Unit(benchmark::kMillisecond);

void BM_Saturate(benchmark::State& st) {
  SearchLimits lim;
  lim.max_nodes = static_cast<size_t>(st.range(0));
  RuleSet rs = default_rules();
  for (auto _ : st) benchmark::DoNotOptimize(saturate(tmerc().body, rs, lim, default_platform(), &tmerc()));
}
BENCHMARK(BM_Saturate)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Cut(benchmark::State& st) {
  Expr e = parse_expr("(* (log (/ (+ 1 (sin x)) (- 1 (sin x)))) (+ y (* z z)))");
  for (auto _ : st) benchmark::DoNotOptimize(cut_expr(e));
}
BENCHMARK(BM_Cut);

void BM_Optimize(benchmark::State& st) {
  RuleSet rs = default_rules();
  for (auto _ : st) {
    clear_optimize_cache();
    benchmark::DoNotOptimize(optimize(tmerc(), default_platform(), rs, SearchLimits{}, 256, 1));
  }
}
BENCHMARK(BM_Optimize)->Unit(benchmark::kMillisecond);

void BM_Dedup(benchmark::State& st) {
  std::vector<RawCandidate> raw;
  for (const char* s : {"(/ t1 (+ 1 t2))", "(/ t2 (+ 1 t1))", "(log (+ 1 t1))", "(log (+ t1 1))",
                        "(- (exp t1) 1)", "(* (+ 1 t1) t2)", "(* t1 (+ 1 t2))", "(sqrt (* t1 t1))"})
    raw.push_back({alpha_normalize(parse_expr(s)), 1, {"k"}});
  RuleSet rs = default_rules();
  for (auto _ : st) benchmark::DoNotOptimize(dedup_pool(raw, rs, dedup_limits()));
}
BENCHMARK(BM_Dedup)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

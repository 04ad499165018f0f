#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "primlearn/dedup.h"
#include "primlearn/fpcore.h"
#include "primlearn/numerics.h"
#include "primlearn/platform.h"
#include "primlearn/rules.h"
#include "primlearn/superopt.h"

namespace primlearn {

struct SelectionConfig {
  size_t t1 = 625;
  size_t t2 = 25;
  double implication_threshold = 0.95;
  size_t target_size = 10;
  size_t min_uses = 1;
  double expected_alpha = 0.25;  // informational
};

// Everything an optimize() call needs besides the kernel and platform.
struct EvalContext {
  RuleSet rules = default_rules();
  SearchLimits limits;
  size_t samples = kDefaultSamples;
  size_t final_samples = kFinalSamples;
  uint64_t seed = 1;
  size_t jobs = 1;
  std::string op_prefix = "c";  // must not prefix any base op name
};

// Name of the platform op standing for pool entry i.
std::string candidate_op_name(size_t index, std::string_view prefix = "c");

// A prefix such that no op of p is named prefix followed by digits.
std::string free_op_prefix(const Platform& p);

// base extended, in order, with the given pool entries.
Platform platform_with(const Platform& base, const std::vector<Candidate>& pool,
                       const std::vector<size_t>& chosen, std::string_view prefix = "c");

// Candidate pattern as a kernel with unbounded arguments.
Kernel candidate_kernel(const Candidate& c, size_t index, std::string_view prefix = "c");

// Pool indices ordered by frequency/size, then frequency, then pattern text;
// at most t1 of them.
std::vector<size_t> stage1_rank(const std::vector<Candidate>& pool,
                                const std::vector<size_t>& indices, size_t t1);

// 1 - best accuracy of optimizing the candidate against base + S. Sets
// *failed (and returns 0) when its sampling fails.
double urgency(const std::vector<Candidate>& pool, size_t index,
               const std::vector<size_t>& selected, const Platform& base,
               const EvalContext& ctx, bool* failed = nullptr);

double full_score(const Candidate& c);

struct ImplicationEdge {
  size_t from = 0;  // pool index of f in f < g
  size_t to = 0;
  double accuracy = 0;
};

struct ImplicationGraph {
  std::vector<size_t> nodes;  // pool indices
  std::vector<ImplicationEdge> edges;
};

// f < g when optimizing g against base + S + {f} yields a frontier point that
// calls f with accuracy at least the threshold.
ImplicationGraph build_implication_graph(const std::vector<Candidate>& pool,
                                         const std::vector<size_t>& batch,
                                         const std::vector<size_t>& selected,
                                         const Platform& base, const SelectionConfig& cfg,
                                         const EvalContext& ctx);

// Tarjan's algorithm over nodes 0..n-1. Components come out in reverse
// topological order; members are sorted.
std::vector<std::vector<size_t>> strongly_connected_components(
    size_t n, const std::vector<std::pair<size_t, size_t>>& edges);

// Components of the condensation with no incoming edge.
std::vector<std::vector<size_t>> source_components(
    size_t n, const std::vector<std::pair<size_t, size_t>>& edges);

// One candidate per source component: highest full score, then frequency,
// then pattern text. Sorted by the same order.
std::vector<size_t> choose_from_graph(const ImplicationGraph& g,
                                      const std::vector<Candidate>& pool);

struct RoundRecord {
  std::vector<size_t> stage1;
  std::vector<std::pair<size_t, double>> urgencies;
  std::vector<size_t> batch;
  ImplicationGraph graph;
  std::vector<size_t> chosen;
  double workload_acc = 0;
};

struct SelectionState {
  std::string op_prefix = "c";
  std::vector<Candidate> pool;  // urgency and score filled for evaluated entries
  std::vector<size_t> selected;
  std::vector<RoundRecord> rounds;
  std::vector<double> workload_acc_history;  // entry 0 is the base platform
};

// Receives (stage name, wall seconds): "initial-superoptimization" for the
// base workload accuracy, then "selection-stage-N" for round N.
using StageTimer = std::function<void(const std::string&, double)>;

SelectionState run_selection(std::vector<Candidate> pool, const std::vector<Kernel>& kernels,
                             const Platform& base, const SelectionConfig& cfg,
                             const EvalContext& ctx, const StageTimer& timer = {});

struct KernelOutcome {
  std::string name;
  std::vector<ParetoPoint> base_frontier;
  std::vector<ParetoPoint> extended_frontier;
};

struct ProposedPrimitive {
  size_t index = 0;  // pool index
  std::string op;
  Expr formula;
  double cost = 0;  // extended-platform cost
  size_t uses = 0;
};

struct FinalReport {
  std::vector<ProposedPrimitive> proposed;  // uses >= min_uses
  std::vector<ProposedPrimitive> dropped;
  std::vector<KernelOutcome> kernels;
  std::vector<double> thresholds;  // 0.50 .. 0.99
  double base_acc = 0;
  double extended_acc = 0;
  Platform proposed_platform;
};

// Minimum cost among frontier points with accuracy >= threshold.
std::optional<double> cost_at_accuracy(const std::vector<ParetoPoint>& frontier,
                                       double threshold);

FinalReport final_pass(const std::vector<Kernel>& kernels, SelectionState& state,
                       const Platform& base, const SelectionConfig& cfg,
                       const EvalContext& ctx);

}  // namespace primlearn

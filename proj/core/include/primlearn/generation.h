#pragma once

#include <set>
#include <string>
#include <vector>

#include "primlearn/expr.h"
#include "primlearn/fpcore.h"
#include "primlearn/platform.h"
#include "primlearn/rules.h"
#include "primlearn/superopt.h"

namespace primlearn {

inline constexpr size_t kMaxPatternVars = 3;
inline constexpr size_t kMaxCuts = 512;

struct RawCandidate {
  Expr pattern;  // over t1..tk
  size_t occurrences = 0;
  std::set<std::string> source_kernels;
};

// Every pattern obtained by replacing a subset of the binary-or-wider
// operator positions strictly below the root with fresh variables,
// alpha-normalized and deduplicated. Sets *capped when the enumeration hit
// `cap` (larger cut subtrees are enumerated first).
std::vector<Expr> cut_expr(const Expr& e, size_t cap = kMaxCuts, bool* capped = nullptr);

// A single application of a platform op to distinct bare variables.
bool is_existing_primitive(const Expr& pattern, const Platform& p);

struct GenerationStats {
  size_t harvested_terms = 0;
  size_t capped_cut_sets = 0;
};

// Saturates each kernel under its precondition and harvests its terms.
std::vector<std::vector<Expr>> harvest_kernels(const std::vector<Kernel>& ks, const Platform& p,
                                               const RuleSet& rules, const SearchLimits& lim,
                                               size_t jobs = 1);

// Cuts every application position of the harvested terms and counts the
// resulting patterns across kernels. terms[i] belongs to ks[i].
std::vector<RawCandidate> mine_candidates(const std::vector<Kernel>& ks,
                                          const std::vector<std::vector<Expr>>& terms,
                                          const Platform& p, size_t jobs = 1,
                                          GenerationStats* stats = nullptr);

// harvest_kernels followed by mine_candidates.
std::vector<RawCandidate> generate(const std::vector<Kernel>& ks, const Platform& p,
                                   const RuleSet& rules, const SearchLimits& lim,
                                   size_t jobs = 1, GenerationStats* stats = nullptr);

// One JSON object per line: {"pattern", "occurrences", "kernels"}.
std::string write_pool(const std::vector<RawCandidate>& pool);
std::vector<RawCandidate> read_pool(std::string_view text);

}  // namespace primlearn

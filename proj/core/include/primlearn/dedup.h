#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "primlearn/generation.h"
#include "primlearn/platform.h"
#include "primlearn/rules.h"
#include "primlearn/superopt.h"

namespace primlearn {

struct Candidate {
  Expr pattern;  // class representative
  size_t frequency = 0;
  std::set<std::string> source_kernels;
  double size = 0;  // expr_cost of pattern
  std::optional<double> urgency;
  std::optional<double> score;
  std::optional<size_t> uses;
  bool urgency_failed = false;  // sampling failed; urgency forced to 0
  std::vector<Expr> members;    // merged raw patterns, sorted
};

// Alpha-normalized pattern under every permutation of its variables,
// deduplicated, in permutation order. Throws std::invalid_argument for more
// than three variables.
std::vector<Expr> canonical_forms(const Expr& e);

struct DedupStats {
  size_t buckets = 0;
  size_t saturated_buckets = 0;
  size_t classes = 0;
};

// Merges raw candidates equal up to variable permutation and the rules.
// Patterns are bucketed by variable count and their exactly rounded values
// at a few fixed points; each bucket shares one e-graph whose node limit
// grows with the number of forms it holds.
std::vector<Candidate> dedup_pool(const std::vector<RawCandidate>& raw, const RuleSet& rules,
                                  const SearchLimits& lim, const Platform& p = default_platform(),
                                  size_t jobs = 1, DedupStats* stats = nullptr);

}  // namespace primlearn

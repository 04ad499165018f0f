#pragma once

#include <string>
#include <vector>

#include "primlearn/fpcore.h"
#include "primlearn/selection.h"
#include "primlearn/superopt.h"

namespace primlearn {

// Configuration echoed into the report.
struct RunSettings {
  uint64_t seed = 1;
  size_t samples = kDefaultSamples;
  size_t final_samples = kFinalSamples;
  SearchLimits limits;
  SelectionConfig selection;
  std::string platform = "default";
  size_t rules = 0;
};

struct ReportInputs {
  const RunSettings& settings;
  const std::vector<Kernel>& kernels;
  size_t raw_candidates = 0;
  const SelectionState& state;
  const FinalReport& final;
  size_t optimize_calls = 0;
};

// |K| initial + rounds * (t1 + t2^2) + 2|K| final superoptimizations.
size_t optimize_budget(size_t kernels, size_t rounds, size_t t1, size_t t2);

// Deterministic given the inputs; wall times are kept out of it.
std::string report_json(const ReportInputs& in);
std::string report_markdown(const ReportInputs& in);

// Structural problems found in a report.json document; empty when it
// conforms to docs/report.schema.json.
std::vector<std::string> check_report(const std::string& json_text);

struct StageTime {
  std::string stage;
  double seconds = 0;
};

std::string timings_json(const std::vector<StageTime>& stages);

}  // namespace primlearn

// primlearn: learn, optimize against, and inspect numerical primitives.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "primlearn/dedup.h"
#include "primlearn/generation.h"
#include "primlearn/parallel.h"
#include "primlearn/report.h"
#include "primlearn/selection.h"
#include "primlearn/sexpr.h"

namespace fs = std::filesystem;
using namespace primlearn;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kCorpusError = 3, kPipelineError = 4 };

// Error tagged with the phase it came from and the exit code to use.
struct Failure {
  Exit code;
  std::string phase;
  std::string message;
};

std::string read_file(const std::string& path, Exit code, const std::string& phase) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{code, phase, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kPipelineError, "output", "cannot write " + path.string()};
}

struct Options {
  std::string corpus;
  std::string out = "primlearn-out";
  std::string platform;
  std::string rules;
  uint64_t seed = 1;
  size_t t1 = 625;
  size_t t2 = 25;
  double threshold = 0.95;
  size_t target_size = 10;
  size_t min_uses = 1;
  size_t samples = kDefaultSamples;
  size_t final_samples = kFinalSamples;
  size_t max_nodes = SearchLimits{}.max_nodes;
  size_t max_iters = SearchLimits{}.max_iters;
  size_t jobs = default_jobs();
  std::string kernel;
  std::string pattern;
  std::string from;
};

struct Loaded {
  Platform platform;
  RuleSet rules;
  std::vector<Kernel> kernels;
};

Loaded load(const Options& o, bool need_corpus) {
  Loaded l{default_platform(), default_rules(), {}};
  if (!o.platform.empty()) {
    try {
      l.platform = read_platform(read_file(o.platform, kConfigError, "platform"));
    } catch (const std::runtime_error& e) {
      throw Failure{kConfigError, "platform", e.what()};
    }
  }
  if (!o.rules.empty()) {
    try {
      l.rules = parse_rules(read_file(o.rules, kConfigError, "rules"));
    } catch (const std::runtime_error& e) {
      throw Failure{kConfigError, "rules", e.what()};
    }
  }
  if (!need_corpus) return l;
  std::string text = read_file(o.corpus, kCorpusError, "corpus");
  try {
    l.kernels = parse_fpcore(text, &l.platform);
  } catch (const std::runtime_error& e) {
    throw Failure{kCorpusError, "corpus", o.corpus + ": " + e.what()};
  }
  if (l.kernels.empty()) throw Failure{kCorpusError, "corpus", "no kernels"};
  return l;
}

void validate(const Options& o) {
  if (o.t2 > o.t1) throw Failure{kConfigError, "config", "--t2 must not exceed --t1"};
  if (o.t1 == 0 || o.t2 == 0) throw Failure{kConfigError, "config", "--t1 and --t2 must be positive"};
  if (o.samples == 0 || o.final_samples == 0)
    throw Failure{kConfigError, "config", "sample counts must be positive"};
  if (!(o.threshold > 0 && o.threshold <= 1))
    throw Failure{kConfigError, "config", "--threshold must be in (0, 1]"};
  if (o.jobs == 0) throw Failure{kConfigError, "config", "--jobs must be positive"};
}

SearchLimits limits_of(const Options& o) {
  SearchLimits lim;
  lim.max_nodes = o.max_nodes;
  lim.max_iters = o.max_iters;
  return lim;
}

std::string candidates_jsonl(const std::vector<Candidate>& pool, const std::string& prefix) {
  std::string out;
  for (size_t i = 0; i < pool.size(); ++i) {
    const Candidate& c = pool[i];
    nlohmann::json members = nlohmann::json::array();
    for (const Expr& m : c.members) members.push_back(print(m));
    nlohmann::json j = {{"id", candidate_op_name(i, prefix)},
                        {"pattern", print(c.pattern)},
                        {"size", c.size},
                        {"frequency", c.frequency},
                        {"urgency", c.urgency ? nlohmann::json(*c.urgency) : nlohmann::json(nullptr)},
                        {"members", members}};
    out += j.dump() + "\n";
  }
  return out;
}

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

int cmd_learn(const Options& o) {
  validate(o);
  Loaded l = load(o, true);
  fs::path out(o.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Failure{kConfigError, "output", "cannot create " + o.out + ": " + ec.message()};

  EvalContext ctx;
  ctx.rules = l.rules;
  ctx.limits = limits_of(o);
  ctx.samples = o.samples;
  ctx.final_samples = o.final_samples;
  ctx.seed = o.seed;
  ctx.jobs = o.jobs;
  ctx.op_prefix = free_op_prefix(l.platform);
  SelectionConfig cfg;
  cfg.t1 = o.t1;
  cfg.t2 = o.t2;
  cfg.implication_threshold = o.threshold;
  cfg.target_size = o.target_size;
  cfg.min_uses = o.min_uses;

  std::vector<StageTime> stages;
  Stopwatch sw;
  reset_optimize_call_count();
  clear_optimize_cache();
  try {
    std::cerr << "[learn] " << l.kernels.size() << " kernels, " << l.rules.rules.size()
              << " rules, jobs " << o.jobs << "\n";
    auto terms = harvest_kernels(l.kernels, l.platform, ctx.rules, ctx.limits, ctx.jobs);
    double initial = sw.lap();

    GenerationStats gs;
    auto raw = mine_candidates(l.kernels, terms, l.platform, ctx.jobs, &gs);
    write_file(out / "pool.jsonl", write_pool(raw));
    stages.push_back({"candidate-dump", sw.lap()});
    std::cerr << "[generate] " << gs.harvested_terms << " harvested terms, " << raw.size()
              << " raw candidates\n";

    auto pool = dedup_pool(raw, ctx.rules, dedup_limits(), l.platform, ctx.jobs);
    stages.push_back({"deduplication", sw.lap()});
    std::cerr << "[dedup] " << pool.size() << " candidates\n";

    auto timer = [&](const std::string& stage, double seconds) {
      if (stage == "initial-superoptimization") {
        initial += seconds;
        return;
      }
      stages.push_back({stage, seconds});
      std::cerr << "[select] " << stage << " done in " << seconds << " s\n";
    };
    SelectionState st = run_selection(pool, l.kernels, l.platform, cfg, ctx, timer);
    stages.insert(stages.begin(), {"initial-superoptimization", initial});
    sw.lap();

    FinalReport fr = final_pass(l.kernels, st, l.platform, cfg, ctx);
    stages.push_back({"final-superoptimization", sw.lap()});
    std::cerr << "[final] " << fr.proposed.size() << " proposed, " << fr.dropped.size()
              << " dropped; workload accuracy " << fr.base_acc << " -> " << fr.extended_acc << "\n";

    RunSettings rs;
    rs.seed = o.seed;
    rs.samples = o.samples;
    rs.final_samples = o.final_samples;
    rs.limits = ctx.limits;
    rs.selection = cfg;
    rs.platform = o.platform.empty() ? l.platform.name() : fs::path(o.platform).filename().string();
    rs.rules = l.rules.rules.size();
    ReportInputs in{rs, l.kernels, raw.size(), st, fr, optimize_call_count()};
    std::string report = report_json(in);
    auto problems = check_report(report);
    if (!problems.empty()) throw Failure{kPipelineError, "report", "invalid report: " + problems[0]};
    write_file(out / "report.json", report);
    write_file(out / "report.md", report_markdown(in));
    write_file(out / "proposed_platform.txt", write_platform(fr.proposed_platform));
    write_file(out / "candidates.jsonl", candidates_jsonl(st.pool, st.op_prefix));
    write_file(out / "timings.json", timings_json(stages));
  } catch (const Failure&) {
    throw;
  } catch (const std::exception& e) {
    throw Failure{kPipelineError, "pipeline", e.what()};
  }
  std::cerr << "[learn] wrote " << o.out << "\n";
  return kOk;
}

int cmd_optimize(const Options& o) {
  Loaded l = load(o, true);
  auto it = std::find_if(l.kernels.begin(), l.kernels.end(),
                         [&](const Kernel& k) { return k.name == o.kernel; });
  if (it == l.kernels.end()) throw Failure{kConfigError, "optimize", "unknown kernel " + o.kernel};
  std::vector<ParetoPoint> frontier;
  try {
    frontier = optimize(*it, l.platform, l.rules, limits_of(o), o.samples, o.seed);
  } catch (const std::exception& e) {
    throw Failure{kPipelineError, "optimize", e.what()};
  }
  std::cout << "cost\taccuracy\texpr\n";
  for (const ParetoPoint& p : frontier)
    std::cout << format_cost(p.cost) << "\t" << p.accuracy << "\t" << print(p.expr) << "\n";
  return kOk;
}

int cmd_inspect(const Options& o) {
  Expr query;
  try {
    query = parse_expr(o.pattern, nullptr);
  } catch (const std::runtime_error& e) {
    throw Failure{kConfigError, "inspect", e.what()};
  }
  if (free_vars(query).empty()) throw Failure{kConfigError, "inspect", "no variables"};
  std::vector<Expr> forms;
  try {
    forms = canonical_forms(query);
  } catch (const std::invalid_argument& e) {
    throw Failure{kConfigError, "inspect", e.what()};
  }
  std::string text = read_file((fs::path(o.from) / "candidates.jsonl").string(), kConfigError,
                               "inspect");
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    bool hit = false;
    for (const auto& m : j["members"]) {
      for (const Expr& f : canonical_forms(parse_expr(m.get<std::string>(), nullptr)))
        hit = hit || std::find(forms.begin(), forms.end(), f) != forms.end();
    }
    if (!hit) continue;
    std::cout << "id        " << j["id"].get<std::string>() << "\n";
    std::cout << "pattern   " << j["pattern"].get<std::string>() << "\n";
    std::cout << "size      " << format_cost(j["size"].get<double>()) << "\n";
    std::cout << "frequency " << j["frequency"].get<size_t>() << "\n";
    std::cout << "urgency   " << (j["urgency"].is_null() ? "-" : j["urgency"].dump()) << "\n";
    std::cout << "canonical forms:\n";
    for (const Expr& f : forms) std::cout << "  " << print(f) << "\n";
    std::cout << "class members:\n";
    for (const auto& m : j["members"]) std::cout << "  " << m.get<std::string>() << "\n";
    return kOk;
  }
  throw Failure{kConfigError, "inspect", "pattern not in pool: " + print(query)};
}

void search_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--platform", o.platform, "Platform file (default: built-in)");
  cmd->add_option("--rules", o.rules, "Rewrite rule file (default: built-in)");
  cmd->add_option("--seed", o.seed, "Sampling seed");
  cmd->add_option("--samples", o.samples, "Points per error measurement");
  cmd->add_option("--max-nodes", o.max_nodes, "E-graph node limit");
  cmd->add_option("--max-iters", o.max_iters, "Rewrite iteration limit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn numerical primitives from a corpus of FPCore kernels"};
  app.require_subcommand(1);
  Options o;

  auto* learn = app.add_subcommand("learn", "Run generation, dedup, selection and the final pass");
  learn->add_option("--corpus", o.corpus, "FPCore corpus")->required();
  learn->add_option("--out", o.out, "Output directory");
  search_flags(learn, o);
  learn->add_option("--t1", o.t1, "Candidates scored for urgency per round");
  learn->add_option("--t2", o.t2, "Batch size for implication checks");
  learn->add_option("--threshold", o.threshold, "Implication accuracy threshold");
  learn->add_option("--target-size", o.target_size, "Stop once this many are selected");
  learn->add_option("--min-uses", o.min_uses, "Drop selected primitives used fewer times");
  learn->add_option("--final-samples", o.final_samples, "Points per final measurement");
  learn->add_option("--jobs", o.jobs, "Concurrent superoptimizations");

  auto* opt = app.add_subcommand("optimize", "Print one kernel's Pareto frontier");
  opt->add_option("--corpus", o.corpus, "FPCore corpus")->required();
  opt->add_option("--kernel", o.kernel, "Kernel name")->required();
  search_flags(opt, o);

  auto* inspect = app.add_subcommand("inspect", "Show the dedup class of a pattern");
  inspect->add_option("pattern", o.pattern, "Pattern over t1, t2, ...")->required();
  inspect->add_option("--from", o.from, "Output directory of a learn run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  try {
    if (*learn) return cmd_learn(o);
    if (*opt) return cmd_optimize(o);
    return cmd_inspect(o);
  } catch (const Failure& f) {
    std::cerr << "primlearn: " << f.phase << ": " << f.message << "\n";
    return f.code;
  }
}

#include "primlearn/generation.h"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "primlearn/parallel.h"

namespace primlearn {
namespace {

// Fresh cut variables; the '#' keeps them apart from kernel variables until
// alpha-normalization renames everything.
Symbol hole(size_t i) { return Symbol("#" + std::to_string(i)); }

class CutEnumerator {
 public:
  explicit CutEnumerator(size_t cap) : cap_(cap) {}

  // Variants of e where e itself may be cut when `cuttable`.
  std::vector<Expr> variants(const Expr& e, bool cuttable) {
    std::vector<Expr> out;
    if (cuttable && e.is_app() && e.arity() >= 2) out.push_back(Expr::var(hole(0)));
    if (!e.is_app()) {
      out.push_back(e);
      return out;
    }
    std::vector<std::vector<Expr>> combos{{}};
    for (const Expr& a : e.args()) {
      std::vector<Expr> av = variants(a, true);
      std::vector<std::vector<Expr>> next;
      for (const auto& prefix : combos) {
        for (const Expr& v : av) {
          if (next.size() >= cap_) {
            capped = true;
            break;
          }
          next.push_back(prefix);
          next.back().push_back(v);
        }
      }
      combos = std::move(next);
    }
    for (auto& args : combos) {
      if (out.size() >= cap_) {
        capped = true;
        break;
      }
      out.push_back(Expr::app(e.name(), std::move(args)));
    }
    return out;
  }

  bool capped = false;

 private:
  size_t cap_;
};

// Gives every hole occurrence its own variable.
Expr number_holes(const Expr& e, size_t& next) {
  if (e.is_var() && e.name().str().starts_with("#")) return Expr::var(hole(++next));
  if (!e.is_app()) return e;
  std::vector<Expr> args;
  for (const Expr& a : e.args()) args.push_back(number_holes(a, next));
  return Expr::app(e.name(), std::move(args));
}

void app_positions(const Expr& e, std::vector<Expr>& out) {
  if (!e.is_app()) return;
  out.push_back(e);
  for (const Expr& a : e.args()) app_positions(a, out);
}

struct KernelPool {
  std::map<std::string, std::pair<Expr, size_t>> counts;
  size_t harvested = 0;
  size_t capped = 0;
};

KernelPool mine_kernel(const std::vector<Expr>& terms, const Platform& p) {
  KernelPool kp;
  kp.harvested = terms.size();
  std::unordered_map<Expr, std::vector<std::pair<std::string, Expr>>, ExprHash> memo;
  for (const Expr& t : terms) {
    std::vector<Expr> positions;
    app_positions(t, positions);
    for (const Expr& sub : positions) {
      auto it = memo.find(sub);
      if (it == memo.end()) {
        bool capped = false;
        std::vector<std::pair<std::string, Expr>> kept;
        for (const Expr& c : cut_expr(sub, kMaxCuts, &capped)) {
          size_t nv = free_vars(c).size();
          if (nv == 0 || nv > kMaxPatternVars || is_existing_primitive(c, p)) continue;
          kept.emplace_back(print(c), c);
        }
        kp.capped += capped;
        it = memo.emplace(sub, std::move(kept)).first;
      }
      for (const auto& [text, c] : it->second) {
        auto& slot = kp.counts[text];
        if (!slot.first) slot.first = c;
        ++slot.second;
      }
    }
  }
  return kp;
}

}  // namespace

std::vector<Expr> cut_expr(const Expr& e, size_t cap, bool* capped) {
  if (!e.is_app()) return {};
  CutEnumerator en(cap);
  std::vector<Expr> raw = en.variants(e, false);
  if (capped) *capped = en.capped;
  std::vector<Expr> out;
  std::unordered_set<Expr, ExprHash> seen;
  for (const Expr& r : raw) {
    size_t next = 0;
    Expr n = alpha_normalize(number_holes(r, next));
    if (seen.insert(n).second) out.push_back(n);
  }
  return out;
}

bool is_existing_primitive(const Expr& pattern, const Platform& p) {
  if (!pattern.is_app() || !p.find(pattern.name())) return false;
  std::set<Symbol> seen;
  for (const Expr& a : pattern.args())
    if (!a.is_var() || !seen.insert(a.name()).second) return false;
  return true;
}

std::vector<std::vector<Expr>> harvest_kernels(const std::vector<Kernel>& ks, const Platform& p,
                                               const RuleSet& rules, const SearchLimits& lim,
                                               size_t jobs) {
  std::vector<std::vector<Expr>> out(ks.size());
  parallel_for(ks.size(), jobs, [&](size_t i) {
    Saturation sat = saturate(ks[i].body, rules, lim, p, &ks[i]);
    out[i] = harvest_intermediates(sat, lim);
  });
  return out;
}

std::vector<RawCandidate> mine_candidates(const std::vector<Kernel>& ks,
                                          const std::vector<std::vector<Expr>>& terms,
                                          const Platform& p, size_t jobs,
                                          GenerationStats* stats) {
  std::vector<KernelPool> pools(ks.size());
  parallel_for(ks.size(), jobs, [&](size_t i) { pools[i] = mine_kernel(terms[i], p); });
  std::map<std::string, RawCandidate> merged;
  GenerationStats st;
  for (size_t i = 0; i < ks.size(); ++i) {
    st.harvested_terms += pools[i].harvested;
    st.capped_cut_sets += pools[i].capped;
    for (const auto& [text, entry] : pools[i].counts) {
      RawCandidate& rc = merged[text];
      if (!rc.pattern) rc.pattern = entry.first;
      rc.occurrences += entry.second;
      rc.source_kernels.insert(ks[i].name);
    }
  }
  if (stats) *stats = st;
  std::vector<RawCandidate> out;
  for (auto& [text, rc] : merged) out.push_back(std::move(rc));
  std::sort(out.begin(), out.end(),
            [](const RawCandidate& a, const RawCandidate& b) { return a.pattern < b.pattern; });
  return out;
}

std::string write_pool(const std::vector<RawCandidate>& pool) {
  std::string out;
  for (const RawCandidate& rc : pool) {
    nlohmann::json j;
    j["pattern"] = print(rc.pattern);
    j["occurrences"] = rc.occurrences;
    j["kernels"] = rc.source_kernels;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<RawCandidate> read_pool(std::string_view text) {
  std::vector<RawCandidate> pool;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    RawCandidate rc;
    rc.pattern = parse_expr(j.at("pattern").get<std::string>());
    rc.occurrences = j.at("occurrences").get<size_t>();
    for (const auto& k : j.at("kernels")) rc.source_kernels.insert(k.get<std::string>());
    pool.push_back(std::move(rc));
  }
  return pool;
}

std::vector<RawCandidate> generate(const std::vector<Kernel>& ks, const Platform& p,
                                   const RuleSet& rules, const SearchLimits& lim, size_t jobs,
                                   GenerationStats* stats) {
  return mine_candidates(ks, harvest_kernels(ks, p, rules, lim, jobs), p, jobs, stats);
}

}  // namespace primlearn

#include "primlearn/report.h"

#include <json.hpp>

#include <iomanip>
#include <set>
#include <sstream>

namespace primlearn {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "primlearn-report/1";

json frontier_json(const std::vector<ParetoPoint>& f) {
  json out = json::array();
  for (const ParetoPoint& p : f)
    out.push_back({{"expr", print(p.expr)}, {"cost", p.cost}, {"accuracy", p.accuracy}});
  return out;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json strings(const std::set<std::string>& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

json candidate_json(const Candidate& c, const std::string& id, const std::string& status) {
  json members = json::array();
  for (const Expr& m : c.members) members.push_back(print(m));
  return {{"id", id},
          {"formula", print(c.pattern)},
          {"size", c.size},
          {"frequency", c.frequency},
          {"urgency", opt(c.urgency)},
          {"urgency_failed", c.urgency_failed},
          {"score", opt(c.score)},
          {"uses", c.uses ? json(*c.uses) : json(nullptr)},
          {"status", status},
          {"source_kernels", strings(c.source_kernels)},
          {"members", members}};
}

json primitive_json(const ProposedPrimitive& p) {
  return {{"id", p.op}, {"formula", print(p.formula)}, {"cost", p.cost}, {"uses", p.uses}};
}

json build(const ReportInputs& in) {
  const RunSettings& s = in.settings;
  const SelectionState& st = in.state;
  const FinalReport& fr = in.final;

  auto name = [&](size_t i) { return candidate_op_name(i, st.op_prefix); };
  std::set<size_t> proposed, dropped, selected(st.selected.begin(), st.selected.end());
  for (const ProposedPrimitive& p : fr.proposed) proposed.insert(p.index);
  for (const ProposedPrimitive& p : fr.dropped) dropped.insert(p.index);

  json candidates = json::array();
  for (size_t i = 0; i < st.pool.size(); ++i) {
    const Candidate& c = st.pool[i];
    if (!c.urgency && !selected.count(i)) continue;
    std::string status = proposed.count(i) ? "proposed" : dropped.count(i) ? "dropped" : "evaluated";
    candidates.push_back(candidate_json(c, name(i), status));
  }

  json rounds = json::array();
  for (const RoundRecord& r : st.rounds) {
    json edges = json::array();
    for (const ImplicationEdge& e : r.graph.edges)
      edges.push_back({{"from", name(e.from)},
                       {"to", name(e.to)},
                       {"accuracy", e.accuracy}});
    json batch = json::array(), chosen = json::array();
    for (size_t b : r.batch) batch.push_back(name(b));
    for (size_t c : r.chosen) chosen.push_back(name(c));
    rounds.push_back({{"stage1_size", r.stage1.size()},
                      {"batch", batch},
                      {"edges", edges},
                      {"chosen", chosen},
                      {"workload_accuracy", r.workload_acc}});
  }

  json kernels = json::array();
  json table_rows = json::array();
  for (const KernelOutcome& k : fr.kernels) {
    kernels.push_back({{"name", k.name},
                       {"base_frontier", frontier_json(k.base_frontier)},
                       {"extended_frontier", frontier_json(k.extended_frontier)},
                       {"base_best_accuracy", best_accuracy(k.base_frontier)},
                       {"extended_best_accuracy", best_accuracy(k.extended_frontier)}});
    json base = json::array(), ext = json::array();
    for (double t : fr.thresholds) {
      base.push_back(opt(cost_at_accuracy(k.base_frontier, t)));
      ext.push_back(opt(cost_at_accuracy(k.extended_frontier, t)));
    }
    table_rows.push_back({{"kernel", k.name}, {"base", base}, {"extended", ext}});
  }

  json prop = json::array(), drop = json::array();
  for (const ProposedPrimitive& p : fr.proposed) prop.push_back(primitive_json(p));
  for (const ProposedPrimitive& p : fr.dropped) drop.push_back(primitive_json(p));
  json sel = json::array();
  for (size_t i : st.selected) sel.push_back(name(i));

  size_t bound = optimize_budget(in.kernels.size(), st.rounds.size(), s.selection.t1,
                                 s.selection.t2);
  const SelectionConfig& sc = s.selection;
  return {
      {"format", kFormat},
      {"config",
       {{"seed", s.seed},
        {"samples", s.samples},
        {"final_samples", s.final_samples},
        {"max_nodes", s.limits.max_nodes},
        {"max_iters", s.limits.max_iters},
        {"max_extracted", s.limits.max_extracted},
        {"harvest_cap", s.limits.harvest_cap},
        {"t1", sc.t1},
        {"t2", sc.t2},
        {"implication_threshold", sc.implication_threshold},
        {"target_size", sc.target_size},
        {"min_uses", sc.min_uses},
        {"platform", s.platform},
        {"rules", s.rules}}},
      {"pool", {{"raw", in.raw_candidates}, {"deduplicated", st.pool.size()}}},
      {"candidates", candidates},
      {"rounds", rounds},
      {"selected", sel},
      {"proposed", prop},
      {"dropped", drop},
      {"kernels", kernels},
      {"cost_at_accuracy", {{"thresholds", fr.thresholds}, {"rows", table_rows}}},
      {"workload_accuracy",
       {{"history", st.workload_acc_history},
        {"final_base", fr.base_acc},
        {"final_extended", fr.extended_acc}}},
      {"budget",
       {{"optimize_calls", in.optimize_calls},
        {"bound", bound},
        {"within", in.optimize_calls <= bound}}},
      {"timings", "timings.json"},
  };
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string cell(const std::optional<double>& v) { return v ? fixed(*v, 2) : "-"; }

// Keys and their JSON types, checked recursively by check_report.
void require(const json& j, const char* key, json::value_t type, const std::string& where,
             std::vector<std::string>& problems) {
  if (!j.contains(key)) {
    problems.push_back(where + ": missing '" + key + "'");
    return;
  }
  json::value_t t = j.at(key).type();
  bool ok = t == type;
  if (type == json::value_t::number_float)
    ok = j.at(key).is_number();
  else if (type == json::value_t::number_unsigned)
    ok = j.at(key).is_number_integer() && j.at(key).get<int64_t>() >= 0;
  if (!ok) problems.push_back(where + ": '" + key + "' has the wrong type");
}

void check_frontier(const json& f, const std::string& where, std::vector<std::string>& problems) {
  if (!f.is_array()) {
    problems.push_back(where + ": not an array");
    return;
  }
  for (size_t i = 0; i < f.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    if (!f[i].is_object()) {
      problems.push_back(w + ": not an object");
      continue;
    }
    require(f[i], "expr", json::value_t::string, w, problems);
    require(f[i], "cost", json::value_t::number_float, w, problems);
    require(f[i], "accuracy", json::value_t::number_float, w, problems);
    if (f[i].contains("accuracy") && f[i]["accuracy"].is_number()) {
      double a = f[i]["accuracy"];
      if (a < 0 || a > 1) problems.push_back(w + ": accuracy outside [0,1]");
    }
  }
}

}  // namespace

size_t optimize_budget(size_t kernels, size_t rounds, size_t t1, size_t t2) {
  return kernels + rounds * (t1 + t2 * t2) + 2 * kernels;
}

std::string report_json(const ReportInputs& in) { return build(in).dump(2) + "\n"; }

std::string report_markdown(const ReportInputs& in) {
  const SelectionState& st = in.state;
  const FinalReport& fr = in.final;
  std::ostringstream md;
  md << "# Primitive selection report\n\n";
  md << in.kernels.size() << " kernels, " << in.raw_candidates << " raw candidates, "
     << st.pool.size() << " after deduplication, " << st.rounds.size() << " selection rounds, "
     << in.optimize_calls << " superoptimizations.\n\n";
  md << "Workload accuracy: " << fixed(fr.base_acc, 4) << " on the base platform, "
     << fixed(fr.extended_acc, 4) << " with the selected primitives.\n\n";

  md << "## Proposed primitives\n\n";
  if (fr.proposed.empty()) {
    md << "None.\n\n";
  } else {
    md << "| op | formula | frequency | urgency | score | uses | cost |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const ProposedPrimitive& p : fr.proposed) {
      const Candidate& c = st.pool[p.index];
      md << "| " << p.op << " | `" << print(p.formula) << "` | " << c.frequency << " | "
         << fixed(c.urgency.value_or(0), 3) << " | " << fixed(c.score.value_or(0), 3) << " | "
         << p.uses << " | " << format_cost(p.cost) << " |\n";
    }
    md << "\n";
  }
  if (!fr.dropped.empty()) {
    md << "Selected but unused: ";
    for (size_t i = 0; i < fr.dropped.size(); ++i)
      md << (i ? ", " : "") << "`" << print(fr.dropped[i].formula) << "`";
    md << "\n\n";
  }

  md << "## Rounds\n\n";
  for (size_t r = 0; r < st.rounds.size(); ++r) {
    const RoundRecord& rec = st.rounds[r];
    md << (r + 1) << ". " << rec.stage1.size() << " ranked, batch of " << rec.batch.size() << ", "
       << rec.graph.edges.size() << " implication edges, chose";
    if (rec.chosen.empty()) md << " nothing";
    for (size_t c : rec.chosen) md << " `" << print(st.pool[c].pattern) << "`";
    md << "; workload accuracy " << fixed(rec.workload_acc, 4) << "\n";
  }
  md << "\n";

  md << "## Kernels\n\n";
  md << "| kernel | best acc (base) | best acc (extended) | cost at 0.95 (base) | cost at 0.95 "
        "(extended) |\n";
  md << "|---|---|---|---|---|\n";
  for (const KernelOutcome& k : fr.kernels) {
    md << "| " << k.name << " | " << fixed(best_accuracy(k.base_frontier), 4) << " | "
       << fixed(best_accuracy(k.extended_frontier), 4) << " | "
       << cell(cost_at_accuracy(k.base_frontier, 0.95)) << " | "
       << cell(cost_at_accuracy(k.extended_frontier, 0.95)) << " |\n";
  }
  md << "\nThe full cost-at-accuracy table (thresholds 0.50 to 0.99) is in report.json.\n";
  return md.str();
}

std::vector<std::string> check_report(const std::string& json_text) {
  std::vector<std::string> problems;
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return {"not a JSON object"};
  using T = json::value_t;
  require(j, "format", T::string, "report", problems);
  if (j.contains("format") && j["format"] != kFormat) problems.push_back("report: unknown format");
  for (const char* k : {"config", "pool", "cost_at_accuracy", "workload_accuracy", "budget"})
    require(j, k, T::object, "report", problems);
  for (const char* k : {"candidates", "rounds", "selected", "proposed", "dropped", "kernels"})
    require(j, k, T::array, "report", problems);
  require(j, "timings", T::string, "report", problems);
  if (!problems.empty()) return problems;

  for (const char* k : {"seed", "samples", "final_samples", "max_nodes", "max_iters", "t1", "t2",
                        "target_size", "min_uses"})
    require(j["config"], k, T::number_unsigned, "config", problems);
  require(j["config"], "implication_threshold", T::number_float, "config", problems);

  for (size_t i = 0; i < j["candidates"].size(); ++i) {
    const json& c = j["candidates"][i];
    std::string w = "candidates[" + std::to_string(i) + "]";
    require(c, "id", T::string, w, problems);
    require(c, "formula", T::string, w, problems);
    require(c, "size", T::number_float, w, problems);
    require(c, "frequency", T::number_unsigned, w, problems);
    require(c, "status", T::string, w, problems);
    require(c, "members", T::array, w, problems);
    for (const char* k : {"urgency", "score", "uses"})
      if (!c.contains(k) || !(c[k].is_null() || c[k].is_number()))
        problems.push_back(w + ": '" + k + "' must be a number or null");
  }
  for (size_t i = 0; i < j["proposed"].size(); ++i) {
    const json& p = j["proposed"][i];
    std::string w = "proposed[" + std::to_string(i) + "]";
    require(p, "id", T::string, w, problems);
    require(p, "formula", T::string, w, problems);
    require(p, "uses", T::number_unsigned, w, problems);
    if (p.contains("uses") && p["uses"].is_number_integer() &&
        p["uses"].get<int64_t>() < static_cast<int64_t>(j["config"].value("min_uses", 0)))
      problems.push_back(w + ": uses below min_uses");
  }
  size_t nthresholds = 0;
  const json& table = j["cost_at_accuracy"];
  require(table, "thresholds", T::array, "cost_at_accuracy", problems);
  require(table, "rows", T::array, "cost_at_accuracy", problems);
  if (table.contains("thresholds") && table["thresholds"].is_array())
    nthresholds = table["thresholds"].size();
  for (size_t i = 0; i < j["kernels"].size(); ++i) {
    const json& k = j["kernels"][i];
    std::string w = "kernels[" + std::to_string(i) + "]";
    require(k, "name", T::string, w, problems);
    if (k.contains("base_frontier")) check_frontier(k["base_frontier"], w + ".base_frontier", problems);
    else problems.push_back(w + ": missing 'base_frontier'");
    if (k.contains("extended_frontier"))
      check_frontier(k["extended_frontier"], w + ".extended_frontier", problems);
    else problems.push_back(w + ": missing 'extended_frontier'");
  }
  if (table.contains("rows") && table["rows"].is_array()) {
    for (size_t i = 0; i < table["rows"].size(); ++i) {
      const json& r = table["rows"][i];
      std::string w = "cost_at_accuracy.rows[" + std::to_string(i) + "]";
      require(r, "kernel", T::string, w, problems);
      for (const char* side : {"base", "extended"}) {
        if (!r.contains(side) || !r[side].is_array() || r[side].size() != nthresholds)
          problems.push_back(w + ": '" + side + "' must have one entry per threshold");
      }
    }
  }
  require(j["budget"], "optimize_calls", T::number_unsigned, "budget", problems);
  require(j["budget"], "bound", T::number_unsigned, "budget", problems);
  require(j["budget"], "within", T::boolean, "budget", problems);
  return problems;
}

std::string timings_json(const std::vector<StageTime>& stages) {
  json out = json::array();
  double total = 0;
  for (const StageTime& s : stages) {
    out.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
    total += s.seconds;
  }
  return json{{"stages", out}, {"total_seconds", total}}.dump(2) + "\n";
}

}  // namespace primlearn

#include "primlearn/platform.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "primlearn/fpcore.h"
#include "primlearn/sexpr.h"

namespace primlearn {

const OpSpec* Platform::find(Symbol name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &ops_[it->second];
}

std::optional<int> Platform::arity(Symbol name) const {
  const OpSpec* op = find(name);
  if (!op) return std::nullopt;
  return op->arity;
}

void Platform::add(OpSpec op) {
  if (index_.count(op.name)) throw PlatformError("operator '" + op.name.str() + "' already defined");
  if (!(op.cost > 0) || !std::isfinite(op.cost))
    throw PlatformError("operator '" + op.name.str() + "' needs a positive cost");
  if (op.is_defined()) {
    if (!op.formula) throw PlatformError("defined operator '" + op.name.str() + "' has no formula");
    if (static_cast<int>(op.params.size()) != op.arity)
      throw PlatformError("defined operator '" + op.name.str() + "' arity mismatch");
    for (Symbol v : free_vars(op.formula))
      if (std::find(op.params.begin(), op.params.end(), v) == op.params.end())
        throw PlatformError("formula of '" + op.name.str() + "' uses unbound variable " + v.str());
    // Every operator in the formula must already exist, which keeps
    // definitions acyclic.
    expr_cost(*this, op.formula);
  }
  index_.emplace(op.name, ops_.size());
  ops_.push_back(std::move(op));
}

void Platform::set_cost(Symbol name, double cost) {
  auto it = index_.find(name);
  if (it == index_.end()) throw PlatformError("unknown operator '" + name.str() + "'");
  if (!(cost > 0) || !std::isfinite(cost)) throw PlatformError("cost must be positive");
  ops_[it->second].cost = cost;
}

std::vector<const OpSpec*> Platform::defined_ops() const {
  std::vector<const OpSpec*> out;
  for (const OpSpec& op : ops_)
    if (op.is_defined()) out.push_back(&op);
  return out;
}

Platform default_platform() {
  Platform p("default");
  for (int i = 0; i < kNumBuiltins; ++i) {
    const BuiltinInfo& b = builtin_info(static_cast<Builtin>(i));
    OpSpec op;
    op.name = Symbol(b.name);
    op.arity = b.arity;
    op.builtin = b.op;
    op.cost = b.default_cost;
    p.add(std::move(op));
  }
  return p;
}

double expr_cost(const Platform& p, const Expr& e) {
  if (!e.is_app()) return kLeafCost;
  const OpSpec* op = p.find(e.name());
  if (!op) throw PlatformError("unknown operator '" + e.name().str() + "'");
  double c = op->cost;
  for (const Expr& a : e.args()) c += expr_cost(p, a);
  return c;
}

double candidate_cost(const Platform& p, const Expr& formula) {
  return std::max(1.0, expr_cost(p, formula) / 5.0);
}

Platform extend_with_candidate(const Platform& p, Symbol name, const Expr& formula) {
  Platform out = p;
  OpSpec op;
  op.name = name;
  op.params = free_vars(formula);
  op.arity = static_cast<int>(op.params.size());
  op.formula = formula;
  op.cost = candidate_cost(p, formula);
  op.assumed_exact = true;
  out.add(std::move(op));
  return out;
}

std::string format_cost(double c) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, c);
  return std::string(buf, r.ptr);
}

std::string write_platform(const Platform& p) {
  std::string out = "(platform " + p.name() + ")\n";
  for (const OpSpec& op : p.ops()) {
    if (!op.is_defined()) {
      out += "(builtin " + op.name.str() + " " + std::to_string(op.arity) + " " +
             format_cost(op.cost) + ")\n";
      continue;
    }
    out += "(defined " + op.name.str() + " (";
    for (size_t i = 0; i < op.params.size(); ++i) {
      if (i) out += ' ';
      out += op.params[i].str();
    }
    out += ") " + format_cost(op.cost) + " " + print(op.formula);
    if (op.assumed_exact) out += " exact";
    out += ")\n";
  }
  return out;
}

namespace {

double parse_cost(const SExpr& s) {
  if (!s.is_atom()) throw ParseError("expected a cost", s.pos);
  double v = 0;
  auto r = std::from_chars(s.text.data(), s.text.data() + s.text.size(), v);
  if (r.ec != std::errc() || r.ptr != s.text.data() + s.text.size() || !(v > 0))
    throw ParseError("invalid cost '" + s.text + "'", s.pos);
  return v;
}

}  // namespace

Platform read_platform(std::string_view text) {
  Platform p = default_platform();
  for (const SExpr& form : read_sexprs(text)) {
    if (!form.is_list() || form.items.empty() || !form.items[0].is_atom())
      throw ParseError("expected (platform ...), (builtin ...) or (defined ...)", form.pos);
    const std::string& head = form.items[0].text;
    try {
      if (head == "platform") {
        if (form.items.size() != 2) throw ParseError("expected (platform NAME)", form.pos);
        p.set_name(form.items[1].text);
      } else if (head == "builtin") {
        if (form.items.size() != 4) throw ParseError("expected (builtin NAME ARITY COST)", form.pos);
        Symbol name(form.items[1].text);
        const OpSpec* op = p.find(name);
        if (!op || op->is_defined())
          throw ParseError("unknown builtin '" + name.str() + "'", form.items[1].pos);
        if (form.items[2].text != std::to_string(op->arity))
          throw ParseError("wrong arity for builtin '" + name.str() + "'", form.items[2].pos);
        p.set_cost(name, parse_cost(form.items[3]));
      } else if (head == "defined") {
        if (form.items.size() != 5 && form.items.size() != 6)
          throw ParseError("expected (defined NAME (PARAMS) COST FORMULA [exact])", form.pos);
        OpSpec op;
        op.name = Symbol(form.items[1].text);
        if (!form.items[2].is_list()) throw ParseError("expected parameter list", form.items[2].pos);
        for (const SExpr& v : form.items[2].items) {
          if (!v.is_atom()) throw ParseError("expected parameter name", v.pos);
          op.params.push_back(Symbol(v.text));
        }
        op.arity = static_cast<int>(op.params.size());
        op.cost = parse_cost(form.items[3]);
        op.formula = parse_expr(form.items[4], p, &op.params);
        if (form.items.size() == 6) {
          if (!form.items[5].is_atom("exact")) throw ParseError("expected 'exact'", form.items[5].pos);
          op.assumed_exact = true;
        }
        p.add(std::move(op));
      } else {
        throw ParseError("unknown platform entry '" + head + "'", form.pos);
      }
    } catch (const PlatformError& e) {
      throw ParseError(e.what(), form.pos);
    }
  }
  return p;
}

}  // namespace primlearn

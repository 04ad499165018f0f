#include "primlearn/expr.h"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "primlearn/rational.h"

namespace primlearn {
namespace {

size_t mix(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

size_t text_hash(const std::string& s) { return std::hash<std::string>()(s); }

}  // namespace

Expr Expr::var(Symbol name) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kVar;
  n->name = name;
  n->hash = mix(1, text_hash(name.str()));
  return Expr(std::move(n));
}

Expr Expr::num(const mpq_class& value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kNum;
  n->value = std::make_unique<mpq_class>(value);
  n->value->canonicalize();
  n->approx = rational_to_double(*n->value);
  n->hash = mix(2, text_hash(n->value->get_str(16)));
  return Expr(std::move(n));
}

Expr Expr::constant(ConstName c) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kConst;
  n->cname = c;
  n->hash = mix(3, static_cast<size_t>(c));
  return Expr(std::move(n));
}

Expr Expr::app(Symbol op, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kApp;
  n->name = op;
  size_t h = mix(4, text_hash(op.str()));
  uint32_t size = 1;
  for (const Expr& a : args) {
    h = mix(h, a.hash());
    size += a.size();
  }
  n->hash = h;
  n->size = size;
  n->args = std::move(args);
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::kVar:
      return a.name() == b.name();
    case ExprKind::kNum:
      return a.value() == b.value();
    case ExprKind::kConst:
      return a.const_name() == b.const_name();
    case ExprKind::kApp:
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      for (size_t i = 0; i < a.arity(); ++i)
        if (a.arg(i) != b.arg(i)) return false;
      return true;
  }
  return false;
}

int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case ExprKind::kVar:
      return a.name().str().compare(b.name().str()) < 0   ? -1
             : a.name() == b.name()                       ? 0
                                                          : 1;
    case ExprKind::kNum:
      return cmp(a.value(), b.value()) < 0 ? -1 : (a.value() == b.value() ? 0 : 1);
    case ExprKind::kConst:
      return a.const_name() == b.const_name() ? 0 : (a.const_name() < b.const_name() ? -1 : 1);
    case ExprKind::kApp: {
      if (a.name() != b.name()) return a.name().str() < b.name().str() ? -1 : 1;
      if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
      for (size_t i = 0; i < a.arity(); ++i)
        if (int c = compare(a.arg(i), b.arg(i))) return c;
      return 0;
    }
  }
  return 0;
}

namespace {

void print_to(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::kVar:
      out += e.name().str();
      return;
    case ExprKind::kNum:
      out += format_rational(e.value());
      return;
    case ExprKind::kConst:
      out += e.const_name() == ConstName::kPi ? "PI" : "E";
      return;
    case ExprKind::kApp:
      out += '(';
      out += e.name().str() == "neg" ? "-" : e.name().str();
      for (const Expr& a : e.args()) {
        out += ' ';
        print_to(a, out);
      }
      out += ')';
      return;
  }
}

int infix_prec(const Expr& e) {
  if (!e.is_app()) {
    if (e.is_num() && sgn(e.value()) < 0) return 3;
    return 5;
  }
  const std::string& op = e.name().str();
  if (op == "+" || op == "-") return 1;
  if (op == "*" || op == "/") return 2;
  if (op == "neg") return 3;
  return 5;
}

void infix_to(const Expr& e, std::string& out);

void infix_child(const Expr& c, int min_prec, std::string& out) {
  if (infix_prec(c) < min_prec) {
    out += '(';
    infix_to(c, out);
    out += ')';
  } else {
    infix_to(c, out);
  }
}

void infix_to(const Expr& e, std::string& out) {
  if (!e.is_app()) {
    if (e.is_const()) {
      out += e.const_name() == ConstName::kPi ? "pi" : "e";
    } else {
      print_to(e, out);
    }
    return;
  }
  const std::string& op = e.name().str();
  int p = infix_prec(e);
  if (op == "+" || op == "-" || op == "*" || op == "/") {
    infix_child(e.arg(0), p, out);
    out += ' ';
    out += op;
    out += ' ';
    // Right operand needs parentheses at equal precedence (non-associative ops).
    infix_child(e.arg(1), p + 1, out);
    return;
  }
  if (op == "neg") {
    out += '-';
    infix_child(e.arg(0), 4, out);
    return;
  }
  out += op;
  out += '(';
  for (size_t i = 0; i < e.arity(); ++i) {
    if (i) out += ", ";
    infix_to(e.arg(i), out);
  }
  out += ')';
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

std::string to_infix(const Expr& e) {
  std::string out;
  infix_to(e, out);
  return out;
}

std::vector<Symbol> free_vars(const Expr& e) {
  std::vector<Symbol> out;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.is_var()) {
      if (std::find(out.begin(), out.end(), x.name()) == out.end()) out.push_back(x.name());
      return;
    }
    for (const Expr& a : x.args()) walk(a);
  };
  walk(e);
  return out;
}

Expr substitute(const Expr& e, const Binding& binding) {
  if (binding.empty()) return e;
  if (e.is_var()) {
    auto it = binding.find(e.name());
    return it == binding.end() ? e : it->second;
  }
  if (!e.is_app()) return e;
  std::vector<Expr> args;
  args.reserve(e.arity());
  bool changed = false;
  for (const Expr& a : e.args()) {
    args.push_back(substitute(a, binding));
    changed |= args.back().identity() != a.identity();
  }
  return changed ? Expr::app(e.name(), std::move(args)) : e;
}

std::vector<Expr> subexpressions(const Expr& e) {
  std::vector<Expr> out;
  std::unordered_set<Expr, ExprHash> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (!x.is_app()) return;
    if (seen.insert(x).second) out.push_back(x);
    for (const Expr& a : x.args()) walk(a);
  };
  walk(e);
  return out;
}

Symbol canonical_var(int index) {
  static const auto* cache = [] {
    auto* v = new std::vector<Symbol>;
    for (int i = 0; i <= 16; ++i) v->push_back(Symbol("t" + std::to_string(i)));
    return v;
  }();
  if (index >= 0 && index < static_cast<int>(cache->size())) return (*cache)[index];
  return Symbol("t" + std::to_string(index));
}

Expr alpha_normalize(const Expr& e) {
  std::vector<Symbol> vars = free_vars(e);
  Binding b;
  bool identity = true;
  for (size_t i = 0; i < vars.size(); ++i) {
    Symbol t = canonical_var(static_cast<int>(i) + 1);
    identity &= vars[i] == t;
    b.emplace(vars[i], Expr::var(t));
  }
  return identity ? e : substitute(e, b);
}

size_t count_apps(const Expr& e) {
  if (!e.is_app()) return 0;
  size_t n = 1;
  for (const Expr& a : e.args()) n += count_apps(a);
  return n;
}

size_t count_op(const Expr& e, Symbol op) {
  if (!e.is_app()) return 0;
  size_t n = e.name() == op ? 1 : 0;
  for (const Expr& a : e.args()) n += count_op(a, op);
  return n;
}

}  // namespace primlearn

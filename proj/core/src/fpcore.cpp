#include "primlearn/fpcore.h"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "primlearn/rational.h"

namespace primlearn {

VarRange full_range() { return {-DBL_MAX, DBL_MAX}; }

Kernel kernel_from_expr(std::string name, const Expr& body) {
  Kernel k;
  k.name = std::move(name);
  k.args = free_vars(body);
  k.body = body;
  k.ranges.assign(k.args.size(), full_range());
  return k;
}

namespace {

Expr parse_expr_impl(const SExpr& s, const Platform& platform, const std::vector<Symbol>* vars,
                     bool predicate) {
  if (s.kind == SExpr::Kind::kString) throw ParseError("unexpected string", s.pos);
  if (s.is_atom()) {
    if (s.text == "PI") return Expr::constant(ConstName::kPi);
    if (s.text == "E") return Expr::constant(ConstName::kE);
    char c = s.text.empty() ? ' ' : s.text[0];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
        ((c == '-' || c == '+') && s.text.size() > 1)) {
      if (auto q = parse_rational(s.text)) return Expr::num(*q);
      throw ParseError("invalid number '" + s.text + "'", s.pos);
    }
    Symbol v(s.text);
    if (vars && std::find(vars->begin(), vars->end(), v) == vars->end())
      throw ParseError("unknown variable '" + s.text + "'", s.pos);
    return Expr::var(v);
  }
  if (s.items.empty() || !s.items[0].is_atom()) throw ParseError("expected an operator", s.pos);
  const std::string& head = s.items[0].text;
  std::vector<Expr> args;
  bool pred_head = is_predicate_op(head);
  for (size_t i = 1; i < s.items.size(); ++i)
    args.push_back(parse_expr_impl(s.items[i], platform, vars, predicate && head == "and"));
  if (pred_head) {
    if (!predicate) throw ParseError("comparison '" + head + "' outside a precondition", s.pos);
    if (args.size() < (head == "and" ? 1u : 2u))
      throw ParseError("too few operands for '" + head + "'", s.pos);
    return Expr::app(head, std::move(args));
  }
  if (head == "-" && args.size() == 1) return Expr::app("neg", std::move(args));
  if ((head == "+" || head == "*") && args.size() > 2) {
    Expr acc = args[0];
    for (size_t i = 1; i < args.size(); ++i) acc = Expr::app(head, {acc, args[i]});
    return acc;
  }
  std::optional<int> arity = platform.arity(Symbol(head));
  if (!arity) throw ParseError("unknown operator " + head, s.items[0].pos);
  if (*arity != static_cast<int>(args.size()))
    throw ParseError("operator " + head + " expects " + std::to_string(*arity) + " arguments",
                     s.pos);
  return Expr::app(head, std::move(args));
}

// Closed bound expressions: exact for rational arithmetic, otherwise a
// binary64 enclosure.
struct BoundValue {
  std::optional<mpq_class> exact;
  double lo = 0, hi = 0;
};

std::optional<BoundValue> eval_bound(const Expr& e) {
  if (e.is_num()) return BoundValue{e.value(), e.approx(), e.approx()};
  if (e.is_const()) {
    double v = e.const_name() == ConstName::kPi ? M_PI : M_E;
    return BoundValue{std::nullopt, std::nextafter(v, -INFINITY), std::nextafter(v, INFINITY)};
  }
  if (!e.is_app()) return std::nullopt;
  const std::string& op = e.name().str();
  if (op == "neg") {
    auto a = eval_bound(e.arg(0));
    if (!a) return std::nullopt;
    if (a->exact) return BoundValue{-*a->exact, -a->hi, -a->lo};
    return BoundValue{std::nullopt, -a->hi, -a->lo};
  }
  if (e.arity() == 2 && (op == "+" || op == "-" || op == "*" || op == "/")) {
    auto a = eval_bound(e.arg(0)), b = eval_bound(e.arg(1));
    if (!a || !b) return std::nullopt;
    if (a->exact && b->exact) {
      mpq_class r;
      if (op == "+") r = *a->exact + *b->exact;
      if (op == "-") r = *a->exact - *b->exact;
      if (op == "*") r = *a->exact * *b->exact;
      if (op == "/") {
        if (*b->exact == 0) return std::nullopt;
        r = *a->exact / *b->exact;
      }
      double d = rational_to_double(r);
      return BoundValue{r, d, d};
    }
    double c[4];
    auto f = [&](double x, double y) {
      if (op == "+") return x + y;
      if (op == "-") return x - y;
      if (op == "*") return x * y;
      return x / y;
    };
    c[0] = f(a->lo, b->lo);
    c[1] = f(a->lo, b->hi);
    c[2] = f(a->hi, b->lo);
    c[3] = f(a->hi, b->hi);
    if (op == "/" && b->lo <= 0 && b->hi >= 0) return std::nullopt;
    double lo = *std::min_element(c, c + 4), hi = *std::max_element(c, c + 4);
    return BoundValue{std::nullopt, std::nextafter(lo, -INFINITY), std::nextafter(hi, INFINITY)};
  }
  return std::nullopt;
}

// Smallest double >= v (or > v when strict).
double lower_limit(const BoundValue& v, bool strict) {
  if (!v.exact) return strict ? std::nextafter(v.lo, INFINITY) : v.lo;
  double d = rational_to_double(*v.exact);
  if (std::isinf(d)) return d;
  int c = cmp(double_to_rational(d), *v.exact);
  if (c < 0 || (c == 0 && strict)) d = std::nextafter(d, INFINITY);
  return d;
}

// Largest double <= v (or < v when strict).
double upper_limit(const BoundValue& v, bool strict) {
  if (!v.exact) return strict ? std::nextafter(v.hi, -INFINITY) : v.hi;
  double d = rational_to_double(*v.exact);
  if (std::isinf(d)) return d;
  int c = cmp(double_to_rational(d), *v.exact);
  if (c > 0 || (c == 0 && strict)) d = std::nextafter(d, -INFINITY);
  return d;
}

struct RangeBuilder {
  const std::vector<Symbol>& args;
  std::vector<VarRange>& ranges;

  // Which variable an operand constrains; fabs means symmetric.
  std::optional<std::pair<size_t, bool>> target(const Expr& e) const {
    bool abs = false;
    const Expr* x = &e;
    if (e.is_app() && e.name().str() == "fabs") {
      abs = true;
      x = &e.arg(0);
    }
    if (!x->is_var()) return std::nullopt;
    auto it = std::find(args.begin(), args.end(), x->name());
    return std::make_pair(static_cast<size_t>(it - args.begin()), abs);
  }

  void bound_below(size_t i, bool abs, const BoundValue& v, bool strict, SourcePos pos) {
    double l = lower_limit(v, strict);
    if (abs) {
      // |x| >= c with c > 0 is a union of two intervals.
      if (l > 0) throw ParseError("unsupported precondition: lower bound on fabs", pos);
      return;
    }
    ranges[i].lo = std::max(ranges[i].lo, l);
  }

  void bound_above(size_t i, bool abs, const BoundValue& v, bool strict, SourcePos pos) {
    double u = upper_limit(v, strict);
    (void)pos;
    if (abs) {
      ranges[i].lo = std::max(ranges[i].lo, -u);
      ranges[i].hi = std::min(ranges[i].hi, u);
      return;
    }
    ranges[i].hi = std::min(ranges[i].hi, u);
  }

  void add(const Expr& pre, SourcePos pos) {
    const std::string& op = pre.name().str();
    if (op == "and") {
      for (const Expr& a : pre.args()) {
        if (!a.is_app() || !is_predicate_op(a.name().str()))
          throw ParseError("unsupported precondition", pos);
        add(a, pos);
      }
      return;
    }
    if (op == "==" || op == "!=") throw ParseError("unsupported precondition: " + op, pos);
    bool less = op == "<" || op == "<=";
    bool strict = op == "<" || op == ">";
    for (size_t j = 0; j + 1 < pre.arity(); ++j) {
      const Expr& a = pre.arg(j);
      const Expr& b = pre.arg(j + 1);
      auto ta = target(a), tb = target(b);
      auto va = eval_bound(a), vb = eval_bound(b);
      if (ta && vb) {
        // a OP constant
        if (less) bound_above(ta->first, ta->second, *vb, strict, pos);
        else bound_below(ta->first, ta->second, *vb, strict, pos);
      } else if (va && tb) {
        // constant OP b
        if (less) bound_below(tb->first, tb->second, *va, strict, pos);
        else bound_above(tb->first, tb->second, *va, strict, pos);
      } else {
        throw ParseError("unsupported precondition: only interval bounds on arguments", pos);
      }
    }
  }
};

}  // namespace

Expr parse_expr(const SExpr& s, const Platform& platform, const std::vector<Symbol>* vars) {
  return parse_expr_impl(s, platform, vars, false);
}

Expr parse_expr(std::string_view text, const Platform* platform) {
  static const Platform base = default_platform();
  auto forms = read_sexprs(text);
  if (forms.size() != 1) throw ParseError("expected exactly one expression", SourcePos{});
  return parse_expr(forms[0], platform ? *platform : base, nullptr);
}

std::vector<Kernel> parse_fpcore(std::string_view text, const Platform* platform) {
  static const Platform base = default_platform();
  const Platform& p = platform ? *platform : base;
  std::vector<Kernel> out;
  for (const SExpr& form : read_sexprs(text)) {
    if (!form.is_list() || form.items.empty() || !form.items[0].is_atom("FPCore"))
      throw ParseError("expected (FPCore ...)", form.pos);
    Kernel k;
    k.pos = form.pos;
    size_t i = 1;
    if (i < form.items.size() && form.items[i].is_atom()) k.name = form.items[i++].text;
    if (i >= form.items.size() || !form.items[i].is_list())
      throw ParseError("expected an argument list", form.pos);
    for (const SExpr& a : form.items[i].items) {
      if (!a.is_atom() || a.text.empty() || a.text[0] == ':')
        throw ParseError("expected an argument name", a.pos);
      Symbol v(a.text);
      if (std::find(k.args.begin(), k.args.end(), v) != k.args.end())
        throw ParseError("duplicate argument " + a.text, a.pos);
      k.args.push_back(v);
    }
    ++i;
    const SExpr* body = nullptr;
    while (i < form.items.size()) {
      const SExpr& item = form.items[i];
      if (item.is_atom() && !item.text.empty() && item.text[0] == ':') {
        if (i + 1 >= form.items.size())
          throw ParseError("property " + item.text + " has no value", item.pos);
        const SExpr& value = form.items[i + 1];
        if (item.text == ":pre") {
          k.pre = parse_expr_impl(value, p, &k.args, true);
          if (!k.pre->is_app() || !is_predicate_op(k.pre->name().str()))
            throw ParseError("precondition must be a comparison or conjunction", value.pos);
        } else if (item.text == ":name" && k.name.empty()) {
          k.name = value.text;
        }
        i += 2;
        continue;
      }
      if (body) throw ParseError("more than one body expression", item.pos);
      body = &item;
      ++i;
    }
    if (!body) throw ParseError("missing body", form.pos);
    k.body = parse_expr(*body, p, &k.args);
    if (k.name.empty()) k.name = "kernel" + std::to_string(out.size() + 1);
    k.ranges.assign(k.args.size(), full_range());
    if (k.pre) RangeBuilder{k.args, k.ranges}.add(*k.pre, form.pos);
    out.push_back(std::move(k));
  }
  return out;
}

std::string print_fpcore(const Kernel& k) {
  std::string out = "(FPCore (";
  for (size_t i = 0; i < k.args.size(); ++i) {
    if (i) out += ' ';
    out += k.args[i].str();
  }
  out += ") :name \"" + k.name + "\"";
  if (k.pre) out += " :pre " + print(*k.pre);
  out += " " + print(k.body) + ")";
  return out;
}

bool satisfies_precondition(const Kernel& k, const double* point) {
  for (size_t i = 0; i < k.args.size(); ++i)
    if (!(point[i] >= k.ranges[i].lo && point[i] <= k.ranges[i].hi)) return false;
  return true;
}

}  // namespace primlearn

#include "primlearn/rules.h"

#include <algorithm>
#include <cmath>

#include "primlearn/fpcore.h"
#include "primlearn/rational.h"
#include "primlearn/sexpr.h"

namespace primlearn {
namespace {

constexpr const char* kDefaultRules = R"(
; commutativity and associativity
(rule +-commutative (+ a b) (+ b a))
(rule *-commutative (* a b) (* b a))
(rule associate-+r+ (+ a (+ b c)) (+ (+ a b) c))
(rule associate-+l+ (+ (+ a b) c) (+ a (+ b c)))
(rule associate-+r- (+ a (- b c)) (- (+ a b) c))
(rule associate--l+ (- (+ a b) c) (+ a (- b c)))
(rule associate--r- (- a (- b c)) (+ (- a b) c))
(rule associate--l- (- (- a b) c) (- a (+ b c)))
(rule associate-*r* (* a (* b c)) (* (* a b) c))
(rule associate-*l* (* (* a b) c) (* a (* b c)))
(rule associate-*r/ (* a (/ b c)) (/ (* a b) c))
(rule associate-/l* (/ (* a b) c) (* a (/ b c)))
(rule associate-/r/ (/ a (/ b c)) (* (/ a b) c) (!= c 0))
(rule associate-/l/ (/ (/ a b) c) (/ a (* b c)))

; distributivity
(rule distribute-lft-in (* a (+ b c)) (+ (* a b) (* a c)))
(rule distribute-rgt-in (* (+ b c) a) (+ (* b a) (* c a)))
(rule distribute-lft-out (+ (* a b) (* a c)) (* a (+ b c)))
(rule distribute-rgt-out (+ (* b a) (* c a)) (* (+ b c) a))
(rule distribute-lft-out-- (- (* a b) (* a c)) (* a (- b c)))
(rule distribute-rgt-out-- (- (* b a) (* c a)) (* (- b c) a))
(rule distribute-neg-in (neg (+ a b)) (+ (neg a) (neg b)))
(rule distribute-neg-out (+ (neg a) (neg b)) (neg (+ a b)))
(rule distribute-lft-neg-out (* (neg a) b) (neg (* a b)))
(rule distribute-rgt-neg-out (* a (neg b)) (neg (* a b)))
(rule distribute-neg-frac (/ (neg a) b) (neg (/ a b)))
(rule distribute-frac-neg (/ a (neg b)) (neg (/ a b)))

; negation and subtraction
(rule sub-neg (- a b) (+ a (neg b)))
(rule unsub-neg (+ a (neg b)) (- a b))
(rule add-neg-sub (+ a b) (- a (neg b)))
(rule neg-sub0 (neg b) (- 0 b))
(rule sub0-neg (- 0 a) (neg a))
(rule neg-mul-1 (neg a) (* -1 a))
(rule mul-1-neg (* -1 a) (neg a))
(rule remove-double-neg (neg (neg a)) a)
(rule neg-sub (neg (- a b)) (- b a))

; identities
(rule +-lft-identity (+ 0 a) a)
(rule +-rgt-identity (+ a 0) a)
(rule --rgt-identity (- a 0) a)
(rule *-lft-identity (* 1 a) a)
(rule *-rgt-identity (* a 1) a)
(rule /-rgt-identity (/ a 1) a)
(rule mul0-lft (* 0 a) 0)
(rule mul0-rgt (* a 0) 0)
(rule div0 (/ 0 a) 0 (!= a 0))
(rule +-inverses (- a a) 0)
(rule *-inverses (/ a a) 1 (!= a 0))
(rule count-2 (+ a a) (* 2 a))
(rule sub-cancel (- (+ a b) a) b)
(rule sub-cancel-rgt (- (+ b a) a) b)
(rule sub-sub-cancel (- a (- a b)) b)
(rule sub-sub-cancel-neg (- (- a b) a) (neg b))

; fractions
(rule div-inv (/ a b) (* a (/ 1 b)))
(rule un-div-inv (* a (/ 1 b)) (/ a b))
(rule frac-add (+ (/ a b) (/ c d)) (/ (+ (* a d) (* b c)) (* b d)))
(rule frac-sub (- (/ a b) (/ c d)) (/ (- (* a d) (* b c)) (* b d)))
(rule frac-times (* (/ a b) (/ c d)) (/ (* a c) (* b d)))
(rule div-add (/ (+ a b) c) (+ (/ a c) (/ b c)))
(rule div-sub (/ (- a b) c) (- (/ a c) (/ b c)))
(rule add-div (+ (/ a c) (/ b c)) (/ (+ a b) c))
(rule sub-div (- (/ a c) (/ b c)) (/ (- a b) c))
(rule difference-of-squares (- (* a a) (* b b)) (* (+ a b) (- a b)))
(rule difference-of-sqr-1 (- (* a a) 1) (* (+ a 1) (- a 1)))
(rule sqr-neg (* (neg a) (neg a)) (* a a))
(rule sqr-abs (* (fabs a) (fabs a)) (* a a))

; powers
(rule unpow1 (pow a 1) a)
(rule unpow0 (pow a 0) 1)
(rule pow-base-1 (pow 1 a) 1)
(rule unpow2 (pow a 2) (* a a))
(rule unpow3 (pow a 3) (* (* a a) a))
(rule pow2 (* a a) (pow a 2))
(rule pow3 (* (* a a) a) (pow a 3))
(rule unpow-1 (pow a -1) (/ 1 a))
(rule pow-unroll-4 (pow a 4) (* (pow a 2) (pow a 2)))
(rule pow-unroll-6 (pow a 6) (* (pow a 3) (pow a 3)))
(rule unpow1/2 (pow a 1/2) (sqrt a))
(rule unpow1/3 (pow a 1/3) (cbrt a) (>= a 0))
(rule pow-exp (pow a b) (exp (* (log a) b)) (> a 0))
(rule exp-to-pow (exp (* (log a) b)) (pow a b) (> a 0))

; roots
(rule rem-square-sqrt (* (sqrt a) (sqrt a)) a (>= a 0))
(rule rem-sqrt-square (sqrt (* a a)) (fabs a))
(rule sqrt-prod (sqrt (* a b)) (* (sqrt a) (sqrt b)) (and (>= a 0) (>= b 0)))
(rule sqrt-div (sqrt (/ a b)) (/ (sqrt a) (sqrt b)) (and (>= a 0) (> b 0)))
(rule rem-cube-cbrt (* (* (cbrt a) (cbrt a)) (cbrt a)) a)
(rule rem-cbrt-cube (cbrt (* (* a a) a)) a)
(rule hypot-def (sqrt (+ (* a a) (* b b))) (hypot a b))
(rule hypot-1-def (sqrt (+ 1 (* a a))) (hypot 1 a))
(rule hypot-undef (hypot a b) (sqrt (+ (* a a) (* b b))))

; absolute value
(rule fabs-fabs (fabs (fabs a)) (fabs a))
(rule fabs-neg (fabs (neg a)) (fabs a))
(rule fabs-sub (fabs (- a b)) (fabs (- b a)))
(rule fabs-mul (fabs (* a b)) (* (fabs a) (fabs b)))
(rule fabs-sqr (fabs (* a a)) (* a a))
(rule fabs-pos (fabs a) a (>= a 0))
(rule fabs-neg-val (fabs a) (neg a) (<= a 0))

; exponentials and logarithms
(rule rem-exp-log (exp (log a)) a (> a 0))
(rule rem-log-exp (log (exp a)) a)
(rule exp-sum (exp (+ a b)) (* (exp a) (exp b)))
(rule exp-diff (exp (- a b)) (/ (exp a) (exp b)))
(rule exp-neg (exp (neg a)) (/ 1 (exp a)))
(rule prod-exp (* (exp a) (exp b)) (exp (+ a b)))
(rule div-exp (/ (exp a) (exp b)) (exp (- a b)))
(rule log-prod (log (* a b)) (+ (log a) (log b)) (and (> a 0) (> b 0)))
(rule log-div (log (/ a b)) (- (log a) (log b)) (and (> a 0) (> b 0)))
(rule sum-log (+ (log a) (log b)) (log (* a b)) (and (> a 0) (> b 0)))
(rule diff-log (- (log a) (log b)) (log (/ a b)) (and (> a 0) (> b 0)))
(rule log-rec (log (/ 1 a)) (neg (log a)) (> a 0))
(rule log-pow (log (pow a b)) (* b (log a)) (> a 0))
(rule log1p-def (log (+ 1 a)) (log1p a))
(rule log1p-def-r (log (+ a 1)) (log1p a))
(rule log1p-sub (log (- 1 a)) (log1p (neg a)))
(rule log1p-expand (log1p a) (log (+ 1 a)))
(rule expm1-def (- (exp a) 1) (expm1 a))
(rule expm1-expand (expm1 a) (- (exp a) 1))
(rule log1p-expm1 (log1p (expm1 a)) a)
(rule expm1-log1p (expm1 (log1p a)) a (> a -1))

; hyperbolic functions
(rule atanh-def (atanh a) (* 1/2 (log (/ (+ 1 a) (- 1 a)))))
(rule atanh-undef (* 1/2 (log (/ (+ 1 a) (- 1 a)))) (atanh a))
(rule atanh-neg (atanh (neg a)) (neg (atanh a)))
(rule sinh-def (sinh a) (/ (- (exp a) (exp (neg a))) 2))
(rule sinh-undef (/ (- (exp a) (exp (neg a))) 2) (sinh a))
(rule cosh-def (cosh a) (/ (+ (exp a) (exp (neg a))) 2))
(rule cosh-undef (/ (+ (exp a) (exp (neg a))) 2) (cosh a))
(rule tanh-def (tanh a) (/ (- (exp a) (exp (neg a))) (+ (exp a) (exp (neg a)))))
(rule sinh-neg (sinh (neg a)) (neg (sinh a)))
(rule cosh-neg (cosh (neg a)) (cosh a))
(rule tanh-neg (tanh (neg a)) (neg (tanh a)))

; trigonometry
(rule sin-neg (sin (neg a)) (neg (sin a)))
(rule cos-neg (cos (neg a)) (cos a))
(rule tan-neg (tan (neg a)) (neg (tan a)))
(rule tan-quot (tan a) (/ (sin a) (cos a)))
(rule quot-tan (/ (sin a) (cos a)) (tan a))
(rule sin-sum (sin (+ a b)) (+ (* (sin a) (cos b)) (* (cos a) (sin b))))
(rule cos-sum (cos (+ a b)) (- (* (cos a) (cos b)) (* (sin a) (sin b))))
(rule sin-diff (sin (- a b)) (- (* (sin a) (cos b)) (* (cos a) (sin b))))
(rule cos-diff (cos (- a b)) (+ (* (cos a) (cos b)) (* (sin a) (sin b))))
(rule sin-2 (sin (* 2 a)) (* 2 (* (sin a) (cos a))))
(rule cos-2 (cos (* 2 a)) (- 1 (* 2 (* (sin a) (sin a)))))
(rule cos-2-cos (cos (* 2 a)) (- (* 2 (* (cos a) (cos a))) 1))
(rule cos-sq (* (cos a) (cos a)) (- 1 (* (sin a) (sin a))))
(rule sin-sq (* (sin a) (sin a)) (- 1 (* (cos a) (cos a))))
(rule 1-sub-sin (- 1 (* (sin a) (sin a))) (* (cos a) (cos a)))
(rule 1-sub-cos (- 1 (* (cos a) (cos a))) (* (sin a) (sin a)))
(rule sin-cos-sum-sq (+ (* (sin a) (sin a)) (* (cos a) (cos a))) 1)
(rule sin-asin (sin (asin a)) a (and (>= a -1) (<= a 1)))
(rule cos-acos (cos (acos a)) a (and (>= a -1) (<= a 1)))
(rule tan-atan (tan (atan a)) a)
(rule asin-neg (asin (neg a)) (neg (asin a)))
(rule atan-neg (atan (neg a)) (neg (atan a)))
(rule acos-asin (acos a) (- (/ PI 2) (asin a)))

; fused multiply-add
(rule fma-def (+ (* a b) c) (fma a b c))
(rule fma-def-l (+ c (* a b)) (fma a b c))
(rule fma-neg (- (* a b) c) (fma a b (neg c)))
(rule fma-udef (fma a b c) (+ (* a b) c))
)";

Condition::Cmp parse_cmp(const SExpr& s) {
  const std::string& t = s.text;
  if (t == ">") return Condition::Cmp::kGt;
  if (t == ">=") return Condition::Cmp::kGe;
  if (t == "<") return Condition::Cmp::kLt;
  if (t == "<=") return Condition::Cmp::kLe;
  if (t == "!=") return Condition::Cmp::kNe;
  throw ParseError("unknown comparison '" + t + "'", s.pos);
}

void parse_condition(const SExpr& s, std::vector<Condition>& out) {
  if (!s.is_list() || s.items.empty() || !s.items[0].is_atom())
    throw ParseError("expected a condition", s.pos);
  if (s.items[0].is_atom("and")) {
    for (size_t i = 1; i < s.items.size(); ++i) parse_condition(s.items[i], out);
    return;
  }
  if (s.items.size() != 3 || !s.items[1].is_atom() || !s.items[2].is_atom())
    throw ParseError("expected (CMP VAR NUMBER)", s.pos);
  Condition c;
  c.cmp = parse_cmp(s.items[0]);
  c.var = Symbol(s.items[1].text);
  auto q = parse_rational(s.items[2].text);
  if (!q) throw ParseError("expected a number", s.items[2].pos);
  c.bound = rational_to_double(*q);
  out.push_back(c);
}

const char* cmp_text(Condition::Cmp c) {
  switch (c) {
    case Condition::Cmp::kGt: return ">";
    case Condition::Cmp::kGe: return ">=";
    case Condition::Cmp::kLt: return "<";
    case Condition::Cmp::kLe: return "<=";
    case Condition::Cmp::kNe: return "!=";
  }
  return "?";
}

bool is_num(const Expr& e, long v) { return e.is_num() && e.value() == v; }

}  // namespace

bool Condition::holds(double v) const {
  switch (cmp) {
    case Cmp::kGt: return v > bound;
    case Cmp::kGe: return v >= bound;
    case Cmp::kLt: return v < bound;
    case Cmp::kLe: return v <= bound;
    case Cmp::kNe: return v != bound;
  }
  return false;
}

bool Condition::holds(const Range& r) const {
  switch (cmp) {
    case Cmp::kGt: return bound == 0 ? r.positive() : r.lo > bound;
    case Cmp::kGe: return r.lo >= bound;
    case Cmp::kLt: return bound == 0 ? r.negative() : r.hi < bound;
    case Cmp::kLe: return r.hi <= bound;
    case Cmp::kNe: return bound == 0 ? r.known_nonzero() : (r.lo > bound || r.hi < bound);
  }
  return false;
}

const Rule* RuleSet::find(std::string_view name) const {
  for (const Rule& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

RuleSet parse_rules(std::string_view text) {
  static const Platform base = default_platform();
  RuleSet rs;
  for (const SExpr& form : read_sexprs(text)) {
    if (!form.is_list() || form.items.empty() || !form.items[0].is_atom("rule"))
      throw ParseError("expected (rule NAME LHS RHS [COND])", form.pos);
    if (form.items.size() != 4 && form.items.size() != 5)
      throw ParseError("expected (rule NAME LHS RHS [COND])", form.pos);
    Rule r;
    r.name = form.items[1].text;
    r.lhs = parse_expr(form.items[2], base, nullptr);
    r.rhs = parse_expr(form.items[3], base, nullptr);
    if (!r.lhs.is_app()) throw ParseError("rule " + r.name + ": lhs must be an operator", form.pos);
    std::vector<Symbol> lv = free_vars(r.lhs);
    for (Symbol v : free_vars(r.rhs))
      if (std::find(lv.begin(), lv.end(), v) == lv.end())
        throw ParseError("rule " + r.name + ": rhs variable " + v.str() + " not bound by lhs",
                         form.pos);
    if (form.items.size() == 5) parse_condition(form.items[4], r.conditions);
    for (const Condition& c : r.conditions)
      if (std::find(lv.begin(), lv.end(), c.var) == lv.end())
        throw ParseError("rule " + r.name + ": condition on unbound variable", form.pos);
    if (rs.find(r.name)) throw ParseError("duplicate rule name " + r.name, form.pos);
    rs.rules.push_back(std::move(r));
  }
  return rs;
}

RuleSet default_rules() {
  static const RuleSet rs = parse_rules(kDefaultRules);
  return rs;
}

std::string write_rules(const RuleSet& rs) {
  std::string out;
  for (const Rule& r : rs.rules) {
    out += "(rule " + r.name + " " + print(r.lhs) + " " + print(r.rhs);
    if (!r.conditions.empty()) {
      std::string conds;
      for (const Condition& c : r.conditions) {
        if (!conds.empty()) conds += ' ';
        conds += std::string("(") + cmp_text(c.cmp) + " " + c.var.str() + " " +
                 format_rational(double_to_rational(c.bound)) + ")";
      }
      out += r.conditions.size() == 1 ? " " + conds : " (and " + conds + ")";
    }
    out += ")\n";
  }
  return out;
}

Expr simplify_identities(const Expr& e) {
  if (!e.is_app()) return e;
  std::vector<Expr> args;
  for (const Expr& a : e.args()) args.push_back(simplify_identities(a));
  const std::string& op = e.name().str();
  if (op == "*") {
    if (is_num(args[1], 1)) return args[0];
    if (is_num(args[0], 1)) return args[1];
  } else if (op == "+") {
    if (is_num(args[1], 0)) return args[0];
    if (is_num(args[0], 0)) return args[1];
  } else if (op == "-") {
    if (is_num(args[1], 0)) return args[0];
  } else if (op == "/") {
    if (is_num(args[1], 1)) return args[0];
  } else if (op == "pow") {
    if (is_num(args[1], 1)) return args[0];
  }
  return Expr::app(e.name(), std::move(args));
}

RuleSet fold_rules(const Platform& p) {
  RuleSet rs;
  for (const OpSpec* op : p.defined_ops()) {
    std::vector<Expr> call_args;
    for (Symbol v : op->params) call_args.push_back(Expr::var(v));
    Rule base;
    base.name = "fold-" + op->name.str();
    base.lhs = op->formula;
    base.rhs = Expr::app(op->name, call_args);
    if (base.lhs.is_app()) rs.rules.push_back(base);
    if (op->params.size() < 2) continue;
    for (size_t i = 0; i < op->params.size(); ++i) {
      Binding b{{op->params[i], Expr::num(1)}};
      Expr lhs = simplify_identities(substitute(op->formula, b));
      if (!lhs.is_app() || lhs == base.lhs || free_vars(lhs).empty()) continue;
      std::vector<Expr> args = call_args;
      args[i] = Expr::num(1);
      Rule r;
      r.name = "fold-" + op->name.str() + "-" + op->params[i].str() + "=1";
      r.lhs = lhs;
      r.rhs = Expr::app(op->name, std::move(args));
      rs.rules.push_back(std::move(r));
    }
  }
  return rs;
}

}  // namespace primlearn

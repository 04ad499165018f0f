#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "primlearn/egraph.h"
#include "primlearn/expr.h"
#include "primlearn/platform.h"

namespace primlearn {

// Side condition on a pattern variable: var CMP bound.
struct Condition {
  enum class Cmp { kGt, kGe, kLt, kLe, kNe };
  Symbol var;
  Cmp cmp = Cmp::kGt;
  double bound = 0;  // always a small exactly representable constant

  bool holds(double value) const;
  // Decided from an e-class enclosure; false when the range cannot tell.
  bool holds(const Range& r) const;
};

struct Rule {
  std::string name;
  Expr lhs;  // pattern; every variable is a pattern variable
  Expr rhs;
  std::vector<Condition> conditions;  // conjunction
};

struct RuleSet {
  std::vector<Rule> rules;
  size_t size() const { return rules.size(); }
  const Rule* find(std::string_view name) const;
};

// The built-in algebraic rule set.
RuleSet default_rules();

// Text form, one rule per form:
//   (rule NAME LHS RHS)  or  (rule NAME LHS RHS COND)
// where COND is (CMP VAR NUMBER) or (and COND...), CMP one of > >= < <= !=.
RuleSet parse_rules(std::string_view text);
std::string write_rules(const RuleSet& rs);

// Rules that recognise each defined op of the platform: its formula folds
// into a call, as do the specialisations obtained by fixing one parameter
// to 1 (so log(1+x) becomes a call of a two-parameter log(1+x*y) op).
RuleSet fold_rules(const Platform& p);

// Removes multiplicative and additive identities (x*1, x+0, x/1, pow(x,1)).
Expr simplify_identities(const Expr& e);

}  // namespace primlearn

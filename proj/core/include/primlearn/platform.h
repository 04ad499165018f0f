#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "primlearn/expr.h"
#include "primlearn/ops.h"

namespace primlearn {

class PlatformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OpSpec {
  Symbol name;
  int arity = 0;
  std::optional<Builtin> builtin;  // empty for defined ops
  std::vector<Symbol> params;      // formal parameters of a defined op
  Expr formula;                    // body of a defined op, over params
  double cost = 1;
  bool assumed_exact = false;

  bool is_defined() const { return !builtin.has_value(); }
};

class Platform {
 public:
  explicit Platform(std::string name = "default") : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  const std::vector<OpSpec>& ops() const { return ops_; }
  const OpSpec* find(Symbol name) const;
  const OpSpec* find(std::string_view name) const { return find(Symbol(name)); }
  std::optional<int> arity(Symbol name) const;

  // Throws PlatformError on a name collision or an invalid definition.
  void add(OpSpec op);
  void set_cost(Symbol name, double cost);

  std::vector<const OpSpec*> defined_ops() const;

 private:
  std::string name_;
  std::vector<OpSpec> ops_;
  std::unordered_map<Symbol, size_t> index_;
};

Platform default_platform();

// Tree cost: sum of operator costs, 0.1 per leaf. Throws PlatformError on an
// operator the platform lacks.
double expr_cost(const Platform& p, const Expr& e);
inline constexpr double kLeafCost = 0.1;

// Adds a defined, exactly-evaluated op whose cost is a fifth of the formula's
// cost, floored at one unit. Parameters are the formula's free variables in
// first-occurrence order.
Platform extend_with_candidate(const Platform& p, Symbol name, const Expr& formula);
double candidate_cost(const Platform& p, const Expr& formula);

// Text form:  (builtin NAME ARITY COST)
//             (defined NAME (PARAMS...) COST FORMULA [exact])
// Builtins missing from a file keep their default cost.
std::string write_platform(const Platform& p);
Platform read_platform(std::string_view text);

std::string format_cost(double c);

}  // namespace primlearn

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "primlearn/expr.h"
#include "primlearn/platform.h"
#include "primlearn/sexpr.h"

namespace primlearn {

// Closed range of binary64 values a variable may take.
struct VarRange {
  double lo;
  double hi;
  bool empty() const { return !(lo <= hi); }
};
VarRange full_range();

struct Kernel {
  std::string name;
  std::vector<Symbol> args;
  std::optional<Expr> pre;
  Expr body;
  std::vector<VarRange> ranges;  // aligned with args
  SourcePos pos;
};

// Builds a kernel around a body with unbounded arguments in free-variable
// order.
Kernel kernel_from_expr(std::string name, const Expr& body);

// Parses (FPCore name? (args...) props... body) forms. Operators are resolved
// against `platform` (defaults to the builtin alphabet).
std::vector<Kernel> parse_fpcore(std::string_view text, const Platform* platform = nullptr);

// Converts one S-expression into an Expr. `vars` limits the allowed variable
// names (nullptr: any atom that is not a number or constant is a variable).
Expr parse_expr(const SExpr& s, const Platform& platform, const std::vector<Symbol>* vars);
Expr parse_expr(std::string_view text, const Platform* platform = nullptr);

std::string print_fpcore(const Kernel& k);

bool satisfies_precondition(const Kernel& k, const double* point);

}  // namespace primlearn

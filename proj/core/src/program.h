#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "primlearn/expr.h"
#include "primlearn/ops.h"
#include "primlearn/platform.h"

namespace primlearn::detail {

// Straight-line form of an expression with shared subterms. Operands refer
// to earlier instructions.
struct Instr {
  enum Kind : uint8_t { kVar, kNum, kConst, kBuiltin, kExactCall };
  Kind kind;
  Builtin op = Builtin::kAdd;
  uint8_t nargs = 0;
  int32_t a[3] = {0, 0, 0};
  int32_t slot = 0;  // variable index, literal index, ConstName, or exact-op index
};

struct Program {
  std::vector<Instr> code;
  std::vector<mpq_class> nums;
  std::vector<double> num_approx;
  // Exactly evaluated defined ops referenced by kExactCall.
  std::vector<const OpSpec*> exact_ops;
  int32_t result = 0;
};

// Defined ops are expanded into their formulas unless `keep_exact` is set
// and the op is assumed exact, in which case it stays a kExactCall.
Program compile(const Expr& e, const std::vector<Symbol>& vars, const Platform* platform,
                bool keep_exact);

}  // namespace primlearn::detail

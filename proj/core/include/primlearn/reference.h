#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <vector>

#include "primlearn/expr.h"
#include "primlearn/platform.h"

namespace primlearn {

namespace detail {
struct Program;
}

enum class RefStatus { kOk, kUndefined, kNonConverged };

struct RefResult {
  RefStatus status = RefStatus::kOk;
  double value = 0;   // the real result rounded to nearest binary64
  int precision = 0;  // bits used by the deciding evaluation
};

struct Enclosure {
  RefStatus status = RefStatus::kOk;
  mpq_class lo, hi;
  int precision = 0;
};

inline constexpr int kPrecisionSchedule[] = {128, 256, 512, 1024};

// Evaluates the real-number semantics of an expression with MPFR interval
// arithmetic, escalating precision until both ends of the enclosure round to
// the same binary64. Defined platform ops are expanded into their formulas.
class ReferenceEvaluator {
 public:
  ReferenceEvaluator(const Expr& e, std::vector<Symbol> vars, const Platform* platform = nullptr);

  const std::vector<Symbol>& vars() const { return vars_; }
  RefResult eval(const double* point) const;
  // Escalates until the relative width of the enclosure is at most
  // 2^-rel_bits, doubling the precision up to max_precision.
  Enclosure enclose(const double* point, int rel_bits, int max_precision = 8192) const;

 private:
  std::vector<Symbol> vars_;
  std::shared_ptr<const detail::Program> prog_;
};

using Assignment = std::map<Symbol, double>;
RefResult eval_reference(const Expr& e, const Assignment& point, const Platform* platform = nullptr);

}  // namespace primlearn

#pragma once

#include <optional>
#include <string_view>

#include "primlearn/symbol.h"

namespace primlearn {

// The fixed operator alphabet.
enum class Builtin : unsigned char {
  kAdd, kSub, kMul, kDiv, kNeg, kFabs, kSqrt, kCbrt, kFma,
  kSin, kCos, kTan, kAsin, kAcos, kAtan, kAtan2,
  kSinh, kCosh, kTanh, kAtanh,
  kExp, kExpm1, kLog, kLog1p, kPow, kHypot,
};
inline constexpr int kNumBuiltins = static_cast<int>(Builtin::kHypot) + 1;

struct BuiltinInfo {
  Builtin op;
  const char* name;
  int arity;
  double default_cost;
};

const BuiltinInfo& builtin_info(Builtin op);
std::optional<Builtin> builtin_from_name(std::string_view name);
std::optional<Builtin> builtin_from_symbol(Symbol name);
Symbol builtin_symbol(Builtin op);

// Comparison and conjunction operators allowed only inside preconditions.
bool is_predicate_op(std::string_view name);

}  // namespace primlearn

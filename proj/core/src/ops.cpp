#include "primlearn/ops.h"

#include <array>
#include <unordered_map>

namespace primlearn {
namespace {

constexpr std::array<BuiltinInfo, kNumBuiltins> kTable = {{
    {Builtin::kAdd, "+", 2, 1},      {Builtin::kSub, "-", 2, 1},
    {Builtin::kMul, "*", 2, 1},      {Builtin::kDiv, "/", 2, 3},
    {Builtin::kNeg, "neg", 1, 1},    {Builtin::kFabs, "fabs", 1, 1},
    {Builtin::kSqrt, "sqrt", 1, 3},  {Builtin::kCbrt, "cbrt", 1, 12},
    {Builtin::kFma, "fma", 3, 1},    {Builtin::kSin, "sin", 1, 30},
    {Builtin::kCos, "cos", 1, 30},   {Builtin::kTan, "tan", 1, 30},
    {Builtin::kAsin, "asin", 1, 35}, {Builtin::kAcos, "acos", 1, 35},
    {Builtin::kAtan, "atan", 1, 35}, {Builtin::kAtan2, "atan2", 2, 35},
    {Builtin::kSinh, "sinh", 1, 35}, {Builtin::kCosh, "cosh", 1, 35},
    {Builtin::kTanh, "tanh", 1, 35}, {Builtin::kAtanh, "atanh", 1, 35},
    {Builtin::kExp, "exp", 1, 25},   {Builtin::kExpm1, "expm1", 1, 25},
    {Builtin::kLog, "log", 1, 40},   {Builtin::kLog1p, "log1p", 1, 40},
    {Builtin::kPow, "pow", 2, 55},   {Builtin::kHypot, "hypot", 2, 12},
}};

const std::unordered_map<Symbol, Builtin>& symbol_table() {
  static const auto* m = [] {
    auto* t = new std::unordered_map<Symbol, Builtin>;
    for (const BuiltinInfo& b : kTable) t->emplace(Symbol(b.name), b.op);
    return t;
  }();
  return *m;
}

}  // namespace

const BuiltinInfo& builtin_info(Builtin op) {
  return kTable[static_cast<size_t>(op)];
}

std::optional<Builtin> builtin_from_name(std::string_view name) {
  for (const BuiltinInfo& b : kTable)
    if (name == b.name) return b.op;
  return std::nullopt;
}

std::optional<Builtin> builtin_from_symbol(Symbol name) {
  const auto& t = symbol_table();
  auto it = t.find(name);
  if (it == t.end()) return std::nullopt;
  return it->second;
}

Symbol builtin_symbol(Builtin op) {
  static const auto* syms = [] {
    auto* s = new std::array<Symbol, kNumBuiltins>;
    for (int i = 0; i < kNumBuiltins; ++i) (*s)[i] = Symbol(kTable[i].name);
    return s;
  }();
  return (*syms)[static_cast<size_t>(op)];
}

bool is_predicate_op(std::string_view name) {
  return name == "<" || name == "<=" || name == ">" || name == ">=" ||
         name == "==" || name == "!=" || name == "and";
}

}  // namespace primlearn

#include "program.h"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace primlearn::detail {
namespace {

struct Compiler {
  const std::vector<Symbol>& vars;
  const Platform* platform;
  bool keep_exact;
  Program prog;
  std::unordered_map<Expr, int32_t, ExprHash> memo;

  int32_t emit(Instr in) {
    prog.code.push_back(in);
    return static_cast<int32_t>(prog.code.size() - 1);
  }

  int32_t go(const Expr& e) {
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    int32_t id = build(e);
    memo.emplace(e, id);
    return id;
  }

  int32_t build(const Expr& e) {
    Instr in;
    switch (e.kind()) {
      case ExprKind::kVar: {
        auto it = std::find(vars.begin(), vars.end(), e.name());
        if (it == vars.end()) throw std::invalid_argument("unbound variable " + e.name().str());
        in.kind = Instr::kVar;
        in.slot = static_cast<int32_t>(it - vars.begin());
        return emit(in);
      }
      case ExprKind::kNum:
        in.kind = Instr::kNum;
        in.slot = static_cast<int32_t>(prog.nums.size());
        prog.nums.push_back(e.value());
        prog.num_approx.push_back(e.approx());
        return emit(in);
      case ExprKind::kConst:
        in.kind = Instr::kConst;
        in.slot = static_cast<int32_t>(e.const_name());
        return emit(in);
      case ExprKind::kApp:
        break;
    }
    if (auto b = builtin_from_symbol(e.name())) {
      in.kind = Instr::kBuiltin;
      in.op = *b;
      in.nargs = static_cast<uint8_t>(e.arity());
      for (size_t i = 0; i < e.arity(); ++i) in.a[i] = go(e.arg(i));
      return emit(in);
    }
    const OpSpec* op = platform ? platform->find(e.name()) : nullptr;
    if (!op || !op->is_defined()) throw std::invalid_argument("unknown operator " + e.name().str());
    if (keep_exact && op->assumed_exact) {
      in.kind = Instr::kExactCall;
      in.nargs = static_cast<uint8_t>(e.arity());
      for (size_t i = 0; i < e.arity(); ++i) in.a[i] = go(e.arg(i));
      auto it = std::find(prog.exact_ops.begin(), prog.exact_ops.end(), op);
      in.slot = static_cast<int32_t>(it - prog.exact_ops.begin());
      if (it == prog.exact_ops.end()) prog.exact_ops.push_back(op);
      return emit(in);
    }
    Binding b;
    for (size_t i = 0; i < op->params.size(); ++i) b.emplace(op->params[i], e.arg(i));
    return go(substitute(op->formula, b));
  }
};

}  // namespace

Program compile(const Expr& e, const std::vector<Symbol>& vars, const Platform* platform,
                bool keep_exact) {
  Compiler c{vars, platform, keep_exact, {}, {}};
  c.prog.result = c.go(e);
  return std::move(c.prog);
}

}  // namespace primlearn::detail

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "primlearn/symbol.h"

namespace primlearn {

enum class ExprKind : unsigned char { kVar, kNum, kConst, kApp };
enum class ConstName : unsigned char { kPi, kE };

// Immutable real-valued expression tree. Copies share structure.
class Expr {
 public:
  Expr() = default;

  static Expr var(Symbol name);
  static Expr var(std::string_view name) { return var(Symbol(name)); }
  static Expr num(const mpq_class& value);
  static Expr num(long value) { return num(mpq_class(value)); }
  static Expr constant(ConstName c);
  static Expr app(Symbol op, std::vector<Expr> args);
  static Expr app(std::string_view op, std::vector<Expr> args) {
    return app(Symbol(op), std::move(args));
  }

  explicit operator bool() const { return node_ != nullptr; }

  ExprKind kind() const { return node_->kind; }
  bool is_var() const { return node_->kind == ExprKind::kVar; }
  bool is_num() const { return node_->kind == ExprKind::kNum; }
  bool is_const() const { return node_->kind == ExprKind::kConst; }
  bool is_app() const { return node_->kind == ExprKind::kApp; }
  bool is_leaf() const { return node_->kind != ExprKind::kApp; }

  // Variable name for kVar, operator name for kApp.
  Symbol name() const { return node_->name; }
  ConstName const_name() const { return node_->cname; }
  const mpq_class& value() const { return *node_->value; }
  // Correctly rounded binary64 value of a kNum literal.
  double approx() const { return node_->approx; }

  const std::vector<Expr>& args() const { return node_->args; }
  const Expr& arg(size_t i) const { return node_->args[i]; }
  size_t arity() const { return node_->args.size(); }

  size_t hash() const { return node_->hash; }
  // Number of nodes in the tree.
  uint32_t size() const { return node_->size; }
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
  // Total structural order: by size, then kind, then name/value, then args.
  friend int compare(const Expr& a, const Expr& b);
  friend bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

 private:
  struct Node {
    ExprKind kind;
    ConstName cname = ConstName::kPi;
    Symbol name;
    std::unique_ptr<mpq_class> value;
    double approx = 0;
    std::vector<Expr> args;
    size_t hash = 0;
    uint32_t size = 1;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct ExprHash {
  size_t operator()(const Expr& e) const { return e.hash(); }
};

// Canonical S-expression text. Negation prints as (- x).
std::string print(const Expr& e);
// Conventional infix rendering for human-readable reports.
std::string to_infix(const Expr& e);

// Variables in first-occurrence order, left to right, without duplicates.
std::vector<Symbol> free_vars(const Expr& e);

using Binding = std::map<Symbol, Expr>;
Expr substitute(const Expr& e, const Binding& binding);

// Distinct non-leaf subterms of e (e included), in pre-order of first
// appearance.
std::vector<Expr> subexpressions(const Expr& e);

// Renames variables to t1..tk in first-occurrence order.
Expr alpha_normalize(const Expr& e);
Symbol canonical_var(int index);  // index is 1-based

// Number of application nodes.
size_t count_apps(const Expr& e);
// Number of call sites of op in e.
size_t count_op(const Expr& e, Symbol op);

}  // namespace primlearn

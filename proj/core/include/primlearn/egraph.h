#pragma once

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "primlearn/expr.h"
#include "primlearn/fpcore.h"
#include "primlearn/platform.h"

namespace primlearn {

using Id = uint32_t;

// Value enclosure of an e-class, valid wherever the class's terms are
// defined. `nonzero` records that the value is known to be nonzero, which
// together with lo >= 0 gives strict positivity.
struct Range {
  double lo = -INFINITY;
  double hi = INFINITY;
  bool nonzero = false;

  bool positive() const { return lo > 0 || (lo >= 0 && nonzero); }
  bool negative() const { return hi < 0 || (hi <= 0 && nonzero); }
  bool known_nonzero() const { return nonzero || lo > 0 || hi < 0; }
};

// Node heads: leaves first, then operators by index in the graph's op table.
enum : uint32_t { kHeadVar = 0, kHeadNum = 1, kHeadConst = 2, kHeadOps = 3 };

struct ENode {
  uint32_t head = 0;
  uint32_t payload = 0;  // variable index, number index, or ConstName
  uint8_t arity = 0;
  std::array<Id, 3> kids = {0, 0, 0};

  bool operator==(const ENode& o) const {
    return head == o.head && payload == o.payload && arity == o.arity && kids == o.kids;
  }
};

struct ENodeHash {
  size_t operator()(const ENode& n) const {
    size_t h = n.head * 0x9E3779B97F4A7C15ULL ^ n.payload;
    for (int i = 0; i < n.arity; ++i) h = (h ^ n.kids[i]) * 0x100000001B3ULL;
    return h;
  }
};

class EGraph {
 public:
  explicit EGraph(const Platform& platform);

  const Platform& platform() const { return *platform_; }

  // Variables default to the full binary64 range.
  void set_var_range(Symbol v, VarRange r);

  Id add_expr(const Expr& e);
  Id add(ENode n);
  // Returns true if the classes were distinct.
  bool merge(Id a, Id b);
  // Restores congruence closure and recomputes analyses.
  void rebuild();

  Id find(Id a) const;
  size_t node_count() const { return live_nodes_; }
  size_t class_count() const;

  // After rebuild(): canonical class ids in increasing order, and the nodes
  // of each class.
  const std::vector<Id>& classes() const { return class_list_; }
  // Sorted by head, then node index.
  const std::vector<uint32_t>& class_nodes(Id c) const { return class_nodes_[find(c)]; }
  std::span<const uint32_t> class_nodes_with_head(Id c, uint32_t head) const;
  const ENode& node(uint32_t i) const { return nodes_[i]; }
  // Classes containing at least one node with this head.
  const std::vector<Id>& classes_with_head(uint32_t head) const;

  const Range& range(Id c) const { return data_[find(c)].range; }
  // Exact rational value of the class, if known.
  const mpq_class* constant(Id c) const;

  // Op table.
  uint32_t op_head(Symbol op) const;  // throws PlatformError for unknown ops
  std::optional<uint32_t> find_op_head(Symbol op) const;
  Symbol head_symbol(uint32_t head) const { return op_names_[head - kHeadOps]; }
  double head_cost(uint32_t head) const { return op_costs_[head - kHeadOps]; }

  uint32_t num_index(const mpq_class& q);
  const mpq_class& num(uint32_t i) const { return nums_[i]; }
  uint32_t var_index(Symbol v);
  Symbol var_symbol(uint32_t i) const { return vars_[i]; }

  Expr leaf_expr(const ENode& n) const;

 private:
  struct ClassData {
    Range range;
    int constant = -1;  // index into nums_
  };

  ENode canonicalize(ENode n) const;
  Range node_range(const ENode& n) const;
  std::optional<mpq_class> fold(const ENode& n) const;
  Id new_class(const ENode& n);
  void join_data(Id into, Id from);
  void run_analysis();

  const Platform* platform_;
  std::vector<Symbol> op_names_;
  std::vector<double> op_costs_;
  std::vector<int> op_builtin_;  // Builtin value or -1
  std::unordered_map<Symbol, uint32_t> op_index_;

  std::vector<mpq_class> nums_;
  std::map<mpq_class, uint32_t> num_index_;
  std::vector<Symbol> vars_;
  std::vector<VarRange> var_ranges_;

  mutable std::vector<Id> parent_;
  std::vector<ClassData> data_;
  std::vector<ENode> nodes_;
  std::vector<Id> node_class_;
  std::vector<uint8_t> node_alive_;
  size_t live_nodes_ = 0;
  std::unordered_map<ENode, Id, ENodeHash> memo_;
  std::vector<std::vector<uint32_t>> class_nodes_;
  std::vector<Id> class_list_;
  std::vector<std::vector<Id>> head_index_;
  std::vector<Id> pending_;
  bool dirty_ = false;
};

}  // namespace primlearn

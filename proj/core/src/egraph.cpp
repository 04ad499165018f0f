#include "primlearn/egraph.h"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "primlearn/rational.h"

namespace primlearn {
namespace {

double dn(double x, int ulps = 1) {
  if (std::isnan(x)) return -INFINITY;
  for (int i = 0; i < ulps && std::isfinite(x); ++i) x = std::nextafter(x, -INFINITY);
  return x;
}

double up(double x, int ulps = 1) {
  if (std::isnan(x)) return INFINITY;
  for (int i = 0; i < ulps && std::isfinite(x); ++i) x = std::nextafter(x, INFINITY);
  return x;
}

Range full() { return Range{}; }

Range make(double lo, double hi, bool nz) {
  if (std::isnan(lo)) lo = -INFINITY;
  if (std::isnan(hi)) hi = INFINITY;
  return Range{lo, hi, nz};
}

Range point(double v) { return Range{v, v, v != 0}; }

Range exact_or_widened(const mpq_class& q) {
  double d = rational_to_double(q);
  if (std::isfinite(d) && double_to_rational(d) == q) return point(d);
  return Range{dn(d), up(d), q != 0};
}

double prod0(double a, double b) {
  double p = a * b;
  return std::isnan(p) ? 0 : p;  // an unbounded end times exact zero
}

Range mul(const Range& a, const Range& b) {
  double c[4] = {prod0(a.lo, b.lo), prod0(a.lo, b.hi), prod0(a.hi, b.lo), prod0(a.hi, b.hi)};
  return make(dn(*std::min_element(c, c + 4)), up(*std::max_element(c, c + 4)),
              a.known_nonzero() && b.known_nonzero());
}

Range div(const Range& a, const Range& b) {
  bool nz = a.known_nonzero();
  if (b.lo > 0 || b.hi < 0) {
    double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
    for (double& v : c)
      if (std::isnan(v)) v = 0;
    return make(dn(*std::min_element(c, c + 4)), up(*std::max_element(c, c + 4)), nz);
  }
  bool bpos = b.positive(), bneg = b.negative();
  if (bpos || bneg) {
    bool apos = a.lo >= 0, aneg = a.hi <= 0;
    if ((apos && bpos) || (aneg && bneg)) return make(0, INFINITY, nz);
    if ((apos && bneg) || (aneg && bpos)) return make(-INFINITY, 0, nz);
  }
  return make(-INFINITY, INFINITY, nz);
}

Range fabs_range(const Range& a) {
  if (a.lo >= 0) return a;
  if (a.hi <= 0) return Range{-a.hi, -a.lo, a.nonzero};
  return Range{0, std::max(-a.lo, a.hi), a.nonzero};
}

template <typename F>
Range monotone(const Range& a, F f, bool nz, int ulps = 2) {
  return make(dn(f(a.lo), ulps), up(f(a.hi), ulps), nz);
}

Range clamp(Range a, double lo, double hi) {
  a.lo = std::max(a.lo, lo);
  a.hi = std::min(a.hi, hi);
  if (a.lo > a.hi) a.lo = a.hi = lo;
  return a;
}

}  // namespace

EGraph::EGraph(const Platform& platform) : platform_(&platform) {
  for (const OpSpec& op : platform.ops()) {
    op_index_.emplace(op.name, static_cast<uint32_t>(op_names_.size()));
    op_names_.push_back(op.name);
    op_costs_.push_back(op.cost);
    op_builtin_.push_back(op.builtin ? static_cast<int>(*op.builtin) : -1);
  }
  head_index_.resize(kHeadOps + op_names_.size());
}

void EGraph::set_var_range(Symbol v, VarRange r) {
  uint32_t i = var_index(v);
  var_ranges_[i] = r;
}

uint32_t EGraph::var_index(Symbol v) {
  for (uint32_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == v) return i;
  vars_.push_back(v);
  var_ranges_.push_back(full_range());
  return static_cast<uint32_t>(vars_.size() - 1);
}

uint32_t EGraph::num_index(const mpq_class& q) {
  auto it = num_index_.find(q);
  if (it != num_index_.end()) return it->second;
  uint32_t i = static_cast<uint32_t>(nums_.size());
  nums_.push_back(q);
  num_index_.emplace(q, i);
  return i;
}

std::optional<uint32_t> EGraph::find_op_head(Symbol op) const {
  auto it = op_index_.find(op);
  if (it == op_index_.end()) return std::nullopt;
  return kHeadOps + it->second;
}

uint32_t EGraph::op_head(Symbol op) const {
  auto h = find_op_head(op);
  if (!h) throw PlatformError("unknown operator '" + op.str() + "'");
  return *h;
}

Id EGraph::find(Id a) const {
  Id r = a;
  while (parent_[r] != r) r = parent_[r];
  while (parent_[a] != r) {
    Id next = parent_[a];
    parent_[a] = r;
    a = next;
  }
  return r;
}

size_t EGraph::class_count() const {
  size_t n = 0;
  for (Id i = 0; i < parent_.size(); ++i) n += parent_[i] == i;
  return n;
}

const std::vector<Id>& EGraph::classes_with_head(uint32_t head) const {
  static const std::vector<Id> kEmpty;
  return head < head_index_.size() ? head_index_[head] : kEmpty;
}

std::span<const uint32_t> EGraph::class_nodes_with_head(Id c, uint32_t head) const {
  const std::vector<uint32_t>& v = class_nodes_[find(c)];
  auto lo = std::lower_bound(v.begin(), v.end(), head,
                             [&](uint32_t i, uint32_t h) { return nodes_[i].head < h; });
  auto hi = std::upper_bound(lo, v.end(), head,
                             [&](uint32_t h, uint32_t i) { return h < nodes_[i].head; });
  return {lo, hi};
}

const mpq_class* EGraph::constant(Id c) const {
  int k = data_[find(c)].constant;
  return k < 0 ? nullptr : &nums_[k];
}

Expr EGraph::leaf_expr(const ENode& n) const {
  switch (n.head) {
    case kHeadVar:
      return Expr::var(vars_[n.payload]);
    case kHeadNum:
      return Expr::num(nums_[n.payload]);
    case kHeadConst:
      return Expr::constant(static_cast<ConstName>(n.payload));
    default:
      return Expr();
  }
}

ENode EGraph::canonicalize(ENode n) const {
  for (int i = 0; i < n.arity; ++i) n.kids[i] = find(n.kids[i]);
  return n;
}

Id EGraph::add_expr(const Expr& e) {
  ENode n;
  switch (e.kind()) {
    case ExprKind::kVar:
      n.head = kHeadVar;
      n.payload = var_index(e.name());
      return add(n);
    case ExprKind::kNum:
      n.head = kHeadNum;
      n.payload = num_index(e.value());
      return add(n);
    case ExprKind::kConst:
      n.head = kHeadConst;
      n.payload = static_cast<uint32_t>(e.const_name());
      return add(n);
    case ExprKind::kApp:
      break;
  }
  n.head = op_head(e.name());
  n.arity = static_cast<uint8_t>(e.arity());
  for (size_t i = 0; i < e.arity(); ++i) n.kids[i] = add_expr(e.arg(i));
  return add(n);
}

Id EGraph::add(ENode n) {
  n = canonicalize(n);
  if (auto it = memo_.find(n); it != memo_.end()) return find(it->second);
  return new_class(n);
}

Id EGraph::new_class(const ENode& n) {
  Id id = static_cast<Id>(parent_.size());
  parent_.push_back(id);
  ClassData d;
  d.range = node_range(n);
  std::optional<mpq_class> folded;
  if (n.head == kHeadNum) {
    d.constant = static_cast<int>(n.payload);
  } else if (n.head >= kHeadOps) {
    folded = fold(n);
  }
  data_.push_back(d);
  uint32_t idx = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back(n);
  node_class_.push_back(id);
  node_alive_.push_back(1);
  ++live_nodes_;
  memo_.emplace(n, id);
  class_nodes_.push_back({idx});
  dirty_ = true;
  if (folded) {
    ENode k;
    k.head = kHeadNum;
    k.payload = num_index(*folded);
    merge(id, add(k));
  }
  return find(id);
}

void EGraph::join_data(Id into, Id from) {
  ClassData& a = data_[into];
  const ClassData& b = data_[from];
  Range r{std::max(a.range.lo, b.range.lo), std::min(a.range.hi, b.range.hi),
          a.range.nonzero || b.range.nonzero};
  if (r.lo <= r.hi) a.range = r;
  if (a.constant < 0) a.constant = b.constant;
}

bool EGraph::merge(Id a, Id b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (b < a) std::swap(a, b);
  parent_[b] = a;
  join_data(a, b);
  auto& into = class_nodes_[a];
  auto& from = class_nodes_[b];
  into.insert(into.end(), from.begin(), from.end());
  from.clear();
  from.shrink_to_fit();
  dirty_ = true;
  return true;
}

void EGraph::rebuild() {
  for (int round = 0; round < 16; ++round) {
    // Congruence closure by full re-hashing; repeat until no merge happens.
    for (;;) {
      bool changed = false;
      memo_.clear();
      for (uint32_t i = 0; i < nodes_.size(); ++i) {
        if (!node_alive_[i]) continue;
        ENode n = canonicalize(nodes_[i]);
        nodes_[i] = n;
        Id c = find(node_class_[i]);
        node_class_[i] = c;
        auto [it, inserted] = memo_.try_emplace(n, c);
        if (inserted) continue;
        Id o = find(it->second);
        if (o != c) {
          merge(o, c);
          changed = true;
        }
        node_alive_[i] = 0;
        --live_nodes_;
      }
      if (!changed) break;
    }
    for (auto& v : class_nodes_) v.clear();
    for (uint32_t i = 0; i < nodes_.size(); ++i) {
      if (!node_alive_[i]) continue;
      Id c = find(node_class_[i]);
      node_class_[i] = c;
      class_nodes_[c].push_back(i);
    }
    class_list_.clear();
    for (Id c = 0; c < parent_.size(); ++c) {
      if (parent_[c] != c || class_nodes_[c].empty()) continue;
      class_list_.push_back(c);
      std::stable_sort(class_nodes_[c].begin(), class_nodes_[c].end(),
                       [&](uint32_t a, uint32_t b) { return nodes_[a].head < nodes_[b].head; });
    }
    dirty_ = false;
    run_analysis();
    if (!dirty_) break;
  }
  for (auto& v : head_index_) v.clear();
  for (Id c : class_list_) {
    for (uint32_t i : class_nodes_[c]) {
      auto& list = head_index_[nodes_[i].head];
      if (list.empty() || list.back() != c) list.push_back(c);
    }
  }
}

void EGraph::run_analysis() {
  for (int pass = 0; pass < 2; ++pass) {
    for (Id c : class_list_) {
      ClassData& d = data_[c];
      for (uint32_t i : class_nodes_[c]) {
        Range r = node_range(nodes_[i]);
        Range m{std::max(d.range.lo, r.lo), std::min(d.range.hi, r.hi),
                d.range.nonzero || r.nonzero};
        if (m.lo <= m.hi) d.range = m;
      }
    }
  }
  std::vector<Id> snapshot = class_list_;
  for (Id c : snapshot) {
    if (data_[find(c)].constant >= 0) continue;
    std::vector<uint32_t> members = class_nodes_[find(c)];
    for (uint32_t i : members) {
      if (nodes_[i].head < kHeadOps) continue;
      if (auto q = fold(nodes_[i])) {
        ENode k;
        k.head = kHeadNum;
        k.payload = num_index(*q);
        merge(c, add(k));
        break;
      }
    }
  }
}

std::optional<mpq_class> EGraph::fold(const ENode& n) const {
  if (n.head < kHeadOps) return std::nullopt;
  int b = op_builtin_[n.head - kHeadOps];
  if (b < 0) return std::nullopt;
  const mpq_class* k[3] = {nullptr, nullptr, nullptr};
  for (int i = 0; i < n.arity; ++i) {
    int c = data_[find(n.kids[i])].constant;
    if (c < 0) return std::nullopt;
    k[i] = &nums_[c];
  }
  mpq_class r;
  switch (static_cast<Builtin>(b)) {
    case Builtin::kAdd: r = *k[0] + *k[1]; break;
    case Builtin::kSub: r = *k[0] - *k[1]; break;
    case Builtin::kMul: r = *k[0] * *k[1]; break;
    case Builtin::kDiv:
      if (*k[1] == 0) return std::nullopt;
      r = *k[0] / *k[1];
      break;
    case Builtin::kNeg: r = -*k[0]; break;
    case Builtin::kFabs: r = abs(*k[0]); break;
    case Builtin::kFma: r = *k[0] * *k[1] + *k[2]; break;
    case Builtin::kPow: {
      const mpq_class& e = *k[1];
      if (e.get_den() != 1 || abs(e) > 16) return std::nullopt;
      long p = e.get_num().get_si();
      if (p < 0 && *k[0] == 0) return std::nullopt;
      if (p == 0) {
        r = 1;
        break;
      }
      mpz_class num, den;
      mpz_pow_ui(num.get_mpz_t(), k[0]->get_num_mpz_t(), std::labs(p));
      mpz_pow_ui(den.get_mpz_t(), k[0]->get_den_mpz_t(), std::labs(p));
      r = p > 0 ? mpq_class(num, den) : mpq_class(den, num);
      r.canonicalize();
      break;
    }
    case Builtin::kSqrt: {
      if (sgn(*k[0]) < 0) return std::nullopt;
      if (!mpz_perfect_square_p(k[0]->get_num_mpz_t()) ||
          !mpz_perfect_square_p(k[0]->get_den_mpz_t()))
        return std::nullopt;
      mpz_class num, den;
      mpz_sqrt(num.get_mpz_t(), k[0]->get_num_mpz_t());
      mpz_sqrt(den.get_mpz_t(), k[0]->get_den_mpz_t());
      r = mpq_class(num, den);
      break;
    }
    default:
      return std::nullopt;
  }
  if (mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2) > 256)
    return std::nullopt;
  return r;
}

Range EGraph::node_range(const ENode& n) const {
  switch (n.head) {
    case kHeadVar: {
      const VarRange& v = var_ranges_[n.payload];
      return Range{v.lo, v.hi, v.lo > 0 || v.hi < 0};
    }
    case kHeadNum:
      return exact_or_widened(nums_[n.payload]);
    case kHeadConst: {
      double v = n.payload == static_cast<uint32_t>(ConstName::kPi) ? M_PI : M_E;
      return Range{dn(v), up(v), true};
    }
    default:
      break;
  }
  int b = op_builtin_[n.head - kHeadOps];
  if (b < 0) return full();
  Range a[3];
  for (int i = 0; i < n.arity; ++i) a[i] = data_[find(n.kids[i])].range;
  const Range& x = a[0];
  const Range& y = a[1];
  switch (static_cast<Builtin>(b)) {
    case Builtin::kAdd:
      return make(dn(x.lo + y.lo), up(x.hi + y.hi), false);
    case Builtin::kSub:
      return make(dn(x.lo - y.hi), up(x.hi - y.lo), false);
    case Builtin::kMul:
      return mul(x, y);
    case Builtin::kDiv:
      return div(x, y);
    case Builtin::kNeg:
      return Range{-x.hi, -x.lo, x.nonzero};
    case Builtin::kFabs:
      return fabs_range(x);
    case Builtin::kSqrt: {
      Range c = clamp(x, 0, INFINITY);
      Range r = monotone(c, [](double v) { return std::sqrt(v); }, x.known_nonzero(), 1);
      r.lo = std::max(r.lo, 0.0);
      return r;
    }
    case Builtin::kCbrt:
      return monotone(x, [](double v) { return std::cbrt(v); }, x.known_nonzero());
    case Builtin::kFma: {
      Range p = mul(x, y);
      return make(dn(p.lo + a[2].lo), up(p.hi + a[2].hi), false);
    }
    case Builtin::kSin:
    case Builtin::kCos:
      return Range{-1, 1, false};
    case Builtin::kTan:
      return full();
    case Builtin::kAsin:
      return monotone(clamp(x, -1, 1), [](double v) { return std::asin(v); }, x.known_nonzero());
    case Builtin::kAcos: {
      Range c = clamp(x, -1, 1);
      return make(std::max(0.0, dn(std::acos(c.hi), 2)), up(std::acos(c.lo), 2), x.hi < 1);
    }
    case Builtin::kAtan:
      return monotone(x, [](double v) { return std::atan(v); }, x.known_nonzero());
    case Builtin::kAtan2:
      return Range{dn(-M_PI, 2), up(M_PI, 2), false};
    case Builtin::kSinh:
      return monotone(x, [](double v) { return std::sinh(v); }, x.known_nonzero());
    case Builtin::kCosh: {
      Range m = fabs_range(x);
      Range r = monotone(m, [](double v) { return std::cosh(v); }, true);
      r.lo = std::max(r.lo, 1.0);
      return r;
    }
    case Builtin::kTanh:
      return monotone(x, [](double v) { return std::tanh(v); }, x.known_nonzero());
    case Builtin::kAtanh:
      return monotone(clamp(x, -1, 1), [](double v) { return std::atanh(v); }, x.known_nonzero());
    case Builtin::kExp: {
      Range r = monotone(x, [](double v) { return std::exp(v); }, true);
      r.lo = std::max(r.lo, 0.0);
      return r;
    }
    case Builtin::kExpm1: {
      Range r = monotone(x, [](double v) { return std::expm1(v); }, x.known_nonzero());
      r.lo = std::max(r.lo, -1.0);
      return r;
    }
    case Builtin::kLog: {
      Range c = clamp(x, 0, INFINITY);
      Range r = monotone(c, [](double v) { return std::log(v); }, x.lo > 1 || x.hi < 1);
      if (x.lo >= 1) r.lo = std::max(r.lo, 0.0);
      if (x.hi <= 1) r.hi = std::min(r.hi, 0.0);
      return r;
    }
    case Builtin::kLog1p: {
      Range c = clamp(x, -1, INFINITY);
      Range r = monotone(c, [](double v) { return std::log1p(v); }, x.known_nonzero());
      if (x.lo >= 0) r.lo = std::max(r.lo, 0.0);
      if (x.hi <= 0) r.hi = std::min(r.hi, 0.0);
      return r;
    }
    case Builtin::kPow: {
      int kc = data_[find(n.kids[1])].constant;
      if (kc >= 0 && nums_[kc].get_den() == 1 && abs(nums_[kc]) <= 64) {
        long p = nums_[kc].get_num().get_si();
        if (p == 0) return point(1);
        auto f = [p](double v) { return std::pow(v, static_cast<double>(p)); };
        if (p > 0 && p % 2 == 0) {
          Range r = monotone(fabs_range(x), f, x.known_nonzero());
          r.lo = std::max(r.lo, 0.0);
          return r;
        }
        if (p > 0) return monotone(x, f, x.known_nonzero());
        if (x.positive()) return make(0, INFINITY, true);
        if (p % 2 == 0) return make(0, INFINITY, true);
        return make(-INFINITY, INFINITY, true);
      }
      if (x.lo >= 0) return make(0, INFINITY, x.known_nonzero());
      return full();
    }
    case Builtin::kHypot: {
      Range ax = fabs_range(x), ay = fabs_range(y);
      return make(std::max(ax.lo, ay.lo), up(std::hypot(ax.hi, ay.hi), 2),
                  x.known_nonzero() || y.known_nonzero());
    }
  }
  return full();
}

}  // namespace primlearn

#include "primlearn/numerics.h"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <unordered_map>

#include "program.h"

namespace primlearn {

using detail::Instr;
using detail::Program;

size_t SampleSet::valid() const {
  size_t n = 0;
  for (RefStatus s : status) n += s == RefStatus::kOk;
  return n;
}

int64_t ordinal(double x) {
  int64_t bits = std::bit_cast<int64_t>(x);
  return bits >= 0 ? bits : -(bits & INT64_MAX);
}

double from_ordinal(int64_t o) {
  return o >= 0 ? std::bit_cast<double>(o) : -std::bit_cast<double>(-o);
}

double bits_error(double approx, double exact_rounded) {
  if (std::isnan(exact_rounded)) return std::isnan(approx) ? 0 : 64;
  if (std::isnan(approx)) return 64;
  __int128 d = static_cast<__int128>(ordinal(approx)) - ordinal(exact_rounded);
  if (d < 0) d = -d;
  if (d == 0) return 0;
  long double bits = std::log2(1.0L + static_cast<long double>(d));
  return bits > 64 ? 64.0 : static_cast<double>(bits);
}

namespace {

// Uniform integer in [lo, hi] from raw 64-bit draws; independent of the
// standard library's distribution implementation.
int64_t draw(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo);
  if (span == UINT64_MAX) return static_cast<int64_t>(rng());
  uint64_t range = span + 1;
  uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<int64_t>(static_cast<uint64_t>(lo) + v % range);
}

std::string sample_key(const Kernel& k, size_t n, uint64_t seed, const Platform* platform) {
  std::string key = print(k.body) + "|";
  for (size_t i = 0; i < k.args.size(); ++i) {
    key += k.args[i].str() + ":" + std::to_string(ordinal(k.ranges[i].lo)) + ":" +
           std::to_string(ordinal(k.ranges[i].hi)) + ",";
  }
  key += "|" + std::to_string(n) + "|" + std::to_string(seed);
  if (platform) {
    for (const OpSpec* op : platform->defined_ops())
      if (count_op(k.body, op->name)) key += "|" + op->name.str() + "=" + print(op->formula);
  }
  return key;
}

struct SampleCache {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<const SampleSet>> sets;
};

SampleCache& sample_cache() {
  static SampleCache* c = new SampleCache;
  return *c;
}

}  // namespace

std::shared_ptr<const SampleSet> sample_points(const Kernel& k, size_t n, uint64_t seed,
                                               const Platform* platform) {
  if (n == 0) throw SamplingError("sample size must be positive");
  std::string key = sample_key(k, n, seed, platform);
  SampleCache& cache = sample_cache();
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    if (auto it = cache.sets.find(key); it != cache.sets.end()) return it->second;
  }
  for (const VarRange& r : k.ranges)
    if (r.empty()) throw SamplingError("kernel " + k.name + ": precondition is unsatisfiable");

  auto set = std::make_shared<SampleSet>();
  set->vars = k.args;
  set->requested = n;
  ReferenceEvaluator ref(k.body, k.args, platform);
  std::mt19937_64 rng(seed);
  std::vector<double> p(k.args.size());
  std::vector<int64_t> lo(k.args.size()), hi(k.args.size());
  for (size_t i = 0; i < k.args.size(); ++i) {
    lo[i] = ordinal(k.ranges[i].lo);
    hi[i] = ordinal(k.ranges[i].hi);
  }
  size_t budget = 10 * n;
  for (size_t attempt = 0; attempt < budget && set->size() < n; ++attempt) {
    for (size_t i = 0; i < p.size(); ++i) p[i] = from_ordinal(draw(rng, lo[i], hi[i]));
    RefResult r = ref.eval(p.data());
    if (r.status == RefStatus::kUndefined) continue;
    set->coords.insert(set->coords.end(), p.begin(), p.end());
    set->reference.push_back(r.value);
    set->status.push_back(r.status);
  }
  if (2 * set->size() < n) {
    throw SamplingError("kernel " + k.name + ": only " + std::to_string(set->size()) + " of " +
                        std::to_string(n) +
                        " sample points are defined; precondition is unsatisfiable or nearly so");
  }
  std::lock_guard<std::mutex> lock(cache.mu);
  auto [it, inserted] = cache.sets.emplace(key, set);
  return it->second;
}

namespace {

struct ExactKey {
  const void* formula;
  double args[3];
  bool operator==(const ExactKey& o) const {
    return formula == o.formula && std::bit_cast<uint64_t>(args[0]) == std::bit_cast<uint64_t>(o.args[0]) &&
           std::bit_cast<uint64_t>(args[1]) == std::bit_cast<uint64_t>(o.args[1]) &&
           std::bit_cast<uint64_t>(args[2]) == std::bit_cast<uint64_t>(o.args[2]);
  }
};

struct ExactKeyHash {
  size_t operator()(const ExactKey& k) const {
    size_t h = std::hash<const void*>()(k.formula);
    for (double a : k.args) h = h * 1000003u ^ std::hash<uint64_t>()(std::bit_cast<uint64_t>(a));
    return h;
  }
};

// Correctly rounded results of exact defined ops, shared across evaluations
// because the same arguments recur for every term that calls the op.
struct ExactCache {
  std::mutex mu;
  std::unordered_map<ExactKey, double, ExactKeyHash> values;
  std::map<std::string, std::shared_ptr<ReferenceEvaluator>> evaluators;
};

ExactCache& exact_cache() {
  static ExactCache* c = new ExactCache;
  return *c;
}

std::shared_ptr<ReferenceEvaluator> exact_evaluator(const OpSpec& op, const Platform& platform,
                                                    const void** identity) {
  ExactCache& c = exact_cache();
  std::string key = op.name.str() + "(";
  for (Symbol s : op.params) key += s.str() + " ";
  key += ")" + print(op.formula);
  std::lock_guard<std::mutex> lock(c.mu);
  auto it = c.evaluators.find(key);
  if (it == c.evaluators.end()) {
    it = c.evaluators
             .emplace(key, std::make_shared<ReferenceEvaluator>(op.formula, op.params, &platform))
             .first;
  }
  *identity = it->second.get();
  return it->second;
}

double apply_builtin(Builtin op, const double* a) {
  switch (op) {
    case Builtin::kAdd: return a[0] + a[1];
    case Builtin::kSub: return a[0] - a[1];
    case Builtin::kMul: return a[0] * a[1];
    case Builtin::kDiv: return a[0] / a[1];
    case Builtin::kNeg: return -a[0];
    case Builtin::kFabs: return std::fabs(a[0]);
    case Builtin::kSqrt: return std::sqrt(a[0]);
    case Builtin::kCbrt: return std::cbrt(a[0]);
    case Builtin::kFma: return std::fma(a[0], a[1], a[2]);
    case Builtin::kSin: return std::sin(a[0]);
    case Builtin::kCos: return std::cos(a[0]);
    case Builtin::kTan: return std::tan(a[0]);
    case Builtin::kAsin: return std::asin(a[0]);
    case Builtin::kAcos: return std::acos(a[0]);
    case Builtin::kAtan: return std::atan(a[0]);
    case Builtin::kAtan2: return std::atan2(a[0], a[1]);
    case Builtin::kSinh: return std::sinh(a[0]);
    case Builtin::kCosh: return std::cosh(a[0]);
    case Builtin::kTanh: return std::tanh(a[0]);
    case Builtin::kAtanh: return std::atanh(a[0]);
    case Builtin::kExp: return std::exp(a[0]);
    case Builtin::kExpm1: return std::expm1(a[0]);
    case Builtin::kLog: return std::log(a[0]);
    case Builtin::kLog1p: return std::log1p(a[0]);
    case Builtin::kPow: return std::pow(a[0], a[1]);
    case Builtin::kHypot: return std::hypot(a[0], a[1]);
  }
  return std::nan("");
}

}  // namespace

struct F64Evaluator::Impl {
  Program prog;
  std::vector<std::shared_ptr<ReferenceEvaluator>> exact;
  std::vector<const void*> exact_id;
  mutable std::vector<double> regs;
};

F64Evaluator::F64Evaluator(const Expr& e, std::vector<Symbol> vars, const Platform& platform)
    : impl_(std::make_unique<Impl>()) {
  impl_->prog = detail::compile(e, vars, &platform, true);
  for (const OpSpec* op : impl_->prog.exact_ops) {
    const void* id = nullptr;
    impl_->exact.push_back(exact_evaluator(*op, platform, &id));
    impl_->exact_id.push_back(id);
  }
  impl_->regs.resize(impl_->prog.code.size());
}

F64Evaluator::~F64Evaluator() = default;
F64Evaluator::F64Evaluator(F64Evaluator&&) noexcept = default;

double F64Evaluator::eval(const double* point) const {
  const Program& prog = impl_->prog;
  std::vector<double>& r = impl_->regs;
  for (size_t i = 0; i < prog.code.size(); ++i) {
    const Instr& in = prog.code[i];
    double a[3];
    for (int j = 0; j < in.nargs; ++j) a[j] = r[in.a[j]];
    switch (in.kind) {
      case Instr::kVar:
        r[i] = point[in.slot];
        break;
      case Instr::kNum:
        r[i] = prog.num_approx[in.slot];
        break;
      case Instr::kConst:
        r[i] = in.slot == static_cast<int>(ConstName::kPi) ? M_PI : M_E;
        break;
      case Instr::kBuiltin:
        r[i] = apply_builtin(in.op, a);
        break;
      case Instr::kExactCall: {
        ExactKey key{impl_->exact_id[in.slot], {0, 0, 0}};
        bool finite = true;
        for (int j = 0; j < in.nargs; ++j) {
          key.args[j] = a[j];
          finite &= !std::isnan(a[j]);
        }
        if (!finite) {
          r[i] = std::nan("");
          break;
        }
        ExactCache& c = exact_cache();
        {
          std::lock_guard<std::mutex> lock(c.mu);
          if (auto it = c.values.find(key); it != c.values.end()) {
            r[i] = it->second;
            break;
          }
        }
        RefResult res = impl_->exact[in.slot]->eval(a);
        double v = res.status == RefStatus::kOk ? res.value : std::nan("");
        std::lock_guard<std::mutex> lock(c.mu);
        if (c.values.size() > (1u << 22)) c.values.clear();
        c.values.emplace(key, v);
        r[i] = v;
        break;
      }
    }
  }
  return r[prog.result];
}

double eval_f64(const Expr& e, const Assignment& point, const Platform& platform) {
  std::vector<Symbol> vars;
  std::vector<double> values;
  for (const auto& [k, v] : point) {
    vars.push_back(k);
    values.push_back(v);
  }
  return F64Evaluator(e, vars, platform).eval(values.data());
}

ErrorReport measure_error(const Expr& e, const SampleSet& samples, const Platform& platform) {
  F64Evaluator ev(e, samples.vars, platform);
  ErrorReport rep;
  double sum = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples.status[i] != RefStatus::kOk) continue;
    double b = bits_error(ev.eval(samples.point(i)), samples.reference[i]);
    sum += b;
    rep.max_bits = std::max(rep.max_bits, b);
    ++rep.valid_points;
  }
  rep.invalid_points = samples.requested - rep.valid_points;
  rep.mean_bits = rep.valid_points ? sum / static_cast<double>(rep.valid_points) : 64.0;
  if (!rep.valid_points) rep.max_bits = 64;
  return rep;
}

ErrorReport measure_error(const Expr& e, const Kernel& context, size_t n, uint64_t seed,
                          const Platform& platform) {
  auto samples = sample_points(context, n, seed, &platform);
  return measure_error(e, *samples, platform);
}

}  // namespace primlearn

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "primlearn/expr.h"
#include "primlearn/fpcore.h"
#include "primlearn/platform.h"
#include "primlearn/reference.h"

namespace primlearn {

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr size_t kDefaultSamples = 256;
inline constexpr size_t kFinalSamples = 8192;

// Sample points of one kernel together with the rounded reference value of
// its body at each point. Points where the body is undefined are never kept.
struct SampleSet {
  std::vector<Symbol> vars;
  size_t requested = 0;
  std::vector<double> coords;         // row-major, vars.size() per point
  std::vector<double> reference;      // rounded exact body value per point
  std::vector<RefStatus> status;      // kOk or kNonConverged per point

  size_t size() const { return reference.size(); }
  const double* point(size_t i) const { return coords.data() + i * vars.size(); }
  size_t valid() const;
};

// Ordinal-uniform sampling within the kernel's precondition ranges,
// deterministic in seed. Undefined points are redrawn up to a 10x budget;
// fewer than n/2 defined points is a SamplingError.
std::shared_ptr<const SampleSet> sample_points(const Kernel& k, size_t n, uint64_t seed,
                                               const Platform* platform = nullptr);

// Monotone integer encoding of binary64 with +0 and -0 both at 0.
int64_t ordinal(double x);
double from_ordinal(int64_t o);

// log2(1 + ordinal distance) between approx and the rounded exact value,
// capped at 64; a NaN approximation scores 64.
double bits_error(double approx, double exact_rounded);

struct ErrorReport {
  double mean_bits = 0;
  double max_bits = 0;
  size_t valid_points = 0;
  size_t invalid_points = 0;
};

inline double accuracy(const ErrorReport& r) { return 1.0 - r.mean_bits / 64.0; }
inline double accuracy_from_bits(double mean_bits) { return 1.0 - mean_bits / 64.0; }

// Binary64 evaluation of an expression. Builtins use the C library; defined
// ops that are assumed exact return the correctly rounded value of their
// formula; other defined ops are expanded.
class F64Evaluator {
 public:
  F64Evaluator(const Expr& e, std::vector<Symbol> vars, const Platform& platform);
  ~F64Evaluator();
  F64Evaluator(F64Evaluator&&) noexcept;

  double eval(const double* point) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double eval_f64(const Expr& e, const Assignment& point, const Platform& platform);

ErrorReport measure_error(const Expr& e, const SampleSet& samples, const Platform& platform);
ErrorReport measure_error(const Expr& e, const Kernel& context, size_t n, uint64_t seed,
                          const Platform& platform);

}  // namespace primlearn

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "primlearn/fpcore.h"
#include "primlearn/numerics.h"
#include "primlearn/rational.h"
#include "primlearn/reference.h"

namespace primlearn {
namespace {

Expr E(const char* s) { return parse_expr(s); }

double ref1(const char* expr, double x) {
  RefResult r = eval_reference(E(expr), {{Symbol("x"), x}});
  EXPECT_EQ(r.status, RefStatus::kOk) << expr;
  return r.value;
}

TEST(Ordinal, FixedValues) {
  double tiny = std::numeric_limits<double>::denorm_min();
  EXPECT_EQ(ordinal(0.0), 0);
  EXPECT_EQ(ordinal(-0.0), 0);
  EXPECT_EQ(ordinal(tiny), 1);
  EXPECT_EQ(ordinal(-tiny), -1);
  EXPECT_EQ(ordinal(1.0), 0x3FF0000000000000LL);
  EXPECT_EQ(ordinal(std::nextafter(1.0, 2.0)) - ordinal(1.0), 1);
}

TEST(Ordinal, MonotoneAndInvertible) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    double a, b;
    do a = std::bit_cast<double>(rng()); while (std::isnan(a));
    do b = std::bit_cast<double>(rng()); while (std::isnan(b));
    EXPECT_EQ(a < b, ordinal(a) < ordinal(b));
    if (a != 0) EXPECT_EQ(std::bit_cast<uint64_t>(from_ordinal(ordinal(a))), std::bit_cast<uint64_t>(a));
  }
}

TEST(BitsError, Definition) {
  EXPECT_EQ(bits_error(1.5, 1.5), 0);
  EXPECT_EQ(bits_error(0.0, -0.0), 0);
  EXPECT_DOUBLE_EQ(bits_error(std::nextafter(1.0, 2.0), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(bits_error(1.0 + 3 * 0x1p-52, 1.0), 2.0);
  EXPECT_EQ(bits_error(NAN, 1.0), 64);
  EXPECT_DOUBLE_EQ(bits_error(-1.0, 1.0), std::log2(1 + 2 * static_cast<double>(ordinal(1.0))));
  EXPECT_LE(bits_error(-INFINITY, INFINITY), 64);
}

TEST(BitsError, SymmetricAndBounded) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5000; ++i) {
    double a = std::bit_cast<double>(rng()), b = std::bit_cast<double>(rng());
    if (std::isnan(a) || std::isnan(b)) continue;
    double e = bits_error(a, b);
    EXPECT_GE(e, 0);
    EXPECT_LE(e, 64);
    EXPECT_EQ(e, bits_error(b, a));
  }
}

// Values computed to 50 digits with mpmath, rounded to binary64.
TEST(Reference, KnownValues) {
  EXPECT_EQ(ref1("(sin x)", 1e22), -0.8522008497671888);
  EXPECT_EQ(ref1("(log1p x)", 1e-20), 1e-20);
  EXPECT_EQ(ref1("(- (+ x 1) 1)", 1e-20), 1e-20);
  EXPECT_EQ(ref1("(- (exp x) 1)", 1e-10), 1.00000000005e-10);
  EXPECT_EQ(ref1("(sqrt x)", 2), 1.4142135623730951);
  EXPECT_EQ(ref1("(log x)", 10), 2.302585092994046);
  EXPECT_EQ(ref1("(- (/ 1 x) (/ 1 (+ x 1)))", 1e8), 9.999999900000002e-17);
  EXPECT_EQ(ref1("(* PI x)", 1), M_PI);
}

TEST(Reference, DomainErrors) {
  EXPECT_EQ(eval_reference(E("(log x)"), {{Symbol("x"), -1.0}}).status, RefStatus::kUndefined);
  EXPECT_EQ(eval_reference(E("(/ 1 x)"), {{Symbol("x"), 0.0}}).status, RefStatus::kUndefined);
  EXPECT_EQ(eval_reference(E("(sqrt x)"), {{Symbol("x"), -2.0}}).status, RefStatus::kUndefined);
}

TEST(Reference, EnclosureIsTight) {
  ReferenceEvaluator ev(E("(log1p x)"), {Symbol("x")});
  double x = 0.375;
  Enclosure enc = ev.enclose(&x, 100);
  ASSERT_EQ(enc.status, RefStatus::kOk);
  EXPECT_LE(enc.lo, enc.hi);
  EXPECT_EQ(std::log1p(x), rational_to_double(enc.lo));
  mpq_class width = enc.hi - enc.lo;
  EXPECT_LT(width.get_d(), 1e-29);
}

TEST(F64, MatchesLibm) {
  Platform p = default_platform();
  F64Evaluator ev(E("(+ (sin x) (* x x))"), {Symbol("x")}, p);
  for (double x : {0.1, 1.0, -3.5, 1e5}) {
    EXPECT_EQ(ev.eval(&x), std::sin(x) + x * x);
  }
}

TEST(F64, DefinedOpsAssumedExact) {
  Platform p = extend_with_candidate(default_platform(), Symbol("em1"), E("(- (exp t1) 1)"));
  double x = 1e-10;
  double got = eval_f64(parse_expr("(em1 x)", &p), {{Symbol("x"), x}}, p);
  EXPECT_EQ(got, std::expm1(x));
}

TEST(Sampling, DeterministicAndInRange) {
  auto ks = parse_fpcore("(FPCore (x y) :pre (and (<= 1 x 2) (<= -4 y 0)) (+ x y))");
  auto a = sample_points(ks[0], 300, 42);
  auto b = sample_points(ks[0], 300, 42);
  auto c = sample_points(ks[0], 300, 43);
  EXPECT_EQ(a->coords, b->coords);
  EXPECT_NE(a->coords, c->coords);
  EXPECT_EQ(a->size(), 300u);
  for (size_t i = 0; i < a->size(); ++i) EXPECT_TRUE(satisfies_precondition(ks[0], a->point(i)));
}

TEST(Sampling, UndefinedPointsRedrawn) {
  auto ks = parse_fpcore("(FPCore (x) (sqrt x))");
  auto s = sample_points(ks[0], 200, 1);
  ASSERT_EQ(s->size(), 200u);
  for (size_t i = 0; i < s->size(); ++i) EXPECT_GE(s->point(i)[0], 0);
  auto never = parse_fpcore("(FPCore (x) :pre (<= -2 x -1) (sqrt x))");
  EXPECT_THROW(sample_points(never[0], 50, 1), SamplingError);
}

TEST(MeasureError, CancellationIsVisible) {
  auto ks = parse_fpcore("(FPCore (x) :pre (<= (fabs x) 1e-6) (- (+ 1 x) 1))");
  Platform p = default_platform();
  ErrorReport naive = measure_error(ks[0].body, ks[0], 256, 1, p);
  ErrorReport exact = measure_error(E("x"), ks[0], 256, 1, p);
  EXPECT_GT(naive.mean_bits, 20);
  EXPECT_EQ(exact.mean_bits, 0);
  EXPECT_EQ(accuracy(exact), 1.0);
  EXPECT_LT(accuracy(naive), accuracy(exact));
}

// Independent computation of mean bits for a small sample.
TEST(MeasureError, AgreesWithDirectSum) {
  auto ks = parse_fpcore("(FPCore (x) :pre (<= 0.5 x 100) (- (sqrt (+ x 1)) (sqrt x)))");
  Platform p = default_platform();
  auto s = sample_points(ks[0], 64, 9);
  ErrorReport r = measure_error(ks[0].body, *s, p);
  double sum = 0;
  for (size_t i = 0; i < s->size(); ++i) {
    double x = s->point(i)[0];
    sum += bits_error(std::sqrt(x + 1) - std::sqrt(x), s->reference[i]);
  }
  EXPECT_EQ(r.valid_points, s->size());
  EXPECT_NEAR(r.mean_bits, sum / static_cast<double>(s->size()), 1e-12);
}

}  // namespace
}  // namespace primlearn

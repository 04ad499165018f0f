#include "primlearn/reference.h"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

#include "program.h"

namespace primlearn {

using detail::Instr;
using detail::Program;

namespace {

// Whether a value is defined over its whole enclosure, nowhere, or unknown
// at this precision.
enum Def : uint8_t { kYes = 0, kMaybe = 1, kNo = 2 };

void widen_exponents() {
  thread_local bool done = false;
  if (done) return;
  mpfr_set_emax(mpfr_get_emax_max());
  mpfr_set_emin(mpfr_get_emin_min());
  done = true;
}

class Scratch {
 public:
  explicit Scratch(mpfr_prec_t prec) : prec_(prec) {}
  ~Scratch() {
    for (auto& v : vals_) mpfr_clear(v.get());
  }
  // Temporaries are allocated lazily and reused in order.
  mpfr_ptr get() {
    if (next_ == vals_.size()) {
      vals_.emplace_back(new __mpfr_struct);
      mpfr_init2(vals_.back().get(), prec_);
    }
    return vals_[next_++].get();
  }
  void reset() { next_ = 0; }

 private:
  mpfr_prec_t prec_;
  std::vector<std::unique_ptr<__mpfr_struct>> vals_;
  size_t next_ = 0;
};

class Machine {
 public:
  Machine(const Program& prog, mpfr_prec_t prec) : prog_(prog), prec_(prec), scratch_(prec) {
    size_t n = prog.code.size();
    lo_.reset(new __mpfr_struct[n]);
    hi_.reset(new __mpfr_struct[n]);
    def_.assign(n, kYes);
    for (size_t i = 0; i < n; ++i) {
      mpfr_init2(&lo_[i], prec);
      mpfr_init2(&hi_[i], prec);
    }
    mpfr_init2(pi_lo_, prec);
    mpfr_init2(pi_hi_, prec);
    mpfr_const_pi(pi_lo_, MPFR_RNDD);
    mpfr_const_pi(pi_hi_, MPFR_RNDU);
  }
  ~Machine() {
    for (size_t i = 0; i < prog_.code.size(); ++i) {
      mpfr_clear(&lo_[i]);
      mpfr_clear(&hi_[i]);
    }
    mpfr_clear(pi_lo_);
    mpfr_clear(pi_hi_);
  }

  Def run(const double* point) {
    for (size_t i = 0; i < prog_.code.size(); ++i) {
      scratch_.reset();
      step(static_cast<int>(i), prog_.code[i], point);
    }
    return def_[prog_.result];
  }
  mpfr_srcptr lo() const { return &lo_[prog_.result]; }
  mpfr_srcptr hi() const { return &hi_[prog_.result]; }

 private:
  using Fn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

  void set_full(int r) {
    mpfr_set_inf(&lo_[r], -1);
    mpfr_set_inf(&hi_[r], 1);
  }

  void increasing(int r, int x, Fn f) {
    f(&lo_[r], &lo_[x], MPFR_RNDD);
    f(&hi_[r], &hi_[x], MPFR_RNDU);
  }

  void decreasing(int r, int x, Fn f) {
    f(&lo_[r], &hi_[x], MPFR_RNDD);
    f(&hi_[r], &lo_[x], MPFR_RNDU);
  }

  // Applies f to [l, h] already clamped to the domain.
  void increasing_on(int r, mpfr_srcptr l, mpfr_srcptr h, Fn f) {
    f(&lo_[r], l, MPFR_RNDD);
    f(&hi_[r], h, MPFR_RNDU);
  }

  static bool is_point(mpfr_srcptr l, mpfr_srcptr h) { return mpfr_equal_p(l, h) != 0; }

  // Extremes over the four corners of a box for a function monotone in each
  // argument on the box.
  void corners(int r, int x, int y, int (*f)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)) {
    mpfr_srcptr xs[2] = {&lo_[x], &hi_[x]};
    mpfr_srcptr ys[2] = {&lo_[y], &hi_[y]};
    mpfr_ptr t = scratch_.get();
    bool first = true;
    for (auto xv : xs) {
      for (auto yv : ys) {
        f(t, xv, yv, MPFR_RNDD);
        if (mpfr_nan_p(t)) mpfr_set_inf(t, -1);
        if (first || mpfr_less_p(t, &lo_[r])) mpfr_set(&lo_[r], t, MPFR_RNDD);
        f(t, xv, yv, MPFR_RNDU);
        if (mpfr_nan_p(t)) mpfr_set_inf(t, 1);
        if (first || mpfr_greater_p(t, &hi_[r])) mpfr_set(&hi_[r], t, MPFR_RNDU);
        first = false;
      }
    }
  }

  void mul(int r, int x, int y) { corners(r, x, y, mpfr_mul); }

  // Sets [kmin, kmax] to the integers k for which offset + k*pi may lie in
  // [lo_[x], hi_[x]]; offset is 0 or pi/2. Returns false if the range is too
  // wide to matter (more than a full period).
  bool periodic_hits(int x, bool half, mpz_class& kmin, mpz_class& kmax) {
    mpfr_exp_t ex = std::max(mpfr_get_exp(&lo_[x]), mpfr_get_exp(&hi_[x]));
    mpfr_prec_t p = prec_ + std::max<mpfr_exp_t>(0, ex) + 32;
    mpfr_t pl, ph, a, b;
    mpfr_inits2(p, pl, ph, a, b, static_cast<mpfr_ptr>(nullptr));
    mpfr_const_pi(pl, MPFR_RNDD);
    mpfr_const_pi(ph, MPFR_RNDU);
    // Lower bound of (x_lo - off) / pi.
    if (half) {
      mpfr_div_2ui(b, ph, 1, MPFR_RNDU);
      mpfr_sub(a, &lo_[x], b, MPFR_RNDD);
    } else {
      mpfr_set(a, &lo_[x], MPFR_RNDD);
    }
    mpfr_div(a, a, mpfr_sgn(a) >= 0 ? ph : pl, MPFR_RNDD);
    mpfr_floor(a, a);
    // Upper bound of (x_hi - off) / pi.
    if (half) {
      mpfr_div_2ui(b, pl, 1, MPFR_RNDD);
      mpfr_sub(b, &hi_[x], b, MPFR_RNDU);
    } else {
      mpfr_set(b, &hi_[x], MPFR_RNDU);
    }
    mpfr_div(b, b, mpfr_sgn(b) >= 0 ? pl : ph, MPFR_RNDU);
    mpfr_floor(b, b);
    mpfr_get_z(kmin.get_mpz_t(), a, MPFR_RNDN);
    mpfr_get_z(kmax.get_mpz_t(), b, MPFR_RNDN);
    kmin += 1;  // first candidate strictly after the floor of the low end
    mpfr_clears(pl, ph, a, b, static_cast<mpfr_ptr>(nullptr));
    return true;
  }

  // sin (half = true, extremes at pi/2 + k pi) or cos (extremes at k pi).
  void sin_cos(int r, int x, bool is_sin) {
    Fn f = is_sin ? mpfr_sin : mpfr_cos;
    if (mpfr_inf_p(&lo_[x]) || mpfr_inf_p(&hi_[x])) {
      mpfr_set_si(&lo_[r], -1, MPFR_RNDD);
      mpfr_set_si(&hi_[r], 1, MPFR_RNDU);
      return;
    }
    if (is_point(&lo_[x], &hi_[x])) {
      increasing(r, x, f);
      return;
    }
    mpz_class kmin, kmax;
    periodic_hits(x, is_sin, kmin, kmax);
    mpfr_ptr t = scratch_.get();
    f(&lo_[r], &lo_[x], MPFR_RNDD);
    f(t, &hi_[x], MPFR_RNDD);
    mpfr_min(&lo_[r], &lo_[r], t, MPFR_RNDD);
    f(&hi_[r], &lo_[x], MPFR_RNDU);
    f(t, &hi_[x], MPFR_RNDU);
    mpfr_max(&hi_[r], &hi_[r], t, MPFR_RNDU);
    if (kmax < kmin) return;
    bool has_even = kmax > kmin || mpz_even_p(kmin.get_mpz_t());
    bool has_odd = kmax > kmin || mpz_odd_p(kmin.get_mpz_t());
    // sin(pi/2 + k pi) and cos(k pi) are both +1 for even k, -1 for odd k.
    if (has_even) mpfr_set_si(&hi_[r], 1, MPFR_RNDU);
    if (has_odd) mpfr_set_si(&lo_[r], -1, MPFR_RNDD);
  }

  Def tan(int r, int x) {
    if (mpfr_inf_p(&lo_[x]) || mpfr_inf_p(&hi_[x])) {
      set_full(r);
      return kMaybe;
    }
    if (!is_point(&lo_[x], &hi_[x])) {
      mpz_class kmin, kmax;
      periodic_hits(x, true, kmin, kmax);
      if (kmax >= kmin) {
        set_full(r);
        return kMaybe;
      }
    }
    increasing(r, x, mpfr_tan);
    return kYes;
  }

  Def div(int r, int x, int y) {
    int sl = mpfr_sgn(&lo_[y]), sh = mpfr_sgn(&hi_[y]);
    if (sl == 0 && sh == 0) return kNo;
    if (sl > 0 || sh < 0) {
      corners(r, x, y, mpfr_div);
      return kYes;
    }
    set_full(r);
    return kMaybe;
  }

  Def pow(int r, int x, int y) {
    mpfr_srcptr xl = &lo_[x], xh = &hi_[x], yl = &lo_[y], yh = &hi_[y];
    if (is_point(yl, yh) && mpfr_integer_p(yl)) {
      if (mpfr_zero_p(yl)) {
        mpfr_set_ui(&lo_[r], 1, MPFR_RNDD);
        mpfr_set_ui(&hi_[r], 1, MPFR_RNDU);
        return kYes;
      }
      bool neg = mpfr_sgn(yl) < 0;
      bool contains_zero = mpfr_sgn(xl) <= 0 && mpfr_sgn(xh) >= 0;
      if (neg && mpfr_zero_p(xl) && mpfr_zero_p(xh)) return kNo;
      if (neg && contains_zero) {
        set_full(r);
        return kMaybe;
      }
      mpz_class n;
      mpfr_get_z(n.get_mpz_t(), yl, MPFR_RNDN);
      bool odd = mpz_odd_p(n.get_mpz_t());
      if (odd) {
        // Monotone on each sign-definite piece: increasing for n > 0,
        // decreasing for n < 0 (0 is excluded in that case).
        if (!neg) {
          mpfr_pow(&lo_[r], xl, yl, MPFR_RNDD);
          mpfr_pow(&hi_[r], xh, yl, MPFR_RNDU);
        } else {
          mpfr_pow(&lo_[r], xh, yl, MPFR_RNDD);
          mpfr_pow(&hi_[r], xl, yl, MPFR_RNDU);
        }
        return kYes;
      }
      // Even exponent: a function of |x|.
      mpfr_ptr al = scratch_.get(), ah = scratch_.get();
      if (contains_zero) {
        mpfr_set_zero(al, 1);
        mpfr_abs(ah, mpfr_cmpabs(xl, xh) > 0 ? xl : xh, MPFR_RNDU);
      } else if (mpfr_sgn(xl) > 0) {
        mpfr_set(al, xl, MPFR_RNDD);
        mpfr_set(ah, xh, MPFR_RNDU);
      } else {
        mpfr_neg(al, xh, MPFR_RNDD);
        mpfr_neg(ah, xl, MPFR_RNDU);
      }
      if (!neg) {
        mpfr_pow(&lo_[r], al, yl, MPFR_RNDD);
        mpfr_pow(&hi_[r], ah, yl, MPFR_RNDU);
      } else {
        mpfr_pow(&lo_[r], ah, yl, MPFR_RNDD);
        mpfr_pow(&hi_[r], al, yl, MPFR_RNDU);
      }
      return kYes;
    }
    if (mpfr_sgn(xl) > 0) {
      corners(r, x, y, mpfr_pow);
      return kYes;
    }
    if (mpfr_zero_p(xl) && mpfr_zero_p(xh)) {
      if (mpfr_sgn(yl) > 0) {
        mpfr_set_zero(&lo_[r], 1);
        mpfr_set_zero(&hi_[r], 1);
        return kYes;
      }
      if (mpfr_sgn(yh) < 0) return kNo;
      set_full(r);
      return kMaybe;
    }
    if (mpfr_sgn(xh) < 0 && is_point(yl, yh)) return kNo;  // non-integer power of a negative
    if (mpfr_sgn(xl) >= 0 && mpfr_sgn(yl) > 0) {
      corners(r, x, y, mpfr_pow);
      return kYes;
    }
    set_full(r);
    return kMaybe;
  }

  Def atan2(int r, int y, int x) {
    mpfr_srcptr yl = &lo_[y], yh = &hi_[y], xl = &lo_[x], xh = &hi_[x];
    bool y0 = mpfr_sgn(yl) <= 0 && mpfr_sgn(yh) >= 0;
    bool x0 = mpfr_sgn(xl) <= 0 && mpfr_sgn(xh) >= 0;
    if (y0 && x0) {
      if (mpfr_zero_p(yl) && mpfr_zero_p(yh) && mpfr_zero_p(xl) && mpfr_zero_p(xh)) return kNo;
      mpfr_neg(&lo_[r], pi_hi_, MPFR_RNDD);
      mpfr_set(&hi_[r], pi_hi_, MPFR_RNDU);
      return kMaybe;
    }
    if (y0 && mpfr_sgn(xl) < 0) {
      if (mpfr_zero_p(yl) && mpfr_zero_p(yh)) {
        mpfr_set(&lo_[r], pi_lo_, MPFR_RNDD);
        mpfr_set(&hi_[r], pi_hi_, MPFR_RNDU);
        return kYes;
      }
      mpfr_neg(&lo_[r], pi_hi_, MPFR_RNDD);
      mpfr_set(&hi_[r], pi_hi_, MPFR_RNDU);
      return kMaybe;
    }
    corners(r, y, x, mpfr_atan2);
    return kYes;
  }

  Def apply(int r, const Instr& in) {
    int x = in.a[0], y = in.a[1], z = in.a[2];
    mpfr_srcptr xl = &lo_[x], xh = &hi_[x];
    switch (in.op) {
      case Builtin::kAdd:
        mpfr_add(&lo_[r], xl, &lo_[y], MPFR_RNDD);
        mpfr_add(&hi_[r], xh, &hi_[y], MPFR_RNDU);
        return kYes;
      case Builtin::kSub:
        mpfr_sub(&lo_[r], xl, &hi_[y], MPFR_RNDD);
        mpfr_sub(&hi_[r], xh, &lo_[y], MPFR_RNDU);
        return kYes;
      case Builtin::kMul:
        mul(r, x, y);
        return kYes;
      case Builtin::kDiv:
        return div(r, x, y);
      case Builtin::kNeg:
        mpfr_neg(&lo_[r], xh, MPFR_RNDD);
        mpfr_neg(&hi_[r], xl, MPFR_RNDU);
        return kYes;
      case Builtin::kFabs:
        if (mpfr_sgn(xl) >= 0) {
          mpfr_set(&lo_[r], xl, MPFR_RNDD);
          mpfr_set(&hi_[r], xh, MPFR_RNDU);
        } else if (mpfr_sgn(xh) <= 0) {
          mpfr_neg(&lo_[r], xh, MPFR_RNDD);
          mpfr_neg(&hi_[r], xl, MPFR_RNDU);
        } else {
          mpfr_set_zero(&lo_[r], 1);
          mpfr_abs(&hi_[r], mpfr_cmpabs(xl, xh) > 0 ? xl : xh, MPFR_RNDU);
        }
        return kYes;
      case Builtin::kSqrt: {
        if (mpfr_sgn(xh) < 0) return kNo;
        if (mpfr_sgn(xl) >= 0) {
          increasing(r, x, mpfr_sqrt);
          return kYes;
        }
        mpfr_set_zero(&lo_[r], 1);
        mpfr_sqrt(&hi_[r], xh, MPFR_RNDU);
        return kMaybe;
      }
      case Builtin::kCbrt:
        increasing(r, x, mpfr_cbrt);
        return kYes;
      case Builtin::kFma: {
        // Product enclosure at this precision, then the sum.
        corners(r, x, y, mpfr_mul);
        mpfr_add(&lo_[r], &lo_[r], &lo_[z], MPFR_RNDD);
        mpfr_add(&hi_[r], &hi_[r], &hi_[z], MPFR_RNDU);
        return kYes;
      }
      case Builtin::kSin:
        sin_cos(r, x, true);
        return kYes;
      case Builtin::kCos:
        sin_cos(r, x, false);
        return kYes;
      case Builtin::kTan:
        return tan(r, x);
      case Builtin::kAsin:
      case Builtin::kAcos: {
        if (mpfr_cmp_si(xl, 1) > 0 || mpfr_cmp_si(xh, -1) < 0) return kNo;
        mpfr_ptr l = scratch_.get(), h = scratch_.get();
        mpfr_set(l, xl, MPFR_RNDD);
        if (mpfr_cmp_si(l, -1) < 0) mpfr_set_si(l, -1, MPFR_RNDD);
        mpfr_set(h, xh, MPFR_RNDU);
        if (mpfr_cmp_si(h, 1) > 0) mpfr_set_si(h, 1, MPFR_RNDU);
        Def d = (mpfr_cmp_si(xl, -1) >= 0 && mpfr_cmp_si(xh, 1) <= 0) ? kYes : kMaybe;
        if (in.op == Builtin::kAsin) {
          increasing_on(r, l, h, mpfr_asin);
        } else {
          mpfr_acos(&lo_[r], h, MPFR_RNDD);
          mpfr_acos(&hi_[r], l, MPFR_RNDU);
        }
        return d;
      }
      case Builtin::kAtan:
        increasing(r, x, mpfr_atan);
        return kYes;
      case Builtin::kAtan2:
        return atan2(r, x, y);
      case Builtin::kSinh:
        increasing(r, x, mpfr_sinh);
        return kYes;
      case Builtin::kCosh:
        if (mpfr_sgn(xl) >= 0) {
          increasing(r, x, mpfr_cosh);
        } else if (mpfr_sgn(xh) <= 0) {
          decreasing(r, x, mpfr_cosh);
        } else {
          mpfr_set_ui(&lo_[r], 1, MPFR_RNDD);
          mpfr_cosh(&hi_[r], mpfr_cmpabs(xl, xh) > 0 ? xl : xh, MPFR_RNDU);
        }
        return kYes;
      case Builtin::kTanh:
        increasing(r, x, mpfr_tanh);
        return kYes;
      case Builtin::kAtanh: {
        if (mpfr_cmp_si(xh, -1) <= 0 || mpfr_cmp_si(xl, 1) >= 0) return kNo;
        if (mpfr_cmp_si(xl, -1) > 0 && mpfr_cmp_si(xh, 1) < 0) {
          increasing(r, x, mpfr_atanh);
          return kYes;
        }
        set_full(r);
        return kMaybe;
      }
      case Builtin::kExp:
        increasing(r, x, mpfr_exp);
        return kYes;
      case Builtin::kExpm1:
        increasing(r, x, mpfr_expm1);
        return kYes;
      case Builtin::kLog:
      case Builtin::kLog1p: {
        bool lp = in.op == Builtin::kLog1p;
        int bound = lp ? -1 : 0;
        Fn f = lp ? mpfr_log1p : mpfr_log;
        if (mpfr_cmp_si(xh, bound) <= 0) return kNo;
        if (mpfr_cmp_si(xl, bound) > 0) {
          increasing(r, x, f);
          return kYes;
        }
        mpfr_set_inf(&lo_[r], -1);
        f(&hi_[r], xh, MPFR_RNDU);
        return kMaybe;
      }
      case Builtin::kPow:
        return pow(r, x, y);
      case Builtin::kHypot: {
        mpfr_ptr axl = scratch_.get(), axh = scratch_.get(), ayl = scratch_.get(),
                 ayh = scratch_.get();
        auto mag = [](mpfr_ptr l, mpfr_ptr h, mpfr_srcptr a, mpfr_srcptr b) {
          if (mpfr_sgn(a) >= 0) {
            mpfr_set(l, a, MPFR_RNDD);
            mpfr_set(h, b, MPFR_RNDU);
          } else if (mpfr_sgn(b) <= 0) {
            mpfr_neg(l, b, MPFR_RNDD);
            mpfr_neg(h, a, MPFR_RNDU);
          } else {
            mpfr_set_zero(l, 1);
            mpfr_abs(h, mpfr_cmpabs(a, b) > 0 ? a : b, MPFR_RNDU);
          }
        };
        mag(axl, axh, xl, xh);
        mag(ayl, ayh, &lo_[y], &hi_[y]);
        mpfr_hypot(&lo_[r], axl, ayl, MPFR_RNDD);
        mpfr_hypot(&hi_[r], axh, ayh, MPFR_RNDU);
        return kYes;
      }
    }
    return kMaybe;
  }

  void step(int r, const Instr& in, const double* point) {
    switch (in.kind) {
      case Instr::kVar:
        mpfr_set_d(&lo_[r], point[in.slot], MPFR_RNDD);
        mpfr_set_d(&hi_[r], point[in.slot], MPFR_RNDU);
        def_[r] = std::isnan(point[in.slot]) ? kNo : kYes;
        return;
      case Instr::kNum:
        mpfr_set_q(&lo_[r], prog_.nums[in.slot].get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(&hi_[r], prog_.nums[in.slot].get_mpq_t(), MPFR_RNDU);
        def_[r] = kYes;
        return;
      case Instr::kConst:
        if (in.slot == static_cast<int>(ConstName::kPi)) {
          mpfr_set(&lo_[r], pi_lo_, MPFR_RNDD);
          mpfr_set(&hi_[r], pi_hi_, MPFR_RNDU);
        } else {
          mpfr_set_ui(&lo_[r], 1, MPFR_RNDN);
          mpfr_exp(&lo_[r], &lo_[r], MPFR_RNDD);
          mpfr_set_ui(&hi_[r], 1, MPFR_RNDN);
          mpfr_exp(&hi_[r], &hi_[r], MPFR_RNDU);
        }
        def_[r] = kYes;
        return;
      case Instr::kExactCall:
        // Programs for reference evaluation expand defined ops.
        set_full(r);
        def_[r] = kMaybe;
        return;
      case Instr::kBuiltin:
        break;
    }
    Def d = kYes;
    for (int i = 0; i < in.nargs; ++i) d = std::max(d, def_[in.a[i]]);
    if (d == kNo) {
      def_[r] = kNo;
      return;
    }
    Def own = apply(r, in);
    if (mpfr_nan_p(&lo_[r])) mpfr_set_inf(&lo_[r], -1);
    if (mpfr_nan_p(&hi_[r])) mpfr_set_inf(&hi_[r], 1);
    def_[r] = std::max(d, own);
  }

  const Program& prog_;
  mpfr_prec_t prec_;
  Scratch scratch_;
  std::unique_ptr<__mpfr_struct[]> lo_, hi_;
  std::vector<Def> def_;
  mpfr_t pi_lo_, pi_hi_;
};

}  // namespace

ReferenceEvaluator::ReferenceEvaluator(const Expr& e, std::vector<Symbol> vars,
                                       const Platform* platform)
    : vars_(std::move(vars)),
      prog_(std::make_shared<Program>(detail::compile(e, vars_, platform, false))) {}

RefResult ReferenceEvaluator::eval(const double* point) const {
  widen_exponents();
  for (int prec : kPrecisionSchedule) {
    Machine m(*prog_, prec);
    Def d = m.run(point);
    if (d == kNo) return {RefStatus::kUndefined, 0, prec};
    if (d == kMaybe) continue;
    double a = mpfr_get_d(m.lo(), MPFR_RNDN), b = mpfr_get_d(m.hi(), MPFR_RNDN);
    if (a == b) return {RefStatus::kOk, a, prec};
  }
  return {RefStatus::kNonConverged, std::nan(""), kPrecisionSchedule[3]};
}

Enclosure ReferenceEvaluator::enclose(const double* point, int rel_bits, int max_precision) const {
  widen_exponents();
  Enclosure out;
  for (int prec = 128; prec <= max_precision; prec *= 2) {
    Machine m(*prog_, prec);
    Def d = m.run(point);
    out.precision = prec;
    if (d == kNo) {
      out.status = RefStatus::kUndefined;
      return out;
    }
    if (d == kMaybe || !mpfr_number_p(m.lo()) || !mpfr_number_p(m.hi())) continue;
    mpfr_get_q(out.lo.get_mpq_t(), m.lo());
    mpfr_get_q(out.hi.get_mpq_t(), m.hi());
    mpq_class width = out.hi - out.lo;
    mpq_class mag = abs(out.lo) > abs(out.hi) ? abs(out.lo) : abs(out.hi);
    if (width == 0) return out;
    if (mag == 0) continue;
    mpq_class rel = width / mag;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, rel_bits);
    if (rel * scale <= 1) return out;
  }
  out.status = RefStatus::kNonConverged;
  return out;
}

RefResult eval_reference(const Expr& e, const Assignment& point, const Platform* platform) {
  std::vector<Symbol> vars;
  std::vector<double> values;
  for (const auto& [k, v] : point) {
    vars.push_back(k);
    values.push_back(v);
  }
  ReferenceEvaluator ev(e, vars, platform);
  return ev.eval(values.data());
}

}  // namespace primlearn

#include "primlearn/rational.h"

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <string>

namespace primlearn {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class pow10(unsigned long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
  return r;
}

std::optional<mpq_class> parse_decimal(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  long exp10 = 0;
  if (size_t e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view es = s.substr(e + 1);
    s = s.substr(0, e);
    bool eneg = false;
    if (!es.empty() && (es[0] == '-' || es[0] == '+')) {
      eneg = es[0] == '-';
      es.remove_prefix(1);
    }
    if (!all_digits(es) || es.size() > 6) return std::nullopt;
    exp10 = std::stol(std::string(es));
    if (eneg) exp10 = -exp10;
  }
  std::string_view ip = s, fp;
  if (size_t dot = s.find('.'); dot != std::string_view::npos) {
    ip = s.substr(0, dot);
    fp = s.substr(dot + 1);
  }
  if (ip.empty() && fp.empty()) return std::nullopt;
  if (!ip.empty() && !all_digits(ip)) return std::nullopt;
  if (!fp.empty() && !all_digits(fp)) return std::nullopt;
  std::string digits = std::string(ip) + std::string(fp);
  mpz_class mant(digits.empty() ? std::string("0") : digits, 10);
  exp10 -= static_cast<long>(fp.size());
  mpq_class q;
  if (exp10 >= 0) {
    q = mpq_class(mant * pow10(exp10));
  } else {
    q = mpq_class(mant, pow10(-exp10));
    q.canonicalize();
  }
  if (neg) q = -q;
  return q;
}

}  // namespace

std::optional<mpq_class> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (size_t slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash), den = text.substr(slash + 1);
    bool neg = false;
    if (!num.empty() && (num[0] == '-' || num[0] == '+')) {
      neg = num[0] == '-';
      num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    mpz_class d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    mpq_class q(mpz_class(std::string(num), 10), d);
    q.canonicalize();
    if (neg) q = -q;
    return q;
  }
  return parse_decimal(text);
}

std::string format_rational(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str(10);
  // Terminating decimal iff the reduced denominator is 2^a 5^b.
  mpz_class den = q.get_den();
  unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(2).get_mpz_t());
  unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(5).get_mpz_t());
  if (den != 1) return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);

  unsigned long k = std::max(twos, fives);
  mpz_class scaled = q.get_num() * pow10(k) / q.get_den();  // exact
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string digits = scaled.get_str(10);
  long exp10 = -static_cast<long>(k);
  while (digits.size() > 1 && digits.back() == '0') {
    digits.pop_back();
    ++exp10;
  }
  std::string out = neg ? "-" : "";
  long point = static_cast<long>(digits.size()) + exp10;  // digits before the point
  if (point > 0 && point <= 21 && exp10 < 0) {
    out += digits.substr(0, point) + "." + digits.substr(point);
  } else if (point <= 0 && point > -6) {
    out += "0." + std::string(-point, '0') + digits;
  } else {
    long sci = point - 1;
    out += digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    out += "e" + std::to_string(sci);
  }
  return out;
}

double rational_to_double(const mpq_class& q) {
  if (q.get_den() == 1 && mpz_sizeinbase(q.get_num_mpz_t(), 2) <= 53)
    return q.get_num().get_d();
  mpfr_t lo, hi;
  for (mpfr_prec_t prec = 128; prec <= (1 << 17); prec *= 2) {
    mpfr_init2(lo, prec);
    mpfr_init2(hi, prec);
    mpfr_set_q(lo, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi, q.get_mpq_t(), MPFR_RNDU);
    double a = mpfr_get_d(lo, MPFR_RNDN), b = mpfr_get_d(hi, MPFR_RNDN);
    mpfr_clear(lo);
    mpfr_clear(hi);
    if (a == b) return a;
  }
  return q.get_d();
}

mpq_class double_to_rational(double d) {
  mpq_class q(d);  // GMP converts doubles exactly
  return q;
}

}  // namespace primlearn

#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace primlearn {

// Parses an FPCore numeric literal exactly: integers, decimals with optional
// exponent ("1.", ".5", "1e-6") and rationals ("3/4").
std::optional<mpq_class> parse_rational(std::string_view text);

// Canonical text for an exact rational. Terminating decimals print as
// decimals (scientific when the exponent is far from zero), everything else
// as "p/q". parse_rational(format_rational(q)) == q.
std::string format_rational(const mpq_class& q);

// Correctly rounded (ties to even) conversion to binary64, with overflow to
// infinity and gradual underflow.
double rational_to_double(const mpq_class& q);

// Exact value of a finite double.
mpq_class double_to_rational(double d);

}  // namespace primlearn

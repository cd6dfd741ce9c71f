#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace confcoh {

using Integer = mpz_class;
using Rational = mpq_class;

// Parses "p", "-p" or "p/q". Decimal points, exponents and zero
// denominators are rejected. The result is canonicalized.
std::optional<Rational> parse_rational(const std::string& text);

// "p" when the denominator is 1, otherwise "p/q" in lowest terms.
std::string rational_to_string(const Rational& value);

}  // namespace confcoh

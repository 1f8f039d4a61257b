#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tropkp {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

// Integer vector in Z^n; used for cycle coordinates and lattice points.
using LatticePoint = std::vector<std::int64_t>;

// Accepts "p/q", "p", and finite decimals such as "-1.25" or "3e-2".
// Decimals are converted exactly. Throws ValidationError on bad syntax.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

RationalVector parse_rational_list(std::string_view text, char separator = ',');

// Nearest integer, ties rounded towards +infinity.
mpz_class round_nearest(const Rational& value);
mpz_class floor_of(const Rational& value);

std::int64_t to_int64(const mpz_class& value);

}  // namespace tropkp

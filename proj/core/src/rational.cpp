#include "tropkp/rational.hpp"

#include "tropkp/errors.hpp"

#include <cctype>
#include <limits>

namespace tropkp {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

mpz_class parse_integer(std::string_view s, std::string_view original) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw ValidationError("", "not a rational number: '" + std::string(original) + "'");
  }
  mpz_class value(std::string(s), 10);
  return negative ? mpz_class(-value) : value;
}

Rational parse_decimal(std::string_view s, std::string_view original) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mpz_class exp_value = parse_integer(s.substr(e + 1), original);
    if (!exp_value.fits_slong_p() || abs(exp_value) > 4096) {
      throw ValidationError("", "exponent out of range: '" + std::string(original) + "'");
    }
    exponent = exp_value.get_si();
    s = s.substr(0, e);
  }
  std::string digits;
  auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    digits = std::string(s);
  } else {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    exponent -= static_cast<long>(s.size() - dot - 1);
  }
  if (!all_digits(digits)) {
    throw ValidationError("", "not a rational number: '" + std::string(original) + "'");
  }
  Rational value(mpz_class(digits, 10));
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0) {
    value /= Rational(scale);
  } else {
    value *= Rational(scale);
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ValidationError("", "empty rational number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = parse_integer(trim(s.substr(0, slash)), text);
    mpz_class den = parse_integer(trim(s.substr(slash + 1)), text);
    if (den == 0) throw ValidationError("", "zero denominator: '" + std::string(text) + "'");
    Rational value(num, den);
    value.canonicalize();
    return value;
  }
  if (s.find_first_of(".eE") != std::string_view::npos) return parse_decimal(s, text);
  return Rational(parse_integer(s, text));
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_str();
}

RationalVector parse_rational_list(std::string_view text, char separator) {
  RationalVector out;
  std::string_view s = trim(text);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(separator, start);
    out.push_back(parse_rational(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

mpz_class floor_of(const Rational& value) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

mpz_class round_nearest(const Rational& value) {
  return floor_of(value + Rational(1, 2));
}

std::int64_t to_int64(const mpz_class& value) {
  if (!value.fits_slong_p()) throw PrecisionError("integer does not fit in 64 bits: " + value.get_str());
  static_assert(sizeof(long) == sizeof(std::int64_t));
  return value.get_si();
}

}  // namespace tropkp

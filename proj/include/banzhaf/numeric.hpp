#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace banzhaf {

// Counts reach 2^n for n in the tens of thousands; nothing here fits a machine word.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow2(std::size_t n) {
  BigInt r = 1;
  r <<= static_cast<unsigned>(n);
  return r;
}

inline Rational make_rational(const BigInt& num, const BigInt& den = 1) {
  return Rational(num, den);
}

/// Parses a non-negative decimal such as "0.1", "1", ".25" or "3/7" into an exact rational.
inline Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty decimal");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  BigInt digits = 0;
  BigInt scale = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (seen_point) scale *= 10;
      seen_digit = true;
    } else {
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
  return Rational(digits, scale);
}

inline std::string to_string(const BigInt& v) { return v.str(); }

/// "p/q" in lowest terms, or "p" for integers.
inline std::string to_string(const Rational& v) {
  const BigInt& den = boost::multiprecision::denominator(v);
  if (den == 1) return boost::multiprecision::numerator(v).str();
  return boost::multiprecision::numerator(v).str() + "/" + den.str();
}

inline double to_double(const Rational& v) { return v.convert_to<double>(); }
inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

}  // namespace banzhaf

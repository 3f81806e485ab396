#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "eprb/error.hpp"

namespace eprb {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) fail(ErrorKind::InvalidValue, "zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

/// Always "p/q", including integers ("3/1") and zero ("0/1").
inline std::string to_fraction_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Accepts "p/q", "p" or a plain decimal-free integer; rejects anything else.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    if (part.empty()) fail(ErrorKind::InvalidValue, "empty rational component in '" + std::string(text) + "'");
    std::size_t start = (part.front() == '-' || part.front() == '+') ? 1 : 0;
    if (start == part.size()) fail(ErrorKind::InvalidValue, "bad rational '" + std::string(text) + "'");
    for (std::size_t i = start; i < part.size(); ++i) {
      if (part[i] < '0' || part[i] > '9') fail(ErrorKind::InvalidValue, "bad rational '" + std::string(text) + "'");
    }
    return BigInt(std::string(part.front() == '+' ? part.substr(1) : part));
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) fail(ErrorKind::InvalidValue, "zero denominator in '" + std::string(text) + "'");
  return Rational(parse_int(text.substr(0, slash)), den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace eprb

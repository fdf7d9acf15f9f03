#pragma once

// Scalar support shared by every module. All numerical code is templated on
// the scalar type and instantiated for `double` (bulk runs) and `Rational`
// (exact golden runs).

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <string>
#include <string_view>

namespace robust {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Parses "num/den", an integer, or a decimal literal ("-0.125", "1e-3") into an
/// exact rational. Throws ValidationError on malformed input.
Rational parse_rational(std::string_view text);

/// Shortest round-trip decimal text of a double ("0.1", "2.5e-07").
std::string shortest_decimal(double value);

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "double";
  /// Default feasibility / optimality tolerance.
  static double tolerance() { return 1e-9; }
  /// Atoms closer than this are merged.
  static double merge_distance() { return 1e-12; }
  static double to_double(double v) { return v; }
  static double from_double(double v) { return v; }
  static double parse(std::string_view text);
  static std::string format(double v) { return shortest_decimal(v); }
  static bool is_finite(double v) { return std::isfinite(v); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";
  static Rational tolerance() { return Rational(0); }
  static Rational merge_distance() { return Rational(0); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  /// Converts through the shortest decimal representation, so 0.1 becomes 1/10.
  static Rational from_double(double v) { return parse_rational(shortest_decimal(v)); }
  static Rational parse(std::string_view text) { return parse_rational(text); }
  static std::string format(const Rational& v) { return v.str(); }
  static bool is_finite(const Rational&) { return true; }
};

template <class S>
S abs_value(const S& v) {
  return v < S(0) ? S(-v) : v;
}

template <class S>
S max_value(const S& a, const S& b) {
  return a < b ? b : a;
}

template <class S>
S min_value(const S& a, const S& b) {
  return b < a ? b : a;
}

template <class S>
S positive_part(const S& v) {
  return v < S(0) ? S(0) : v;
}

template <class S>
double to_double(const S& v) {
  return ScalarTraits<S>::to_double(v);
}

/// |a - b| <= tol, exact equality when tol is zero.
template <class S>
bool near(const S& a, const S& b, const S& tol) {
  return abs_value(S(a - b)) <= tol;
}

}  // namespace robust

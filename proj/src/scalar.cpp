#include "robust/scalar.hpp"

#include <charconv>
#include <system_error>

#include "robust/errors.hpp"

namespace robust {
namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  return text;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text)) throw ValidationError("malformed number '" + std::string(original) + "'");
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc()) throw ValidationError("malformed number '" + std::string(original) + "'");
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string digits;
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part))) {
    throw ValidationError("malformed number '" + std::string(original) + "'");
  }
  digits.append(int_part);
  digits.append(frac_part);
  exponent -= static_cast<long>(frac_part.size());
  if (exponent > 4000 || exponent < -4000) {
    throw ValidationError("number '" + std::string(original) + "' is out of range");
  }
  boost::multiprecision::mpz_int numerator(digits.empty() ? std::string("0") : digits);
  boost::multiprecision::mpz_int scale = 1;
  for (long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  Rational value = exponent < 0 ? Rational(numerator, scale) : Rational(numerator * scale);
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  if (text.empty()) throw ValidationError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = trim(text.substr(0, slash));
    std::string_view den = trim(text.substr(slash + 1));
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) {
      num_digits.remove_prefix(1);
    }
    if (!all_digits(num_digits) || !all_digits(den)) {
      throw ValidationError("malformed rational '" + std::string(original) + "'");
    }
    boost::multiprecision::mpz_int d{std::string(den)};
    if (d == 0) throw ValidationError("zero denominator in '" + std::string(original) + "'");
    std::string n(num);
    if (!n.empty() && n.front() == '+') n.erase(0, 1);
    return Rational(boost::multiprecision::mpz_int(n), d);
  }
  return parse_decimal(text, original);
}

std::string shortest_decimal(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return std::string(buffer, ptr);
}

double ScalarTraits<double>::parse(std::string_view text) {
  text = trim(text);
  if (text.find('/') != std::string_view::npos) return parse_rational(text).convert_to<double>();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ValidationError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace robust

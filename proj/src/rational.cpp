#include "hardy/rational.hpp"

#include <cmath>
#include <limits>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw InvalidArgument("not a rational literal: '" + std::string(whole) + "'");
  }
  Integer v{std::string(s)};
  return negative ? Integer(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash), text);
    std::string_view den_text = text.substr(slash + 1);
    if (!all_digits(den_text)) {
      throw InvalidArgument("not a rational literal: '" + std::string(text) + "'");
    }
    Integer den(std::string{den_text});
    if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) int_part.remove_prefix(1);
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part))) {
      throw InvalidArgument("not a rational literal: '" + std::string(text) + "'");
    }
    Integer whole = int_part.empty() ? Integer(0) : Integer(std::string(int_part));
    Integer frac = frac_part.empty() ? Integer(0) : Integer(std::string(frac_part));
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac_part.size()));
    Rational r(whole * scale + frac, scale);
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational exact_from_double(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("cannot represent a non-finite value exactly");
  int exponent = 0;
  double mantissa = std::frexp(v, &exponent);
  // 53 mantissa bits make the scaled value an exact integer.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r{Integer(scaled)};
  if (exponent > 0) {
    r *= Rational(boost::multiprecision::pow(Integer(2), static_cast<unsigned>(exponent)));
  } else if (exponent < 0) {
    r /= Rational(boost::multiprecision::pow(Integer(2), static_cast<unsigned>(-exponent)));
  }
  return r;
}

}  // namespace hardy

#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace hardy {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Parses "p/q", "p", or a finite decimal literal such as "0.75" exactly.
/// Throws InvalidArgument on anything else.
Rational parse_rational(std::string_view text);

/// Always "p/q" with q > 0, also for integers ("3/1").
std::string to_string(const Rational& r);

double to_double(const Rational& r);

/// Exact value of a finite double (every double is a dyadic rational).
Rational exact_from_double(double v);

}  // namespace hardy

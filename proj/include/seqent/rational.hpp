#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace seqent {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

/// Parses "p/q" or "p". Throws ConfigError on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Always "p/q" in lowest terms, including "0/1" and "1/1".
std::string to_fraction_string(const Rational& q);

double to_double(const Rational& q);

/// Natural logarithm of a positive rational, accurate for huge numerators/denominators.
double log_of(const Rational& q);

/// Exact conversion of a finite double.
Rational from_double(double value);

/// The shortest decimal that round-trips to `value`, as an exact rational (0.02 -> 1/50).
Rational decimal_rational(double value);

RationalMatrix identity_matrix(std::size_t k);
RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix matrix_power(const RationalMatrix& a, std::int64_t exponent);
RationalVector row_times_matrix(const RationalVector& v, const RationalMatrix& m);

}  // namespace seqent

#include "seqent/rational.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "seqent/error.hpp"

namespace seqent {
namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

double log_of_integer(const mpz_class& z) {
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den.find('-') != std::string_view::npos) {
    throw ConfigError("malformed rational \"" + std::string(text) + "\"");
  }
  mpz_class n(std::string(num[0] == '+' ? num.substr(1) : num));
  mpz_class d(std::string(den[0] == '+' ? den.substr(1) : den));
  if (d == 0) throw ConfigError("rational \"" + std::string(text) + "\" has zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

double log_of(const Rational& q) {
  if (sgn(q) <= 0) throw InvalidArgument("log_of: argument must be positive");
  return log_of_integer(q.get_num()) - log_of_integer(q.get_den());
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("from_double: non-finite value");
  return Rational(value);
}

Rational decimal_rational(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("decimal_rational: non-finite value");
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific);
  const std::string text(buf.data(), res.ptr);
  const auto e = text.find('e');
  std::string digits;
  int frac_digits = 0;
  bool after_point = false;
  for (char c : text.substr(0, e)) {
    if (c == '.') {
      after_point = true;
    } else {
      digits.push_back(c);
      if (after_point) ++frac_digits;
    }
  }
  const int exponent = std::stoi(text.substr(e + 1)) - frac_digits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q(mpz_class(digits), 1);
  if (exponent < 0) q /= scale; else q *= scale;
  q.canonicalize();
  return q;
}

RationalMatrix identity_matrix(std::size_t k) {
  RationalMatrix id(k, RationalVector(k, Rational(0)));
  for (std::size_t i = 0; i < k; ++i) id[i][i] = 1;
  return id;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  RationalMatrix out(n, RationalVector(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < b.size(); ++l) {
      if (sgn(a[i][l]) == 0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
    }
  }
  return out;
}

RationalMatrix matrix_power(const RationalMatrix& a, std::int64_t exponent) {
  if (exponent < 0) throw InvalidArgument("matrix_power: negative exponent");
  RationalMatrix result = identity_matrix(a.size());
  RationalMatrix base = a;
  while (exponent > 0) {
    if (exponent & 1) result = multiply(result, base);
    exponent >>= 1;
    if (exponent > 0) base = multiply(base, base);
  }
  return result;
}

RationalVector row_times_matrix(const RationalVector& v, const RationalMatrix& m) {
  const std::size_t k = m.empty() ? 0 : m[0].size();
  RationalVector out(k, Rational(0));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) == 0) continue;
    for (std::size_t j = 0; j < k; ++j) out[j] += v[i] * m[i][j];
  }
  return out;
}

}  // namespace seqent

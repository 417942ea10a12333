#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace qmlab {

/// Exact rational used for every quasimorphism value, bound and level.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument on malformed
/// input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("3" for integers, "-1/2" for negatives).
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

Rational abs(const Rational& q);
Integer floor(const Rational& q);
Rational frac(const Rational& q);  // q - floor(q), in [0,1)

/// Nearest integer, ties rounded away from zero.
Integer round_half_away(const Rational& q);

/// Throws std::overflow_error when z does not fit.
std::int64_t to_int64(const Integer& z);

static_assert(sizeof(long) == sizeof(std::int64_t), "GMP bridging assumes LP64");

inline Rational make_rational(std::int64_t p, std::int64_t q = 1) {
  Rational r{Integer{static_cast<long>(p)}, Integer{static_cast<long>(q)}};
  r.canonicalize();
  return r;
}

inline Rational from_int64(std::int64_t v) { return Rational{Integer{static_cast<long>(v)}}; }

}  // namespace qmlab

#include "qmlab/rational.hpp"

#include <stdexcept>

namespace qmlab {

namespace {

bool valid_integer_text(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string{s};
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  auto slash = s.find('/');
  std::string num = slash == std::string::npos ? s : trim(std::string_view{s}.substr(0, slash));
  std::string den = slash == std::string::npos ? "1" : trim(std::string_view{s}.substr(slash + 1));
  if (!num.empty() && num.front() == '+') num.erase(0, 1);
  if (!valid_integer_text(num) || !valid_integer_text(den) || den.front() == '-')
    throw std::invalid_argument("malformed rational: '" + std::string{text} + "'");
  Integer p{num}, q{den};
  if (q == 0) throw std::invalid_argument("zero denominator: '" + std::string{text} + "'");
  Rational r{p, q};
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) { return q.get_str(); }
std::string to_string(const Integer& z) { return z.get_str(); }

Rational abs(const Rational& q) { return q < 0 ? Rational{-q} : q; }

Integer floor(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational frac(const Rational& q) { return q - Rational{floor(q)}; }

Integer round_half_away(const Rational& q) {
  Rational a = abs(q);
  Integer r = floor(a + Rational{1, 2});
  return q < 0 ? Integer{-r} : r;
}

std::int64_t to_int64(const Integer& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits: " + z.get_str());
  return z.get_si();
}

}  // namespace qmlab

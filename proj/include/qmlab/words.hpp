#pragma once

#include "qmlab/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmlab {

/// Finitely generated groups with a solvable normal form: free groups and
/// free products of cyclic groups. A factor order of 0 means infinite cyclic.
class Presentation {
 public:
  enum class Kind { free, cyclic_free_product };

  static Presentation free(int rank, std::vector<std::string> names = {});
  static Presentation cyclic_free_product(std::vector<int> orders, std::vector<std::string> names = {});
  /// Z/2 * Z/3 with generators S (order 2) and R (order 3).
  static Presentation psl2z();

  Kind kind() const { return kind_; }
  std::size_t generator_count() const { return orders_.size(); }
  int order(std::size_t gen) const { return orders_.at(gen); }
  const std::vector<int>& orders() const { return orders_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t gen) const { return names_.at(gen); }

  bool is_free() const { return kind_ == Kind::free; }
  bool is_psl2z() const;

  std::string describe() const;

  bool operator==(const Presentation&) const = default;

 private:
  Presentation(Kind kind, std::vector<int> orders, std::vector<std::string> names);

  Kind kind_;
  std::vector<int> orders_;
  std::vector<std::string> names_;
};

using PresentationRef = std::shared_ptr<const Presentation>;

PresentationRef make_presentation(Presentation p);
/// Shared Z/2 * Z/3 instance used by matrix conversions.
const PresentationRef& psl2z_presentation();

/// One syllable g^e of a normal form.
struct Letter {
  std::int32_t gen = 0;
  std::int64_t exp = 0;

  auto operator<=>(const Letter&) const = default;
};

/// Group element stored in normal form. Free factors are freely reduced;
/// finite factors keep exponents in {1, ..., order-1}; adjacent syllables
/// always come from distinct generators. The empty word is the identity.
class Word {
 public:
  explicit Word(PresentationRef p);

  static Word generator(PresentationRef p, std::size_t gen, std::int64_t exp = 1);
  static Word from_letters(PresentationRef p, std::span<const Letter> letters);

  const Presentation& presentation() const { return *pres_; }
  const PresentationRef& presentation_ref() const { return pres_; }
  std::span<const Letter> letters() const { return letters_; }

  bool is_identity() const { return letters_.empty(); }

  /// Letter count: |exp| for infinite-order syllables, 1 for finite-order ones.
  std::size_t length() const;

  /// Right-multiplies by g^e and restores normal form.
  void push_back(Letter l);

  bool operator==(const Word& other) const;

  std::size_t hash() const;

 private:
  PresentationRef pres_;
  std::vector<Letter> letters_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return w.hash(); }
};

/// Throws std::domain_error when the presentations differ.
Word multiply(const Word& u, const Word& v);
Word operator*(const Word& u, const Word& v);
Word invert(const Word& w);
/// w^n by repeated squaring; negative n uses the inverse.
Word power(const Word& w, std::int64_t n);

bool same_group(const Word& u, const Word& v);

/// Shortlex order on the expanded symbol sequence. Symbols are ordered by
/// generator index; within a generator a before a^-1 (infinite order) or by
/// exponent (finite order).
bool shortlex_less(const Word& u, const Word& v);

/// Every normal form of length <= max_length, each exactly once, in shortlex
/// order, starting with the identity.
std::vector<Word> enumerate(const PresentationRef& p, std::size_t max_length);

/// "S R^2 S", "a b^-1"; the identity prints as "1".
std::string format_word(const Word& w);
/// Accepts juxtaposed or space separated generator names with optional
/// "^exp"; "1" or an empty string is the identity. Throws
/// std::invalid_argument on unknown symbols.
Word parse_word(const PresentationRef& p, std::string_view text);

/// PSL2(Z) element as a 2x2 integer matrix, sign-normalized so that the first
/// nonzero entry of the first column is positive.
struct IntMatrix {
  Integer a{1}, b{0}, c{0}, d{1};

  static IntMatrix identity() { return {}; }
  static IntMatrix from(long a, long b, long c, long d);

  Integer determinant() const { return a * d - b * c; }
  Integer trace() const { return a + d; }
  IntMatrix normalized() const;
  bool is_identity() const;

  bool operator==(const IntMatrix& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

/// Product followed by sign normalization.
IntMatrix operator*(const IntMatrix& x, const IntMatrix& y);

std::string format_matrix(const IntMatrix& m);
/// "[[a,b],[c,d]]". Throws std::invalid_argument when malformed.
IntMatrix parse_matrix(std::string_view text);

/// S -> [[0,-1],[1,0]], R -> S*T with T = [[1,1],[0,1]].
IntMatrix matrix_of(const Word& w);

/// Inverse of matrix_of, via a Euclidean reduction of the first column.
/// Throws std::domain_error unless det(m) = 1.
Word word_of(const IntMatrix& m);

}  // namespace qmlab

#include "qmlab/words.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

namespace qmlab {

namespace {

std::vector<std::string> default_names(std::size_t n, const std::vector<int>& orders) {
  if (orders == std::vector<int>{2, 3}) return {"S", "R"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    if (n <= 26)
      names.emplace_back(1, static_cast<char>('a' + i));
    else
      names.push_back("x" + std::to_string(i + 1));
  }
  return names;
}

// Position of a symbol in the enumeration alphabet of one generator.
std::int64_t symbol_rank(int order, std::int64_t exp) {
  if (order == 0) return exp > 0 ? 0 : 1;
  return exp - 1;
}

// Expanded symbol sequence as (gen, rank) pairs packed into one integer.
std::vector<std::int64_t> expand(const Word& w) {
  std::vector<std::int64_t> out;
  out.reserve(w.length());
  const auto& p = w.presentation();
  for (const auto& l : w.letters()) {
    int o = p.order(l.gen);
    std::int64_t key = static_cast<std::int64_t>(l.gen) * 1'000'003 + symbol_rank(o, o == 0 ? (l.exp > 0 ? 1 : -1) : l.exp);
    std::int64_t reps = o == 0 ? (l.exp > 0 ? l.exp : -l.exp) : 1;
    for (std::int64_t i = 0; i < reps; ++i) out.push_back(key);
  }
  return out;
}

}  // namespace

Presentation::Presentation(Kind kind, std::vector<int> orders, std::vector<std::string> names)
    : kind_(kind), orders_(std::move(orders)), names_(std::move(names)) {
  if (orders_.empty()) throw std::invalid_argument("presentation needs at least one generator");
  for (int o : orders_)
    if (o < 0 || o == 1) throw std::invalid_argument("factor orders must be >= 2 or infinite (0)");
  if (names_.empty()) names_ = default_names(orders_.size(), orders_);
  if (names_.size() != orders_.size()) throw std::invalid_argument("generator name count does not match rank");
  for (const auto& n : names_) {
    if (n.empty() || n == "1") throw std::invalid_argument("invalid generator name '" + n + "'");
    for (char c : n)
      if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_' && !std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("invalid generator name '" + n + "'");
  }
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (names_[i] == names_[j]) throw std::invalid_argument("duplicate generator name '" + names_[i] + "'");
}

Presentation Presentation::free(int rank, std::vector<std::string> names) {
  if (rank <= 0) throw std::invalid_argument("free rank must be positive");
  return Presentation{Kind::free, std::vector<int>(static_cast<std::size_t>(rank), 0), std::move(names)};
}

Presentation Presentation::cyclic_free_product(std::vector<int> orders, std::vector<std::string> names) {
  return Presentation{Kind::cyclic_free_product, std::move(orders), std::move(names)};
}

Presentation Presentation::psl2z() { return cyclic_free_product({2, 3}, {"S", "R"}); }

bool Presentation::is_psl2z() const {
  return kind_ == Kind::cyclic_free_product && orders_ == std::vector<int>{2, 3};
}

std::string Presentation::describe() const {
  std::string s = is_free() ? "free(" : "cyclic-free-product(";
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (i) s += ",";
    s += names_[i];
    if (!is_free()) s += ":" + (orders_[i] == 0 ? std::string{"inf"} : std::to_string(orders_[i]));
  }
  return s + ")";
}

PresentationRef make_presentation(Presentation p) { return std::make_shared<const Presentation>(std::move(p)); }

const PresentationRef& psl2z_presentation() {
  static const PresentationRef instance = make_presentation(Presentation::psl2z());
  return instance;
}

Word::Word(PresentationRef p) : pres_(std::move(p)) {
  if (!pres_) throw std::invalid_argument("word without presentation");
}

Word Word::generator(PresentationRef p, std::size_t gen, std::int64_t exp) {
  Word w{std::move(p)};
  if (gen >= w.presentation().generator_count()) throw std::out_of_range("generator index out of range");
  w.push_back({static_cast<std::int32_t>(gen), exp});
  return w;
}

Word Word::from_letters(PresentationRef p, std::span<const Letter> letters) {
  Word w{std::move(p)};
  for (const auto& l : letters) {
    if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= w.presentation().generator_count())
      throw std::out_of_range("generator index out of range");
    w.push_back(l);
  }
  return w;
}

std::size_t Word::length() const {
  std::size_t n = 0;
  for (const auto& l : letters_) n += pres_->order(l.gen) == 0 ? static_cast<std::size_t>(l.exp > 0 ? l.exp : -l.exp) : 1;
  return n;
}

void Word::push_back(Letter l) {
  const int o = pres_->order(l.gen);
  if (o > 0) l.exp = ((l.exp % o) + o) % o;
  if (l.exp == 0) return;
  if (!letters_.empty() && letters_.back().gen == l.gen) {
    std::int64_t e = letters_.back().exp + l.exp;
    if (o > 0) e %= o;
    if (e == 0)
      letters_.pop_back();
    else
      letters_.back().exp = e;
    return;
  }
  letters_.push_back(l);
}

bool Word::operator==(const Word& other) const {
  return letters_ == other.letters_ && (pres_ == other.pres_ || *pres_ == *other.pres_);
}

std::size_t Word::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& l : letters_) {
    h ^= std::hash<std::int64_t>{}(l.exp * 31 + l.gen) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool same_group(const Word& u, const Word& v) {
  return u.presentation_ref() == v.presentation_ref() || u.presentation() == v.presentation();
}

Word multiply(const Word& u, const Word& v) {
  if (!same_group(u, v)) throw std::domain_error("multiply: words over different presentations");
  Word r = u;
  for (const auto& l : v.letters()) r.push_back(l);
  return r;
}

Word operator*(const Word& u, const Word& v) { return multiply(u, v); }

Word invert(const Word& w) {
  Word r{w.presentation_ref()};
  auto ls = w.letters();
  for (auto it = ls.rbegin(); it != ls.rend(); ++it) r.push_back({it->gen, -it->exp});
  return r;
}

Word power(const Word& w, std::int64_t n) {
  Word base = n < 0 ? invert(w) : w;
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  Word result{w.presentation_ref()};
  while (k > 0) {
    if (k & 1) result = multiply(result, base);
    k >>= 1;
    if (k) base = multiply(base, base);
  }
  return result;
}

bool shortlex_less(const Word& u, const Word& v) {
  auto lu = u.length(), lv = v.length();
  if (lu != lv) return lu < lv;
  auto eu = expand(u), ev = expand(v);
  return std::lexicographical_compare(eu.begin(), eu.end(), ev.begin(), ev.end());
}

std::vector<Word> enumerate(const PresentationRef& p, std::size_t max_length) {
  // Alphabet in shortlex symbol order.
  std::vector<Letter> alphabet;
  for (std::size_t g = 0; g < p->generator_count(); ++g) {
    int o = p->order(g);
    if (o == 0) {
      alphabet.push_back({static_cast<std::int32_t>(g), 1});
      alphabet.push_back({static_cast<std::int32_t>(g), -1});
    } else {
      for (int e = 1; e < o; ++e) alphabet.push_back({static_cast<std::int32_t>(g), e});
    }
  }

  std::vector<Word> out;
  out.emplace_back(p);
  std::size_t layer_begin = 0, layer_end = 1;
  for (std::size_t len = 1; len <= max_length; ++len) {
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (const auto& sym : alphabet) {
        const auto ls = out[i].letters();
        if (!ls.empty()) {
          const auto& last = ls.back();
          if (last.gen == sym.gen) {
            // Finite factors cannot repeat; free letters must keep their sign.
            if (p->order(sym.gen) != 0 || (last.exp > 0) != (sym.exp > 0)) continue;
          }
        }
        Word w = out[i];
        w.push_back(sym);
        out.push_back(std::move(w));
      }
    }
    layer_begin = layer_end;
    layer_end = out.size();
    if (layer_begin == layer_end) break;
  }
  return out;
}

std::string format_word(const Word& w) {
  if (w.is_identity()) return "1";
  std::string s;
  for (const auto& l : w.letters()) {
    if (!s.empty()) s += ' ';
    s += w.presentation().name(l.gen);
    if (l.exp != 1) s += "^" + std::to_string(l.exp);
  }
  return s;
}

Word parse_word(const PresentationRef& p, std::string_view text) {
  Word w{p};
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (text.substr(i) == "1") return w;
  while (true) {
    skip_ws();
    if (i >= text.size()) break;
    // Longest generator name matching at position i.
    std::size_t best = p->generator_count(), best_len = 0;
    for (std::size_t g = 0; g < p->generator_count(); ++g) {
      const auto& n = p->name(g);
      if (n.size() > best_len && text.substr(i, n.size()) == n) {
        best = g;
        best_len = n.size();
      }
    }
    if (best == p->generator_count())
      throw std::invalid_argument("unknown symbol at position " + std::to_string(i) + " in '" + std::string{text} + "'");
    i += best_len;
    std::int64_t exp = 1;
    skip_ws();
    if (i < text.size() && text[i] == '^') {
      ++i;
      skip_ws();
      std::size_t start = i;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      auto digits = text.substr(start, i - start);
      if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("missing exponent in '" + std::string{text} + "'");
      exp = std::stoll(std::string{digits});
    }
    w.push_back({static_cast<std::int32_t>(best), exp});
  }
  return w;
}

IntMatrix IntMatrix::from(long a, long b, long c, long d) {
  IntMatrix m;
  m.a = a;
  m.b = b;
  m.c = c;
  m.d = d;
  return m.normalized();
}

IntMatrix IntMatrix::normalized() const {
  bool flip = c != 0 ? c < 0 : a < 0;
  if (!flip) return *this;
  IntMatrix m;
  m.a = -a;
  m.b = -b;
  m.c = -c;
  m.d = -d;
  return m;
}

bool IntMatrix::is_identity() const { return normalized() == IntMatrix{}; }

IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
  IntMatrix m;
  m.a = x.a * y.a + x.b * y.c;
  m.b = x.a * y.b + x.b * y.d;
  m.c = x.c * y.a + x.d * y.c;
  m.d = x.c * y.b + x.d * y.d;
  return m.normalized();
}

std::string format_matrix(const IntMatrix& m) {
  return "[[" + m.a.get_str() + "," + m.b.get_str() + "],[" + m.c.get_str() + "," + m.d.get_str() + "]]";
}

IntMatrix parse_matrix(std::string_view text) {
  std::vector<std::string> nums;
  std::string cur;
  for (char ch : text) {
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+') {
      cur += ch;
    } else if (ch == ',' || ch == ']' || ch == '[' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) nums.push_back(std::move(cur));
      cur.clear();
    } else {
      throw std::invalid_argument("malformed matrix '" + std::string{text} + "'");
    }
  }
  if (!cur.empty()) nums.push_back(std::move(cur));
  if (nums.size() != 4) throw std::invalid_argument("matrix needs four entries: '" + std::string{text} + "'");
  IntMatrix m;
  try {
    if (nums[0].front() == '+') nums[0].erase(0, 1);
    m.a = Integer{nums[0]};
    m.b = Integer{nums[1]};
    m.c = Integer{nums[2]};
    m.d = Integer{nums[3]};
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed matrix entry in '" + std::string{text} + "'");
  }
  return m;
}

namespace {

const IntMatrix kS = IntMatrix::from(0, -1, 1, 0);
const IntMatrix kR = IntMatrix::from(0, -1, 1, 1);

// T^k = (S R)^k and T^-k = (R^2 S)^k in PSL2(Z).
void append_translation(Word& w, const Integer& k) {
  if (k == 0) return;
  if (!k.fits_slong_p() || abs(k) > Integer{1'000'000'000})
    throw std::length_error("word_of: parabolic factor too long to expand");
  long n = k.get_si();
  for (long i = 0; i < (n > 0 ? n : -n); ++i) {
    if (n > 0) {
      w.push_back({0, 1});
      w.push_back({1, 1});
    } else {
      w.push_back({1, 2});
      w.push_back({0, 1});
    }
  }
}

}  // namespace

IntMatrix matrix_of(const Word& w) {
  if (!w.presentation().is_psl2z()) throw std::domain_error("matrix_of: presentation is not Z/2 * Z/3");
  IntMatrix m;
  for (const auto& l : w.letters()) {
    if (l.gen == 0) {
      m = m * kS;
    } else {
      for (std::int64_t i = 0; i < l.exp; ++i) m = m * kR;
    }
  }
  return m;
}

Word word_of(const IntMatrix& m) {
  if (m.determinant() != 1) throw std::domain_error("word_of: matrix is not unimodular: " + format_matrix(m));
  Word w{psl2z_presentation()};
  Integer a = m.a, b = m.b, c = m.c, d = m.d;
  while (c != 0) {
    Integer q;
    mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), c.get_mpz_t());
    // N <- S * T^-q * N, recorded on the right as T^q S.
    Integer a1 = a - q * c, b1 = b - q * d;
    append_translation(w, q);
    w.push_back({0, 1});
    a = -c;
    b = -d;
    c = a1;
    d = b1;
  }
  // N = +-[[1, b'],[0, 1]] = T^(a*b) in PSL2(Z).
  append_translation(w, a * b);
  return w;
}

}  // namespace qmlab

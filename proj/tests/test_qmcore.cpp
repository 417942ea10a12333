#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmlab/qmcore.hpp"

#include <cctype>
#include <random>
#include <string>

using namespace qmlab;

namespace {

// Oracle: spell a free-group word as a string ("a", "A" for a^-1) and count
// overlapping substring matches.
std::string spell(const Word& w) {
  std::string s;
  for (const auto& l : w.letters()) {
    const char c = static_cast<char>((l.exp > 0 ? 'a' : 'A') + l.gen);
    for (std::int64_t i = 0; i < (l.exp > 0 ? l.exp : -l.exp); ++i) s += c;
  }
  return s;
}

std::int64_t count_str(const std::string& text, const std::string& pat) {
  std::int64_t n = 0;
  for (std::size_t pos = text.find(pat); pos != std::string::npos; pos = text.find(pat, pos + 1)) ++n;
  return n;
}

std::string invert_str(const std::string& s) {
  std::string r(s.rbegin(), s.rend());
  for (auto& c : r) c = static_cast<char>(std::islower(c) ? std::toupper(c) : std::tolower(c));
  return r;
}

PresentationRef f2() {
  static const PresentationRef p = make_presentation(Presentation::free(2));
  return p;
}

}  // namespace

TEST_CASE("counting quasimorphism matches string counting") {
  for (const char* pat : {"a", "a b", "a b a^-1", "a^2"}) {
    const Word pattern = parse_word(f2(), pat);
    const Quasimorphism mu = counting_qm(pattern);
    const std::string ps = spell(pattern), pinv = invert_str(ps);
    for (const auto& w : enumerate(f2(), 5)) {
      const std::string s = spell(w);
      CHECK(mu(w) == from_int64(count_str(s, ps) - count_str(s, pinv)));
    }
  }
  CHECK(count_occurrences(parse_word(f2(), "a a a"), parse_word(f2(), "a a")) == 2);
}

TEST_CASE("counting quasimorphism examples") {
  const Quasimorphism mu = counting_qm(parse_word(f2(), "a b"));
  CHECK(mu(Word{f2()}) == 0);
  CHECK(mu(parse_word(f2(), "a b")) == 1);
  CHECK(mu(parse_word(f2(), "b^-1 a^-1")) == -1);
  CHECK(mu(parse_word(f2(), "a b a b")) == 2);
  CHECK(mu(parse_word(f2(), "b a")) == 0);
  REQUIRE(mu.claimed_defect);
  // Defect of a length-2 counting function: exhaustive value doubled.
  CHECK(*mu.claimed_defect == 2 * defect_lower_bound(mu, f2(), 6));
}

TEST_CASE("defect search agrees with a direct oracle") {
  const Quasimorphism mu = counting_qm(parse_word(f2(), "a b"));
  const auto ws = enumerate(f2(), 3);
  Rational oracle = 0;
  for (const auto& x : ws)
    for (const auto& y : ws) {
      const Rational d = abs(mu(x * y) - mu(x) - mu(y));
      if (d > oracle) oracle = d;
    }
  const DefectEstimate s = defect_search(mu, f2(), 3, kernels::Execution::serial);
  const DefectEstimate p = defect_search(mu, f2(), 3, kernels::Execution::parallel);
  CHECK(s.value == oracle);
  CHECK(p.value == oracle);
  REQUIRE(p.x);
  CHECK(abs(mu(*p.x * *p.y) - mu(*p.x) - mu(*p.y)) == oracle);
  CHECK(s.pairs == ws.size() * ws.size());
  CHECK(defect_lower_bound(mu, f2(), 4) >= defect_lower_bound(mu, f2(), 2));
}

TEST_CASE("homomorphisms have zero defect and are their own homogenization") {
  const Quasimorphism h = homomorphism_qm(f2(), {make_rational(3, 2), Rational{-1}});
  CHECK(defect_lower_bound(h, f2(), 4) == 0);
  CHECK(h(parse_word(f2(), "a^2 b a^-1")) == make_rational(1, 2));
  for (const auto& g : enumerate(f2(), 3)) {
    auto r = homogenize(h, g, 14, Rational{0});
    for (const auto& v : r.sequence) CHECK(v == h(g));
    CHECK(r.error_bound == 0);
  }
  auto z23 = make_presentation(Presentation::cyclic_free_product({0, 3}));
  CHECK_NOTHROW(homomorphism_qm(z23, {Rational{1}, Rational{0}}));
  CHECK_THROWS_AS(homomorphism_qm(z23, {Rational{1}, Rational{1}}), std::domain_error);
}

TEST_CASE("homogenization of counting quasimorphisms") {
  const Quasimorphism mu = counting_qm(parse_word(f2(), "a b"));
  const Rational D = *mu.claimed_defect;
  // mu((ab)^n) = n exactly, so every doubling gives 1.
  auto r = homogenize(mu, parse_word(f2(), "a b"), 12, D);
  CHECK(r.value == 1);
  CHECK(r.sequence.size() == 13);
  CHECK(r.error_bound == D / 4096);
  // Gaps between successive doublings never exceed D / 2^k.
  std::mt19937_64 rng{11};
  const auto ws = enumerate(f2(), 4);
  for (int i = 0; i < 30; ++i) {
    const Word& g = ws[rng() % ws.size()];
    auto h = homogenize(mu, g, 10, D);
    Rational n = 1;
    for (std::size_t k = 1; k < h.sequence.size(); ++k) {
      n *= 2;
      CHECK(abs(h.sequence[k] - h.sequence[k - 1]) <= D / n);
    }
  }
  auto v = check_conjugation_invariance(mu, parse_word(f2(), "a b"), parse_word(f2(), "b^-1"), 10, D);
  CHECK(v.holds);
  auto hv = check_homogeneous(mu, parse_word(f2(), "a b a^-1 b"), 3, Rational{0}, 10, D);
  CHECK(hv.holds);
}

TEST_CASE("torsion short-circuits to zero") {
  const auto& p = psl2z_presentation();
  Quasimorphism mu;
  mu.evaluator = [](const Word& w) { return from_int64(static_cast<std::int64_t>(w.length())); };
  auto r = homogenize(mu, parse_word(p, "R"), 8, Rational{1});
  CHECK(r.torsion);
  CHECK(r.value == 0);
  CHECK(r.error_bound == 0);
  CHECK(has_finite_order(parse_word(p, "S")));
  CHECK(has_finite_order(parse_word(p, "R S R^2")));
  CHECK_FALSE(has_finite_order(parse_word(p, "S R")));
}

TEST_CASE("scaling") {
  const Quasimorphism mu = counting_qm(parse_word(f2(), "a b"));
  const Quasimorphism m3 = scaled(mu, Rational{3});
  CHECK(m3(parse_word(f2(), "a b a b")) == 6);
  CHECK(*m3.claimed_defect == 3 * *mu.claimed_defect);
}

TEST_CASE("invalid budgets and inputs") {
  const Quasimorphism mu = counting_qm(parse_word(f2(), "a"));
  CHECK_THROWS_AS(defect_lower_bound(mu, f2(), 0), std::domain_error);
  CHECK_THROWS_AS(homogenize(mu, parse_word(f2(), "a"), 0, Rational{1}), std::domain_error);
  CHECK_THROWS_AS(homogenize(mu, parse_word(f2(), "a"), 63, Rational{1}), std::domain_error);
  CHECK_THROWS_AS(counting_qm(Word{f2()}), std::domain_error);
  CHECK_THROWS_AS(counting_qm(parse_word(psl2z_presentation(), "S R")), std::domain_error);
  CHECK_THROWS_AS(check_homogeneous(mu, parse_word(f2(), "a"), 0, Rational{0}, 4, Rational{1}), std::domain_error);
}

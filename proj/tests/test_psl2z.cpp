#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "qmlab/psl2z.hpp"

#include <random>

using namespace qmlab;

namespace {

Word w(const char* s) { return parse_word(psl2z_presentation(), s); }

// Oracle: count on the formatted normal form, token by token.
std::int64_t count_tokens(const Word& x) {
  const std::string s = format_word(x) + " ";
  std::int64_t n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t end = s.find(' ', pos);
    const std::string tok = s.substr(pos, end - pos);
    if (tok == "R") ++n;
    if (tok == "R^2") --n;
    pos = end + 1;
  }
  return n;
}

}  // namespace

TEST_CASE("counting examples") {
  CHECK(rademacher_counting(w("1")) == 0);
  CHECK(rademacher_counting(w("S")) == 0);
  CHECK(rademacher_counting(w("R")) == 1);
  CHECK(rademacher_counting(w("R^2")) == -1);
  CHECK(rademacher_counting(power(w("S R"), 3)) == 3);
  CHECK(format_word(power(w("S R"), 3)) == "S R S R S R");
  CHECK(rademacher_counting(w("S R S R^2")) == 0);
  for (const auto& x : enumerate(psl2z_presentation(), 7)) CHECK(rademacher_counting(x) == count_tokens(x));
  auto f2 = make_presentation(Presentation::free(2));
  CHECK_THROWS_AS(rademacher_counting(parse_word(f2, "a")), std::domain_error);
}

TEST_CASE("well defined on the group: matrix round trip and relators") {
  std::mt19937_64 rng{5};
  for (const auto& x : enumerate(psl2z_presentation(), 8)) {
    CHECK(rademacher_counting(word_of(matrix_of(x))) == rademacher_counting(x));
    // Inserting relators S^2 and R^3 into a representative changes nothing.
    const auto ls = x.letters();
    const std::size_t cut = ls.empty() ? 0 : rng() % (ls.size() + 1);
    Word y{psl2z_presentation()};
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (i == cut) {
        y.push_back({0, 1});
        y.push_back({0, 1});
        y.push_back({1, 1});
        y.push_back({1, 2});
      }
      y.push_back(ls[i]);
    }
    CHECK(rademacher_counting(y) == rademacher_counting(x));
  }
}

TEST_CASE("defect: exhaustive, monotone, certified bound holds further out") {
  // Direct oracle at length 3.
  const auto ws = enumerate(psl2z_presentation(), 3);
  std::int64_t oracle = 0;
  for (const auto& x : ws)
    for (const auto& y : ws)
      oracle = std::max(oracle, std::abs(rademacher_counting(x * y) - rademacher_counting(x) - rademacher_counting(y)));
  CHECK(rademacher_defect(3) == from_int64(oracle));
  const Rational v2 = rademacher_defect(2), v4 = rademacher_defect(4);
  CHECK(v2 >= 0);
  CHECK(v4 >= v2);
  CHECK(rademacher_defect(3, kernels::Execution::serial) == rademacher_defect(3, kernels::Execution::parallel));
  const Rational certified = *rademacher_qm().claimed_defect;
  CHECK(certified == 2 * rademacher_defect(6));
  CHECK(rademacher_defect(8) <= certified);
  CHECK_THROWS_AS(rademacher_defect(1), std::domain_error);
}

TEST_CASE("homogenization through matrices") {
  for (const char* t : {"S", "R", "R^2", "S R S", "R S R^2"}) {
    const auto h = homogenized_rademacher(w(t), 12);
    CHECK(h.torsion);
    CHECK(h.value == 0);
  }
  const auto h = homogenized_rademacher(w("S R"), 14);
  CHECK(h.value == 1);
  CHECK_FALSE(h.torsion);
  const auto h10 = homogenized_rademacher(w("S R"), 10);
  CHECK(abs(h10.value - h.value) <= h10.error_bound + h.error_bound);
  // Homogeneity on the same base.
  const auto h2 = homogenized_rademacher(power(w("S R"), 2), 12);
  const auto h1 = homogenized_rademacher(w("S R"), 12);
  CHECK(abs(h2.value - 2 * h1.value) <= h2.error_bound + 2 * h1.error_bound);
  // Word input and matrix input agree.
  const auto hm = homogenized_rademacher(matrix_of(w("S R S R^2 S R")), 12);
  const auto hw = homogenize(rademacher_qm(), w("S R S R^2 S R"), 12, *rademacher_qm().claimed_defect);
  CHECK(hm.value == hw.value);
  // Parabolic T = [[1,1],[0,1]] is S R.
  CHECK(homogenized_rademacher(IntMatrix::from(1, 1, 0, 1), 12).value == 1);
  CHECK_THROWS_AS(homogenized_rademacher(IntMatrix::from(1, 1, 1, 1), 4), std::domain_error);
}

TEST_CASE("conjugation invariance of the homogenization") {
  const Rational D = *rademacher_qm().claimed_defect;
  for (const char* g : {"S R", "S R^2 S R S R", "R S R S R^2"})
    for (const auto& t : enumerate(psl2z_presentation(), 4)) {
      const Word c = t * w(g) * invert(t);
      const auto a = homogenized_rademacher(w(g), 10, D);
      const auto b = homogenized_rademacher(c, 10, D);
      CHECK(abs(a.value - b.value) <= a.error_bound + b.error_bound);
    }
}

TEST_CASE("ladder built from the counting function") {
  const auto e = build_psl2z_ladder(8);
  CHECK(e.level_of(w("R")) == 1);
  CHECK(e.level_of(w("S")) == 0);
  for (const auto& x : e.words()) CHECK(e.level_of(x) == rademacher_counting(x));
  // Torsion orbits stay in a window no wider than B.
  for (const char* t : {"S", "R", "R^2 S R"}) {
    const auto levels = e.orbit_levels(w(t), 12);
    const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end());
    CHECK(from_int64(*hi - *lo) <= e.B());
  }
  CHECK(reconstruct_mu(e, w("S R"), 64) > 0);
  CHECK(verify_triple(e.triple(), 3).passed);

  PipelineBudgets<Word> b;
  b.generators = {w("S"), w("R")};
  b.C0 = e.certified_root_bound();
  b.validation_length = 4;
  const auto res = triple_pipeline(e.action(), e.triple(), b);
  REQUIRE(res.ok);
  // From the basepoint 1 the produced quasimorphism is exactly mu0.
  for (const auto& x : enumerate(psl2z_presentation(), 5)) CHECK((*res.mu)(x) == rademacher_counting(x));
}

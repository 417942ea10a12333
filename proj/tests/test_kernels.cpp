#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmlab/kernels.hpp"

#include <random>
#include <stdexcept>
#include <vector>

using namespace qmlab;
using namespace qmlab::kernels;

namespace {

std::vector<Rational> random_values(std::size_t n, std::uint64_t seed, int range) {
  std::mt19937_64 rng{seed};
  std::uniform_int_distribution<int> num{-range, range}, den{1, 7};
  std::vector<Rational> v(n);
  for (auto& x : v) x = make_rational(num(rng), den(rng));
  return v;
}

}  // namespace

TEST_CASE("max sweeps: serial and parallel agree, including witnesses") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    // A small range forces ties, which must resolve to the smallest index.
    const auto v = random_values(500, seed, 3);
    auto f = [&](std::size_t i) -> std::optional<Rational> {
      if (i % 11 == 5) return std::nullopt;
      return v[i];
    };
    const ArgMax s = max_serial(v.size(), f), p = max_parallel(v.size(), f);
    CHECK(s.value == p.value);
    CHECK(s.i == p.i);
    CHECK(s.evaluated == p.evaluated);
    CHECK(s.skipped == p.skipped);
    // Oracle: first index attaining the maximum.
    std::size_t best = 0;
    while (best % 11 == 5) ++best;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (i % 11 != 5 && v[i] > v[best]) best = i;
    CHECK(s.i == best);
  }
}

TEST_CASE("pair sweeps agree") {
  const auto a = random_values(60, 3, 5), b = random_values(70, 4, 5);
  auto f = [&](std::size_t i, std::size_t j) -> std::optional<Rational> {
    if ((i + j) % 13 == 0) return std::nullopt;
    return abs(a[i] - b[j]);
  };
  const ArgMax s = max_pairs_serial(a.size(), b.size(), f), p = max_pairs_parallel(a.size(), b.size(), f);
  CHECK(s.value == p.value);
  CHECK(s.i == p.i);
  CHECK(s.j == p.j);
  CHECK(s.evaluated == p.evaluated);
  CHECK(s.skipped == p.skipped);
}

TEST_CASE("spread: max-min reduction equals the naive triple loop") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto v = random_values(40 * 30, seed, 9);
    auto f = [&](std::size_t i, std::size_t j) -> std::optional<Rational> {
      if (j % 7 == 3) return std::nullopt;
      return v[i * 30 + j];
    };
    const ArgMax s = spread_naive(40, 30, f), p = spread_parallel(40, 30, f);
    CHECK(s.value == p.value);
    CHECK(s.i == p.i);
    // The parallel witness attains the same spread.
    CHECK(abs(*f(p.i, p.j) - *f(p.i, p.k)) == p.value);
  }
}

TEST_CASE("empty and fully skipped sweeps") {
  auto none = [](std::size_t) -> std::optional<Rational> { return std::nullopt; };
  CHECK_FALSE(max_parallel(10, none).found);
  CHECK(max_parallel(10, none).skipped == 10);
  CHECK_FALSE(max_serial(0, none).found);
  auto none2 = [](std::size_t, std::size_t) -> std::optional<Rational> { return std::nullopt; };
  CHECK_FALSE(spread_parallel(5, 5, none2).found);
}

TEST_CASE("exceptions inside parallel regions reach the caller") {
  auto f = [](std::size_t i) -> std::optional<Rational> {
    if (i == 77) throw std::domain_error("boom");
    return Rational{0};
  };
  CHECK_THROWS_AS(max_parallel(200, f), std::domain_error);
  auto g = [](std::size_t i, std::size_t) -> std::optional<Rational> {
    if (i == 3) throw std::runtime_error("boom");
    return Rational{0};
  };
  CHECK_THROWS_AS(spread_parallel(10, 10, g), std::runtime_error);
}

TEST_CASE("dispatch") {
  const auto v = random_values(100, 9, 50);
  auto f = [&](std::size_t i) { return std::optional<Rational>{v[i]}; };
  CHECK(max_over(Execution::serial, v.size(), f).value == max_over(Execution::parallel, v.size(), f).value);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmlab/circle.hpp"

#include <random>

using namespace qmlab;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return make_rational(p, d); }

// Oracle: evaluate a periodic piecewise-linear map from its knots by a linear
// scan over the two neighbouring periods.
Rational pl_oracle(const std::vector<Knot>& knots, const Rational& x) {
  std::vector<Knot> ext;
  for (int shift = -1; shift <= 1; ++shift)
    for (const auto& k : knots) ext.emplace_back(k.first + shift, k.second + shift);
  const Integer n = floor(x);
  const Rational t = x - Rational{n};
  for (std::size_t i = 0; i + 1 < ext.size(); ++i)
    if (ext[i].first <= t && t < ext[i + 1].first)
      return ext[i].second + (t - ext[i].first) * (ext[i + 1].second - ext[i].second) / (ext[i + 1].first - ext[i].first) +
             Rational{n};
  throw std::logic_error("pl_oracle: no segment");
}

// Not a rotation, but 0 -> 1/3 -> 2/3 -> 1 is a periodic orbit, so tau = 1/3.
const std::vector<Knot> kSkew{{q(0), q(1, 3)}, {q(1, 6), q(5, 12)}, {q(1, 3), q(2, 3)}, {q(2, 3), q(1)}};
// No short periodic orbit (tau is about 0.1307).
const std::vector<Knot> kDrift{{q(0), q(1, 10)}, {q(1, 3), q(1, 2)}, {q(3, 4), q(7, 8)}};

MonotoneTripleAction lattice_rotation(std::int64_t N, const Rational& angle) {
  return {lattice_triple(N), lift_action({CircleLift::rotation(angle)})};
}

}  // namespace

TEST_CASE("evaluation matches the oracle") {
  const auto f = CircleLift::piecewise_linear(kSkew);
  for (std::int64_t i = -40; i <= 40; ++i) {
    const Rational x = q(i, 7);
    CHECK(f(x) == pl_oracle(kSkew, x));
    CHECK(f(x + 1) == f(x) + 1);
  }
  CHECK(CircleLift::rotation(q(2, 5))(q(1, 2)) == q(9, 10));
}

TEST_CASE("inverse, composition and powers") {
  const auto f = CircleLift::piecewise_linear(kSkew);
  const auto g = CircleLift::piecewise_linear({{q(0), q(0)}, {q(1, 2), q(1, 4)}});
  const auto r = CircleLift::rotation(q(1, 3));
  for (std::int64_t i = -20; i <= 20; ++i) {
    const Rational x = q(i, 9);
    CHECK(f.inverse()(f(x)) == x);
    CHECK(f.compose(g)(x) == f(g(x)));
    CHECK(g.compose(r)(x) == g(r(x)));
    CHECK(r.compose(f)(x) == r(f(x)));
    CHECK(f.power(3)(x) == f(f(f(x))));
    CHECK(f.power(-2)(x) == f.inverse()(f.inverse()(x)));
  }
  CHECK(same_lift(f.compose(f.inverse()), CircleLift::rotation(0)));
  CHECK(same_lift(r.power(3), CircleLift::rotation(1)));
  CHECK(f.compose(f.inverse()).is_rotation());
  CHECK_FALSE(f.is_rotation());
  CHECK(same_lift(CircleLift::piecewise_linear({{q(0), q(1, 4)}, {q(1, 2), q(3, 4)}}), CircleLift::rotation(q(1, 4))));
}

TEST_CASE("lift validation") {
  CHECK_THROWS_AS(CircleLift::piecewise_linear({{q(0), q(1, 2)}, {q(1, 2), q(1, 4)}}), std::invalid_argument);
  CHECK_THROWS_AS(CircleLift::piecewise_linear({{q(0), q(0)}, {q(1, 2), q(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(CircleLift::piecewise_linear({{q(1), q(0)}}), std::invalid_argument);
  CHECK_THROWS_AS(CircleLift::sampled({{q(0), q(1, 3)}}), std::invalid_argument);
  const auto s = CircleLift::sampled({{q(0), q(1, 2)}, {q(1, 2), q(1)}});
  CHECK(s(q(5, 2)) == q(3));
  CHECK_THROWS_AS(s(q(1, 3)), std::domain_error);
}

TEST_CASE("translation numbers of rotations are exact") {
  std::mt19937_64 rng{2024};
  for (int i = 0; i < 20; ++i) {
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 100);
    const std::int64_t p = static_cast<std::int64_t>(rng() % 201) - 100;
    const auto t = translation_number(CircleLift::rotation(q(p, d)));
    CHECK(t.exact);
    CHECK(t.tau == q(p, d));
    CHECK(t.error_bound == 0);
  }
}

TEST_CASE("translation number through a periodic orbit") {
  // Rotation by 1/3 on a 3-point table.
  const auto s = CircleLift::sampled({{q(0), q(1, 3)}, {q(1, 3), q(2, 3)}, {q(2, 3), q(1)}});
  auto t = translation_number(s);
  CHECK(t.exact);
  CHECK(t.tau == q(1, 3));

  // Oracle for a non-rotation: f^3(0) = 0 + 1 under the independent evaluator
  // puts a periodic orbit through 0, so tau = 1/3.
  const auto f = CircleLift::piecewise_linear(kSkew);
  Rational x = 0;
  for (int i = 0; i < 3; ++i) x = pl_oracle(kSkew, x);
  REQUIRE(x == 1);
  t = translation_number(f);
  CHECK(t.exact);
  CHECK(t.tau == x / 3);
  CHECK(t.error_bound == 0);

  const auto it = translation_number(f, {TauOptions::Mode::iterative, 1024, 0});
  CHECK(it.error_bound == q(1, 1024));
  CHECK(abs(it.tau - t.tau) <= it.error_bound);
}

TEST_CASE("exact mode falls back when no periodic point is found") {
  const auto drift = translation_number(CircleLift::piecewise_linear(kDrift), {TauOptions::Mode::exact, 64});
  CHECK(drift.fell_back);
  CHECK(drift.error_bound == q(1, 64));
  const auto f = CircleLift::piecewise_linear(kSkew);
  TauOptions o;
  o.max_period = 0;
  o.n = 256;
  const auto t = translation_number(f, o);
  CHECK(t.fell_back);
  CHECK_FALSE(t.exact);
  CHECK(t.error_bound == q(1, 256));
}

TEST_CASE("tau is homogeneous") {
  const auto f = CircleLift::piecewise_linear(kSkew);
  for (std::int64_t k : {2, 3, -1, -4}) {
    const auto v = tau_homogeneity_check(f, k);
    CHECK(v.holds);
    CHECK(v.observed == 0);
    CHECK(v.allowed == 0);
  }
  CHECK(tau_homogeneity_check(CircleLift::rotation(q(3, 7)), 5).observed == 0);
  CHECK_THROWS_AS(tau_homogeneity_check(f, 0), std::domain_error);
}

TEST_CASE("path-integral level function") {
  const auto d = Density::step({{q(0), q(2)}, {q(1, 2), q(0)}});
  CHECK(d.total() == 1);
  CHECK(path_integral_h(d, q(1, 4)) == q(1, 2));
  CHECK(path_integral_h(d, q(3, 4)) == 1);
  CHECK(path_integral_h(d, q(-1, 4)) == 0);
  CHECK(path_integral_h(d, q(5, 2)) == 3);
  // Oracle: midpoint sums are exact for step and linear densities on each piece.
  const auto pl = Density::piecewise_linear({{q(0), q(0)}, {q(1, 2), q(2)}});
  CHECK(pl.total() == 1);
  CHECK(pl.integral_to(q(1, 4)) == q(1, 8));
  CHECK(pl.integral_to(q(3, 4)) == q(3, 4) + q(1, 8));
  CHECK_THROWS_AS(Density::step({{q(0), q(-1)}}), std::domain_error);
  CHECK_THROWS_AS(Density::step({{q(1, 2), q(1)}}), std::invalid_argument);
}

TEST_CASE("density triple: b = 0 exactly when the integral is 1") {
  const auto good = density_triple(Density::step({{q(0), q(3, 2)}, {q(1, 2), q(1, 2)}}));
  const auto rep = verify_triple(good, 8);
  CHECK(rep.passed);
  CHECK(rep.max_b == 0);
  const auto bad = density_triple(Density::step({{q(0), q(3, 2)}}));
  CHECK_FALSE(verify_triple(bad, 4).passed);
  // A density vanishing on [1/2, 1) pins h = 1 on half of F_0.
  const auto flat = verify_triple(density_triple(Density::step({{q(0), q(2)}, {q(1, 2), q(0)}})), 8);
  CHECK(flat.max_b == 0);
  CHECK_FALSE(flat.find("h-range")->passed);
}

TEST_CASE("monotone conditions on lift actions") {
  const auto act = lattice_rotation(5, q(2, 5));
  std::vector<Rational> sample;
  for (std::int64_t i = -10; i <= 10; ++i) sample.push_back(q(i, 5));
  const auto words = enumerate(act.action.group, 2);
  const auto rep = check_monotone_conditions(act, sample, words);
  CHECK(rep.passed);

  // Negative control (a): an order-reversing map.
  auto reversed = act;
  reversed.action.act = [](const Word& g, const Rational& x) {
    return std::optional<Rational>{g.is_identity() ? x : -x};
  };
  const auto ra = check_monotone_conditions(reversed, sample, words);
  CHECK_FALSE(ra.order.passed);
  CHECK_FALSE(ra.order.witness.empty());

  // Negative control (c): b = 1/4.
  auto shifted = act;
  shifted.triple.h = [](const Rational& x) -> Rational { return x + make_rational(floor(x).get_si() % 2 == 0 ? 0 : 1, 4); };
  const auto rc = check_monotone_conditions(shifted, sample, words);
  CHECK_FALSE(rc.zero_cocycle.passed);
  const auto& w = rc.zero_cocycle.witness;
  CHECK((w.find("b=1/4") != std::string::npos || w.find("b=-1/4") != std::string::npos));

  // (b): collapsing h merges points the action separates.
  auto collapsed = act;
  collapsed.triple.h = [](const Rational& x) { return Rational{floor(x)}; };
  const auto rb = check_monotone_conditions(collapsed, sample, words);
  CHECK_FALSE(rb.level_sets.passed);
}

TEST_CASE("width theorem and extension to the line") {
  const auto act = lattice_rotation(3, q(1, 3));
  const Word g = Word::generator(act.action.group, 0);
  const auto c = width_theorem_check(act, g, 3);
  CHECK(c.passed);
  CHECK(c.C0 == 1);
  CHECK(c.width == q(2, 3));
  const auto f = extend_to_line(act, g, 3);
  CHECK(same_lift(f, CircleLift::rotation(q(1, 3))));
  CHECK(f.kind() == CircleLift::Kind::piecewise_linear);

  const auto skew = MonotoneTripleAction{density_triple(Density::step({{q(0), q(1)}})),
                                         lift_action({CircleLift::piecewise_linear(kSkew)})};
  const Word s = Word::generator(skew.action.group, 0);
  // mu(g^n)/n from the action agrees with the translation number.
  const Rational a = 0;
  const auto gn = power(s, 1024);
  const Rational mu = (skew.triple.h(*skew.action.act(gn, a)) - skew.triple.h(a)) / 1024;
  // The 12-point grid contains every knot, so the extension is the lift itself.
  const auto ext = extend_to_line(skew, s, 12);
  CHECK(same_lift(ext, CircleLift::piecewise_linear(kSkew)));
  const auto tau = translation_number(ext).tau;
  CHECK(abs(mu - tau) <= q(1, 1024));

  auto broken = act;
  broken.action.act = [](const Word&, const Rational& x) { return std::optional<Rational>{-x}; };
  CHECK_THROWS_AS(extend_to_line(broken, g, 3), std::domain_error);
}

TEST_CASE("lattice triple validation") {
  CHECK(verify_triple(lattice_triple(4), 3).passed);
  CHECK(verify_triple(lattice_triple(2, q(1, 4)), 3).passed);
  CHECK_THROWS_AS(lattice_triple(0), std::domain_error);
  CHECK_THROWS_AS(lattice_triple(2, q(1, 2)), std::domain_error);
}

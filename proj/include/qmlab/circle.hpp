#pragma once

// Monotone actions on subsets of the line that commute with x -> x + 1, their
// extension to lifts of circle homeomorphisms, and translation numbers.
// Everything is exact rational arithmetic.

#include "qmlab/qmcore.hpp"
#include "qmlab/rational.hpp"
#include "qmlab/triple.hpp"
#include "qmlab/words.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qmlab {

using Knot = std::pair<Rational, Rational>;

/// Strictly increasing f: R -> R with f(x + 1) = f(x) + 1.
///
/// A rotation is x -> x + angle. A piecewise-linear lift interpolates knots
/// (x_i, y_i) with 0 <= x_0 < ... < x_m < 1 and y_0 < ... < y_m < y_0 + 1,
/// wrapping around periodically. A sampled lift is the same table but only
/// defined on the points x_i + Z, which it must permute.
class CircleLift {
 public:
  enum class Kind { rotation, piecewise_linear, sampled };

  static CircleLift rotation(Rational angle);
  static CircleLift piecewise_linear(std::vector<Knot> knots);
  static CircleLift sampled(std::vector<Knot> table);

  Kind kind() const { return kind_; }
  const Rational& angle() const { return angle_; }
  const std::vector<Knot>& knots() const { return knots_; }

  /// Throws std::domain_error for a sampled lift off its table.
  Rational operator()(const Rational& x) const;

  CircleLift inverse() const;
  /// (*this) o inner.
  CircleLift compose(const CircleLift& inner) const;
  CircleLift power(std::int64_t k) const;

  /// A piecewise-linear lift of slope 1 everywhere is a rotation.
  bool is_rotation() const;

  std::string describe() const;

 private:
  CircleLift(Kind kind, Rational angle, std::vector<Knot> knots);

  Kind kind_;
  Rational angle_;
  std::vector<Knot> knots_;
};

/// Equality of lifts on the union of their knots (exact for rotation and
/// piecewise-linear lifts; on the table for sampled ones).
bool same_lift(const CircleLift& f, const CircleLift& g);

struct TauOptions {
  enum class Mode { exact, iterative };
  Mode mode = Mode::exact;
  std::size_t n = 1024;
  /// Longest orbit searched for a repeated point (sampled lifts).
  std::size_t cycle_bound = 10'000;
  /// Largest period q tried for a point with f^q(x) = x + p (piecewise-linear lifts).
  std::size_t max_period = 64;
};

struct TauResult {
  Rational tau;
  Rational error_bound;
  bool exact = false;
  bool fell_back = false;
  std::string method;
};

/// Exact mode: rotations directly; sampled lifts through a repeated orbit
/// point (x_n - x_m in Z gives tau = (x_n - x_m)/(n - m)); piecewise-linear
/// lifts through an integer p in the range of f^q(x) - x, which forces a
/// periodic point and tau = p/q. Falls back to iterative mode when nothing is
/// found within the budgets. Iterative mode: (f^n(x0) - x0)/n with error 1/n.
TauResult translation_number(const CircleLift& f, const TauOptions& opts = {});

/// |tau(f^k) - k tau(f)| against the combined error bounds.
Verdict tau_homogeneity_check(const CircleLift& f, std::int64_t k, const TauOptions& opts = {});

/// Periodic nonnegative density on [0,1) with exact integrals.
class Density {
 public:
  /// Pieces (start, value); starts begin at 0 and increase strictly.
  static Density step(std::vector<Knot> pieces);
  /// Knots (x, value) with x_0 = 0, interpolated linearly and periodically.
  static Density piecewise_linear(std::vector<Knot> knots);

  /// Integral over [0, t] for t in [0, 1].
  Rational integral_to(const Rational& t) const;
  Rational total() const { return integral_to(Rational{1}); }
  std::string describe() const;

 private:
  enum class Kind { step, piecewise_linear };
  Density(Kind kind, std::vector<Knot> knots);
  Kind kind_;
  std::vector<Knot> knots_;
};

/// One-dimensional path-integral level function with basepoint 0: the
/// infimum over paths is the straight segment, so h(x) = signed integral of
/// the density from 0 to x.
Rational path_integral_h(const Density& density, const Rational& x);

/// X = offset + (1/N) Z, h = id, F_n = [n, n+1).
Triple<Rational> lattice_triple(std::int64_t denominator, Rational offset = 0);
/// X = Q with h = path_integral_h(density); F_0 is sampled on a grid of
/// `truncation` points.
Triple<Rational> density_triple(Density density);

/// The free group on the lifts, acting by evaluation (rightmost letter first).
GAction<Rational> lift_action(std::vector<CircleLift> lifts, std::vector<std::string> names = {});

struct MonotoneTripleAction {
  Triple<Rational> triple;
  GAction<Rational> action;
};

struct MonotoneReport {
  bool passed = true;
  AxiomCheck order{"order", true, {}, {}};
  AxiomCheck level_sets{"level-sets", true, {}, {}};
  AxiomCheck zero_cocycle{"zero-cocycle", true, {}, {}};
};

/// (a) h(gx) >= h(gy) iff h(x) >= h(y); (b) g preserves level sets of h;
/// (c) b = 0. Exact on the sample.
MonotoneReport check_monotone_conditions(const MonotoneTripleAction& act, const std::vector<Rational>& samples,
                                         const std::vector<Word>& g_set,
                                         const std::vector<std::int64_t>& alphas = {-2, -1, 1, 2});

/// Displacement certificate with C0 = 1.
DisplacementCertificate width_theorem_check(const MonotoneTripleAction& act, const Word& g, std::size_t truncation);

/// Piecewise-linear lift through the graph of the induced map on h-values of
/// the truncated F_0. Throws std::domain_error if the data is not monotone.
CircleLift extend_to_line(const MonotoneTripleAction& act, const Word& g, std::size_t truncation);

}  // namespace qmlab

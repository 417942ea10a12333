#pragma once

#include "qmlab/kernels.hpp"
#include "qmlab/rational.hpp"
#include "qmlab/words.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qmlab {

/// A function G -> Q with an optional certified defect bound B, i.e.
/// |mu(xy) - mu(x) - mu(y)| <= B for all x, y. Without a certified bound the
/// defect is only ever estimated from below.
struct Quasimorphism {
  std::function<Rational(const Word&)> evaluator;
  std::optional<Rational> claimed_defect;
  std::string label;

  Rational operator()(const Word& w) const { return evaluator(w); }
};

struct HomogenizationResult {
  Rational value;
  Rational error_bound;
  std::size_t iterations = 0;
  /// mu(g^(2^k)) / 2^k for k = 0..iterations.
  std::vector<Rational> sequence;
  /// Set when g has finite order; the value is then exactly 0.
  bool torsion = false;
};

struct DefectEstimate {
  Rational value;
  std::optional<Word> x, y;
  std::size_t pairs = 0;
};

/// Homomorphism to Q given by per-generator weights. Finite-order generators
/// must carry weight 0.
Quasimorphism homomorphism_qm(const PresentationRef& p, std::vector<Rational> weights);

/// Big-counting quasimorphism on a free group: occurrences of `pattern` minus
/// occurrences of its inverse, as subwords of the reduced word. The claimed
/// defect is twice the exhaustive defect over words of length <= certify_length.
Quasimorphism counting_qm(const Word& pattern, std::size_t certify_length = 6);

/// Overlapping occurrences of `pattern` in the expanded letter sequence of w.
std::int64_t count_occurrences(const Word& w, const Word& pattern);

/// factor * mu, with the claimed defect scaled accordingly.
Quasimorphism scaled(const Quasimorphism& mu, const Rational& factor);

/// max |mu(xy) - mu(x) - mu(y)| over all pairs of words of length <= max_length.
DefectEstimate defect_search(const Quasimorphism& mu, const PresentationRef& p, std::size_t max_length,
                             kernels::Execution exec = kernels::Execution::parallel);

Rational defect_lower_bound(const Quasimorphism& mu, const PresentationRef& p, std::size_t max_length,
                            kernels::Execution exec = kernels::Execution::parallel);

/// Doubling estimate of mu^h(g): mu(g^(2^k))/2^k for k = 0..doublings, with
/// |mu^h(g) - mu(g^n)/n| <= D/n giving error_bound = D / 2^doublings.
/// Elements of finite order short-circuit to exactly 0.
HomogenizationResult homogenize(const Quasimorphism& mu, const Word& g, std::size_t doublings,
                                const Rational& defect_bound);

/// Same estimate from a caller-supplied power oracle: value_at(k) must return
/// mu(g^(2^k)). Used by groups with a cheaper power representation.
HomogenizationResult homogenize_with(const std::function<Rational(std::size_t)>& value_at, std::size_t doublings,
                                     const Rational& defect_bound);

/// Powers g^m, 1 <= m <= this bound, are probed for the identity.
inline constexpr std::int64_t kTorsionProbe = 12;

bool has_finite_order(const Word& g, std::int64_t probe = kTorsionProbe);

struct Verdict {
  bool holds = false;
  Rational observed;  // the compared gap
  Rational allowed;   // the bound it was compared against
};

/// |mu^h(g^k) - k mu^h(g)| <= |k| err(g) + err(g^k) + tolerance.
Verdict check_homogeneous(const Quasimorphism& mu, const Word& g, std::int64_t k, const Rational& tolerance,
                          std::size_t doublings, const Rational& defect_bound);

/// |mu^h(t g t^-1) - mu^h(g)| <= err(t g t^-1) + err(g).
Verdict check_conjugation_invariance(const Quasimorphism& mu, const Word& g, const Word& t, std::size_t doublings,
                                     const Rational& defect_bound);

}  // namespace qmlab

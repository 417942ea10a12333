#pragma once

// (X, h, A)-triples with A = Z, group actions on them, and the checks that
// turn an action into a quasimorphism mu(g) = h(g.a) - h(a).
//
// X is never materialized. A triple hands out a truncated fundamental domain
// F_0 and evaluates h, the domain label and the A-action lazily on points of
// type P. Any operation that would leave the represented part of X returns
// std::nullopt; sweeps count such samples as skipped instead of guessing.

#include "qmlab/kernels.hpp"
#include "qmlab/qmcore.hpp"
#include "qmlab/rational.hpp"
#include "qmlab/words.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace qmlab {

inline std::string describe(std::int64_t n) { return std::to_string(n); }
inline std::string describe(const Rational& q) { return to_string(q); }
inline std::string describe(const Word& w) { return format_word(w); }

class OutOfTruncation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class P>
struct Triple {
  std::string kind;
  std::function<Rational(const P&)> h;
  /// Which fundamental domain F_alpha a point lies in.
  std::function<std::int64_t(const P&)> domain_of;
  /// The A = Z action alpha . x; nullopt outside the represented part of X.
  std::function<std::optional<P>(std::int64_t, const P&)> shift;
  /// A finite portion of F_0 of size governed by the truncation.
  std::function<std::vector<P>(std::size_t)> base_domain;
  /// Homomorphism A -> Z. Only the identity is ever instantiated.
  std::function<std::int64_t(std::int64_t)> rho = [](std::int64_t a) { return a; };
  /// Certified bound on the cocycle error b.
  Rational M0;
};

struct CommutationMode {
  enum class Kind { exact, almost };
  Kind kind = Kind::exact;
  Rational bound;

  static CommutationMode exact() { return {}; }
  static CommutationMode almost(Rational b) { return {Kind::almost, std::move(b)}; }
};

template <class P>
struct GAction {
  std::string label;
  PresentationRef group;
  std::function<std::optional<P>(const Word&, const P&)> act;
  CommutationMode commutation;
};

struct AxiomCheck {
  std::string axiom;
  bool passed = true;
  std::string witness;
  std::string detail;
};

struct TripleReport {
  bool passed = true;
  std::vector<AxiomCheck> checks;
  Rational M0;
  Rational max_b;
  Rational max_domain_width;
  std::size_t points = 0;
  std::size_t skipped = 0;

  const AxiomCheck* find(const std::string& axiom) const {
    for (const auto& c : checks)
      if (c.axiom == axiom) return &c;
    return nullptr;
  }
};

template <class P>
TripleReport verify_triple(const Triple<P>& t, std::size_t truncation) {
  const std::vector<P> f0 = t.base_domain(truncation);
  if (f0.empty()) throw std::domain_error("verify_triple: empty fundamental domain");
  const auto T = static_cast<std::int64_t>(truncation);

  TripleReport rep;
  rep.M0 = t.M0;
  AxiomCheck partition{"partition", true, {}, {}}, bijection{"bijection", true, {}, {}}, range{"h-range", true, {}, {}},
      cocycle{"cocycle", true, {}, {}},
      width{"domain-width", true, {}, {}};
  auto fail = [](AxiomCheck& c, std::string witness, std::string detail) {
    if (!c.passed) return;
    c.passed = false;
    c.witness = std::move(witness);
    c.detail = std::move(detail);
  };

  for (const auto& x : f0) {
    ++rep.points;
    if (t.domain_of(x) != 0) fail(partition, describe(x), "point of F_0 labelled " + std::to_string(t.domain_of(x)));
    const Rational hx = t.h(x);
    if (hx < 0 || hx >= 1) fail(range, describe(x), "h = " + to_string(hx) + " outside [0,1)");
  }

  for (std::int64_t alpha = -T; alpha <= T; ++alpha) {
    std::unordered_set<std::string> images;
    std::optional<Rational> lo, hi;
    for (const auto& x : f0) {
      std::optional<P> y = t.shift(alpha, x);
      if (!y) {
        ++rep.skipped;
        continue;
      }
      if (t.domain_of(*y) != alpha)
        fail(partition, describe(*y),
             "shift by " + std::to_string(alpha) + " landed in F_" + std::to_string(t.domain_of(*y)));
      if (!images.insert(describe(*y)).second)
        fail(bijection, describe(*y), "two points of F_0 map to it under " + std::to_string(alpha));
      std::optional<P> back = t.shift(-alpha, *y);
      if (back && !(*back == x))
        fail(bijection, describe(x), "shift by " + std::to_string(alpha) + " is not inverted by its negative");
      const Rational hy = t.h(*y);
      const Rational b = hy - t.h(x) - from_int64(t.rho(alpha));
      if (abs(b) > rep.max_b) rep.max_b = abs(b);
      if (abs(b) > t.M0)
        fail(cocycle, describe(x), "|b(x," + std::to_string(alpha) + ")| = " + to_string(abs(b)) + " > M0 = " + to_string(t.M0));
      if (!lo || hy < *lo) lo = hy;
      if (!hi || hy > *hi) hi = hy;
    }
    if (lo) {
      const Rational w = *hi - *lo;
      if (w > rep.max_domain_width) rep.max_domain_width = w;
      // h(F_alpha) lies in a window of width 1 + 2 M0 around alpha.
      if (w > 1 + 2 * t.M0)
        fail(width, "F_" + std::to_string(alpha), "h-width " + to_string(w) + " > 1 + 2 M0");
    }
  }

  rep.checks = {partition, bijection, range, cocycle, width};
  for (const auto& c : rep.checks) rep.passed = rep.passed && c.passed;
  return rep;
}

/// mu_a(g) = h(g.a) - h(a).
template <class P>
Rational mu_from_action(const GAction<P>& act, const Triple<P>& t, const P& basepoint, const Word& g) {
  std::optional<P> y = act.act(g, basepoint);
  if (!y) throw OutOfTruncation("mu_from_action: g . a leaves the truncation for g = " + format_word(g));
  return t.h(*y) - t.h(basepoint);
}

template <class P>
struct RootConditionReport {
  Rational observed_B;
  std::optional<Word> g;
  std::optional<P> x, y;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// max over (g, x, y) of |(h(gx) - h(gy)) - (h(x) - h(y))|.
template <class P>
RootConditionReport<P> check_root_condition(const GAction<P>& act, const Triple<P>& t, const std::vector<P>& points,
                                            const std::vector<Word>& g_set,
                                            kernels::Execution exec = kernels::Execution::parallel) {
  if (points.empty() || g_set.empty()) throw std::domain_error("check_root_condition: empty sample");
  auto best = kernels::spread(exec, g_set.size(), points.size(), [&](std::size_t i, std::size_t j) -> std::optional<Rational> {
    std::optional<P> gx = act.act(g_set[i], points[j]);
    if (!gx) return std::nullopt;
    return t.h(*gx) - t.h(points[j]);
  });
  RootConditionReport<P> rep;
  rep.evaluated = best.evaluated;
  rep.skipped = best.skipped;
  if (best.found) {
    rep.observed_B = best.value;
    rep.g = g_set[best.i];
    rep.x = points[best.j];
    rep.y = points[best.k];
  }
  return rep;
}

struct DisplacementCertificate {
  std::optional<Word> g;
  Rational r;
  Rational width;
  Rational C0;
  bool passed = false;
  std::size_t points = 0;
  std::size_t skipped = 0;
};

/// h(g(F_0)) within [r, r + width], r the infimum over the truncated F_0.
template <class P>
DisplacementCertificate displacement_certificate(const GAction<P>& act, const Triple<P>& t, const Word& g,
                                                 std::size_t truncation, const Rational& C0) {
  if (truncation < 1) throw std::domain_error("displacement_certificate: truncation must be >= 1");
  const std::vector<P> f0 = t.base_domain(truncation);
  if (f0.empty()) throw std::domain_error("displacement_certificate: empty fundamental domain");
  DisplacementCertificate c;
  c.g = g;
  c.C0 = C0;
  std::optional<Rational> lo, hi;
  for (const auto& x : f0) {
    std::optional<P> y = act.act(g, x);
    if (!y) {
      ++c.skipped;
      continue;
    }
    ++c.points;
    const Rational v = t.h(*y);
    if (!lo || v < *lo) lo = v;
    if (!hi || v > *hi) hi = v;
  }
  if (!lo) throw std::domain_error("displacement_certificate: every image left the truncation");
  c.r = *lo;
  c.width = *hi - *lo;
  c.passed = c.width <= C0;
  return c;
}

/// max over g of |mu_a1(g) - mu_a2(g)|.
template <class P>
Rational basepoint_independence(const GAction<P>& act, const Triple<P>& t, const P& a1, const P& a2,
                                const std::vector<Word>& g_set,
                                kernels::Execution exec = kernels::Execution::parallel) {
  auto best = kernels::max_over(exec, g_set.size(), [&](std::size_t i) -> std::optional<Rational> {
    std::optional<P> y1 = act.act(g_set[i], a1), y2 = act.act(g_set[i], a2);
    if (!y1 || !y2) return std::nullopt;
    return abs((t.h(*y1) - t.h(a1)) - (t.h(*y2) - t.h(a2)));
  });
  return best.found ? best.value : Rational{0};
}

struct UnboundednessVerdict {
  bool unbounded = false;
  /// h(g^n . a) - h(a) for n = 0..steps.
  std::vector<Rational> levels;
  Rational max_abs;
  Rational threshold;
  std::size_t first_crossing = 0;
  /// levels.back() / steps.
  Rational slope;
};

template <class P>
UnboundednessVerdict unboundedness_check(const GAction<P>& act, const Triple<P>& t, const Word& g, const P& basepoint,
                                         std::size_t n_max, const Rational& threshold = Rational{10}) {
  if (n_max < 2) throw std::domain_error("unboundedness_check: n_max must be >= 2");
  UnboundednessVerdict v;
  v.threshold = threshold;
  const Rational h0 = t.h(basepoint);
  P x = basepoint;
  v.levels.push_back(0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::optional<P> y = act.act(g, x);
    if (!y) throw OutOfTruncation("unboundedness_check: orbit left the truncation at n = " + std::to_string(n));
    x = std::move(*y);
    const Rational lvl = t.h(x) - h0;
    v.levels.push_back(lvl);
    if (abs(lvl) > v.max_abs) v.max_abs = abs(lvl);
    if (!v.unbounded && abs(lvl) > threshold) {
      v.unbounded = true;
      v.first_crossing = n;
    }
  }
  v.slope = v.levels.back() / from_int64(static_cast<std::int64_t>(n_max));
  return v;
}

struct CommutationReport {
  bool passed = true;
  CommutationMode mode;
  /// max |h(g.alpha.x) - h(alpha.g.x)| over the sample.
  Rational observed;
  std::string witness;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

template <class P>
CommutationReport check_commutation(const GAction<P>& act, const Triple<P>& t, const std::vector<P>& points,
                                    const std::vector<Word>& g_set, const std::vector<std::int64_t>& alphas) {
  CommutationReport rep;
  rep.mode = act.commutation;
  for (const auto& g : g_set) {
    for (std::int64_t alpha : alphas) {
      for (const auto& x : points) {
        std::optional<P> ax = t.shift(alpha, x);
        std::optional<P> gx = act.act(g, x);
        std::optional<P> gax = ax ? act.act(g, *ax) : std::nullopt;
        std::optional<P> agx = gx ? t.shift(alpha, *gx) : std::nullopt;
        if (!gax || !agx) {
          ++rep.skipped;
          continue;
        }
        ++rep.evaluated;
        const Rational gap = abs(t.h(*gax) - t.h(*agx));
        const std::string where = "g=" + format_word(g) + " alpha=" + std::to_string(alpha) + " x=" + describe(x);
        if (gap > rep.observed) {
          rep.observed = gap;
          if (act.commutation.kind == CommutationMode::Kind::almost && gap > act.commutation.bound && rep.passed) {
            rep.passed = false;
            rep.witness = where;
          }
        }
        if (act.commutation.kind == CommutationMode::Kind::exact && !(*gax == *agx) && rep.passed) {
          rep.passed = false;
          rep.witness = where;
        }
      }
    }
  }
  return rep;
}

struct ActionAxiomsReport {
  bool passed = true;
  std::string witness;
  std::size_t evaluated = 0;
};

/// act(1, x) = x and act(g g', x) = act(g, act(g', x)) on the sample.
template <class P>
ActionAxiomsReport check_action_axioms(const GAction<P>& act, const std::vector<P>& points,
                                       const std::vector<Word>& g_set) {
  ActionAxiomsReport rep;
  const Word e{act.group};
  for (const auto& x : points) {
    auto ex = act.act(e, x);
    ++rep.evaluated;
    if (ex && !(*ex == x) && rep.passed) {
      rep.passed = false;
      rep.witness = "identity moves " + describe(x);
    }
    for (const auto& g : g_set) {
      for (const auto& g2 : g_set) {
        auto inner = act.act(g2, x);
        if (!inner) continue;
        auto lhs = act.act(multiply(g, g2), x);
        auto rhs = act.act(g, *inner);
        if (!lhs || !rhs) continue;
        ++rep.evaluated;
        if (!(*lhs == *rhs) && rep.passed) {
          rep.passed = false;
          rep.witness = "g=" + format_word(g) + " g'=" + format_word(g2) + " x=" + describe(x);
        }
      }
    }
  }
  return rep;
}

template <class P>
struct PipelineBudgets {
  std::size_t truncation = 3;
  /// Elements whose displacement certificates must share C0.
  std::vector<Word> generators;
  Rational C0;
  std::vector<std::int64_t> alphas{-2, -1, 1, 2};
  /// Defaults to the first point of the truncated F_0.
  std::optional<P> basepoint;
  /// When positive, the produced quasimorphism's claimed defect is checked
  /// against an exhaustive defect search to this word length.
  std::size_t validation_length = 0;
};

template <class P>
struct PipelineResult {
  bool ok = false;
  std::string failure;
  TripleReport triple;
  ActionAxiomsReport axioms;
  CommutationReport commutation;
  std::vector<DisplacementCertificate> displacement;
  Rational M0, C0, beta;
  Rational max_width;
  /// 4 M0 + 1 + C0, plus 2 beta in almost-commutation mode.
  Rational claimed_defect;
  std::optional<Quasimorphism> mu;
  std::optional<DefectEstimate> validation;
};

/// Checks every hypothesis of the triple construction on samples and, if they
/// all hold, returns mu(g) = h(g.a) - h(a) with its claimed defect.
template <class P>
PipelineResult<P> triple_pipeline(const GAction<P>& act, const Triple<P>& t, const PipelineBudgets<P>& b) {
  PipelineResult<P> res;
  res.M0 = t.M0;
  res.C0 = b.C0;
  res.beta = act.commutation.kind == CommutationMode::Kind::almost ? act.commutation.bound : Rational{0};

  res.triple = verify_triple(t, b.truncation);
  if (!res.triple.passed) {
    for (const auto& c : res.triple.checks)
      if (!c.passed) {
        res.failure = "triple axiom '" + c.axiom + "' failed at " + c.witness + ": " + c.detail;
        break;
      }
    return res;
  }

  std::vector<P> sample = t.base_domain(b.truncation);
  const std::size_t f0_size = sample.size();
  for (std::size_t i = 0; i < f0_size; ++i)
    for (std::int64_t alpha : b.alphas)
      if (auto y = t.shift(alpha, sample[i])) sample.push_back(*y);

  res.axioms = check_action_axioms(act, sample, b.generators);
  if (!res.axioms.passed) {
    res.failure = "action axioms failed: " + res.axioms.witness;
    return res;
  }

  res.commutation = check_commutation(act, t, sample, b.generators, b.alphas);
  if (!res.commutation.passed) {
    res.failure = "commutation failed at " + res.commutation.witness + " (observed " + to_string(res.commutation.observed) + ")";
    return res;
  }

  for (const auto& g : b.generators) {
    auto c = displacement_certificate(act, t, g, b.truncation, b.C0);
    if (c.width > res.max_width) res.max_width = c.width;
    res.displacement.push_back(c);
    if (!c.passed) {
      res.failure = "displacement width " + to_string(c.width) + " > C0 = " + to_string(b.C0) + " for g = " + format_word(g);
      return res;
    }
  }

  res.claimed_defect = 4 * t.M0 + 1 + b.C0 + 2 * res.beta;
  Quasimorphism mu;
  mu.label = "triple-mu(" + t.kind + ", " + act.label + ")";
  mu.claimed_defect = res.claimed_defect;
  const P a = b.basepoint ? *b.basepoint : t.base_domain(b.truncation).front();
  mu.evaluator = [act, t, a](const Word& g) { return mu_from_action(act, t, a, g); };
  res.mu = mu;

  if (b.validation_length > 0) {
    res.validation = defect_search(mu, act.group, b.validation_length);
    if (res.validation->value > res.claimed_defect) {
      res.failure = "claimed defect " + to_string(res.claimed_defect) + " violated: observed " + to_string(res.validation->value);
      return res;
    }
  }
  res.ok = true;
  return res;
}

struct GrowthVerdict {
  bool grows = false;
  std::vector<Rational> observed;
  std::string witness;
};

/// Observed root-condition constants over nested samples of increasing radius;
/// `grows` when they strictly increase at every step. Negative control for
/// actions that violate the triple hypotheses.
template <class P>
GrowthVerdict root_condition_growth(const GAction<P>& act, const Triple<P>& t,
                                    const std::function<std::pair<std::vector<P>, std::vector<Word>>(std::size_t)>& sample,
                                    const std::vector<std::size_t>& radii) {
  GrowthVerdict v;
  v.grows = radii.size() >= 2;
  for (std::size_t r : radii) {
    auto [pts, gs] = sample(r);
    auto rep = check_root_condition(act, t, pts, gs);
    if (!v.observed.empty() && rep.observed_B <= v.observed.back()) v.grows = false;
    v.observed.push_back(rep.observed_B);
    if (rep.g)
      v.witness = "g=" + format_word(*rep.g) + " x=" + describe(*rep.x) + " y=" + describe(*rep.y) + " B=" + to_string(rep.observed_B);
  }
  return v;
}

/// X = Z with one point per fundamental domain, h(n) = n, b = 0.
Triple<std::int64_t> trivial_z_triple();
/// Z = F_1 (generator "t") acting on trivial_z_triple by translation.
GAction<std::int64_t> translation_action();

}  // namespace qmlab

#include "qmlab/qmcore.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace qmlab {

namespace {

// One symbol per letter: generator index and sign (free factors) or exponent.
std::vector<std::int64_t> symbols(const Word& w) {
  std::vector<std::int64_t> out;
  out.reserve(w.length());
  const auto& p = w.presentation();
  for (const auto& l : w.letters()) {
    if (p.order(l.gen) == 0) {
      std::int64_t s = l.exp > 0 ? 2 * l.gen : 2 * l.gen + 1;
      for (std::int64_t i = 0; i < (l.exp > 0 ? l.exp : -l.exp); ++i) out.push_back(s);
    } else {
      out.push_back(-(static_cast<std::int64_t>(l.gen) * 1024 + l.exp) - 1);
    }
  }
  return out;
}

std::int64_t count_in(const std::vector<std::int64_t>& text, const std::vector<std::int64_t>& pat) {
  if (pat.empty() || pat.size() > text.size()) return 0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i + pat.size() <= text.size(); ++i) {
    std::size_t j = 0;
    while (j < pat.size() && text[i + j] == pat[j]) ++j;
    if (j == pat.size()) ++n;
  }
  return n;
}

// Exhaustive certification is the dominant cost of counting_qm; results are
// memoized per (presentation, pattern, length).
Rational certified_counting_defect(const Quasimorphism& mu, const Word& pattern, std::size_t length) {
  static std::mutex mutex;
  static std::map<std::string, Rational> cache;
  const std::string key = pattern.presentation().describe() + "|" + format_word(pattern) + "|" + std::to_string(length);
  {
    std::lock_guard lock{mutex};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Rational d = 2 * defect_lower_bound(mu, pattern.presentation_ref(), length);
  std::lock_guard lock{mutex};
  cache.emplace(key, d);
  return d;
}

}  // namespace

std::int64_t count_occurrences(const Word& w, const Word& pattern) {
  if (!same_group(w, pattern)) throw std::domain_error("count_occurrences: different presentations");
  return count_in(symbols(w), symbols(pattern));
}

Quasimorphism homomorphism_qm(const PresentationRef& p, std::vector<Rational> weights) {
  if (weights.size() != p->generator_count()) throw std::invalid_argument("homomorphism_qm: one weight per generator");
  std::string label = "hom(";
  for (std::size_t g = 0; g < weights.size(); ++g) {
    if (p->order(g) != 0 && weights[g] != 0)
      throw std::domain_error("homomorphism_qm: finite-order generator " + p->name(g) + " must have weight 0");
    if (g) label += ",";
    label += p->name(g) + ":" + to_string(weights[g]);
  }
  label += ")";
  Quasimorphism mu;
  mu.label = label;
  mu.claimed_defect = Rational{0};
  mu.evaluator = [p, weights = std::move(weights)](const Word& w) {
    Rational s = 0;
    for (const auto& l : w.letters()) s += weights[static_cast<std::size_t>(l.gen)] * from_int64(l.exp);
    return s;
  };
  return mu;
}

Quasimorphism counting_qm(const Word& pattern, std::size_t certify_length) {
  if (!pattern.presentation().is_free()) throw std::domain_error("counting_qm: presentation must be free");
  if (pattern.is_identity()) throw std::domain_error("counting_qm: empty pattern");
  Quasimorphism mu;
  mu.label = "counting(" + format_word(pattern) + ")";
  mu.evaluator = [fwd = symbols(pattern), back = symbols(invert(pattern))](const Word& w) {
    auto text = symbols(w);
    return from_int64(count_in(text, fwd) - count_in(text, back));
  };
  mu.claimed_defect = certified_counting_defect(mu, pattern, certify_length);
  return mu;
}

Quasimorphism scaled(const Quasimorphism& mu, const Rational& factor) {
  Quasimorphism out;
  out.label = to_string(factor) + "*" + mu.label;
  out.evaluator = [inner = mu.evaluator, factor](const Word& w) { return Rational{factor * inner(w)}; };
  if (mu.claimed_defect) out.claimed_defect = abs(factor) * *mu.claimed_defect;
  return out;
}

DefectEstimate defect_search(const Quasimorphism& mu, const PresentationRef& p, std::size_t max_length,
                             kernels::Execution exec) {
  const std::vector<Word> words = enumerate(p, max_length);
  std::vector<Rational> values(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) values[i] = mu(words[i]);
  auto best = kernels::max_over_pairs(exec, words.size(), words.size(), [&](std::size_t i, std::size_t j) {
    return std::optional<Rational>{abs(mu(multiply(words[i], words[j])) - values[i] - values[j])};
  });
  DefectEstimate est;
  est.pairs = best.evaluated;
  if (best.found) {
    est.value = best.value;
    est.x = words[best.i];
    est.y = words[best.j];
  }
  return est;
}

Rational defect_lower_bound(const Quasimorphism& mu, const PresentationRef& p, std::size_t max_length,
                            kernels::Execution exec) {
  if (max_length < 1) throw std::domain_error("defect_lower_bound: max_length must be >= 1");
  return defect_search(mu, p, max_length, exec).value;
}

HomogenizationResult homogenize_with(const std::function<Rational(std::size_t)>& value_at, std::size_t doublings,
                                     const Rational& defect_bound) {
  if (doublings == 0) throw std::domain_error("homogenize: doublings must be >= 1");
  if (doublings > 62) throw std::domain_error("homogenize: doublings must be <= 62");
  if (defect_bound < 0) throw std::domain_error("homogenize: negative defect bound");
  HomogenizationResult r;
  Rational n = 1;
  for (std::size_t k = 0; k <= doublings; ++k) {
    r.sequence.push_back(value_at(k) / n);
    n *= 2;
  }
  r.iterations = doublings;
  r.value = r.sequence.back();
  r.error_bound = defect_bound / (n / 2);
  return r;
}

bool has_finite_order(const Word& g, std::int64_t probe) {
  if (g.is_identity()) return true;
  Word p = g;
  for (std::int64_t m = 2; m <= probe; ++m) {
    p = multiply(p, g);
    if (p.is_identity()) return true;
  }
  return false;
}

HomogenizationResult homogenize(const Quasimorphism& mu, const Word& g, std::size_t doublings,
                                const Rational& defect_bound) {
  Word current = g;
  std::size_t at = 0;
  auto r = homogenize_with(
      [&](std::size_t k) {
        while (at < k) {
          current = multiply(current, current);
          ++at;
        }
        return mu(current);
      },
      doublings, defect_bound);
  if (has_finite_order(g)) {
    r.torsion = true;
    r.value = 0;
    r.error_bound = 0;
  }
  return r;
}

Verdict check_homogeneous(const Quasimorphism& mu, const Word& g, std::int64_t k, const Rational& tolerance,
                          std::size_t doublings, const Rational& defect_bound) {
  if (k == 0) throw std::domain_error("check_homogeneous: k must be nonzero");
  auto base = homogenize(mu, g, doublings, defect_bound);
  auto pow = homogenize(mu, power(g, k), doublings, defect_bound);
  const Rational kk = from_int64(k);
  Verdict v;
  v.observed = abs(pow.value - kk * base.value);
  v.allowed = abs(kk) * base.error_bound + pow.error_bound + tolerance;
  v.holds = v.observed <= v.allowed;
  return v;
}

Verdict check_conjugation_invariance(const Quasimorphism& mu, const Word& g, const Word& t, std::size_t doublings,
                                     const Rational& defect_bound) {
  auto base = homogenize(mu, g, doublings, defect_bound);
  auto conj = homogenize(mu, multiply(multiply(t, g), invert(t)), doublings, defect_bound);
  Verdict v;
  v.observed = abs(conj.value - base.value);
  v.allowed = conj.error_bound + base.error_bound;
  v.holds = v.observed <= v.allowed;
  return v;
}

}  // namespace qmlab

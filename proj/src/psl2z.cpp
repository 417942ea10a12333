#include "qmlab/psl2z.hpp"

#include <mutex>
#include <stdexcept>

namespace qmlab {

std::int64_t rademacher_counting(const Word& w) {
  if (!w.presentation().is_psl2z()) throw std::domain_error("rademacher_counting: word is not in Z/2 * Z/3");
  std::int64_t n = 0;
  for (const auto& l : w.letters())
    if (l.gen == 1) n += l.exp == 1 ? 1 : -1;
  return n;
}

Quasimorphism rademacher_qm() {
  static std::once_flag once;
  static Rational certified;
  Quasimorphism mu;
  mu.label = "rademacher(#R-#R^2)";
  mu.evaluator = [](const Word& w) { return from_int64(rademacher_counting(w)); };
  std::call_once(once, [] { certified = 2 * rademacher_defect(6); });
  mu.claimed_defect = certified;
  return mu;
}

Rational rademacher_defect(std::size_t max_length, kernels::Execution exec) {
  if (max_length < 2) throw std::domain_error("rademacher_defect: max_length must be >= 2");
  Quasimorphism mu;
  mu.evaluator = [](const Word& w) { return from_int64(rademacher_counting(w)); };
  return defect_lower_bound(mu, psl2z_presentation(), max_length, exec);
}

HomogenizationResult homogenized_rademacher(const IntMatrix& g, std::size_t doublings,
                                            std::optional<Rational> defect_bound) {
  const IntMatrix m = g.normalized();
  if (m.determinant() != 1) throw std::domain_error("homogenized_rademacher: determinant must be 1");
  const Rational D = defect_bound ? *defect_bound : *rademacher_qm().claimed_defect;
  IntMatrix current = m;
  std::size_t at = 0;
  auto r = homogenize_with(
      [&](std::size_t k) {
        while (at < k) {
          current = current * current;
          ++at;
        }
        return from_int64(rademacher_counting(word_of(current)));
      },
      doublings, D);
  const Integer tr = abs(Rational{m.trace()}).get_num();
  if (m.is_identity() || tr <= 1) {
    r.torsion = true;
    r.value = 0;
    r.error_bound = 0;
  }
  return r;
}

HomogenizationResult homogenized_rademacher(const Word& g, std::size_t doublings,
                                            std::optional<Rational> defect_bound) {
  return homogenized_rademacher(matrix_of(g), doublings, std::move(defect_bound));
}

LadderEmbedding build_psl2z_ladder(std::size_t max_length, std::size_t root_length) {
  const auto& p = psl2z_presentation();
  const Word g0 = parse_word(p, "S R");
  return build_embedding(p, integerize(rademacher_qm(), g0), max_length, root_length);
}

}  // namespace qmlab

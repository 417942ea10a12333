#include "qmlab/ladder.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace qmlab {

Rational LadderSpace::h_value(std::size_t slot) {
  Integer den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(slot + 1));
  Rational r{den - 1, den};
  r.canonicalize();
  return r;
}

Rational LadderSpace::d1(const LadderPoint& p, const LadderPoint& q) { return abs(h_value(p.slot) - h_value(q.slot)); }

std::int64_t LadderSpace::d2(const LadderPoint& p, const LadderPoint& q) {
  return p.level > q.level ? p.level - q.level : q.level - p.level;
}

Rational LadderSpace::distance(const LadderPoint& p, const LadderPoint& q) { return d1(p, q) + from_int64(d2(p, q)); }

std::string describe(const LadderPoint& p) {
  return "(" + to_string(LadderSpace::h_value(p.slot)) + "," + std::to_string(p.level) + ")";
}

IntegerizedQM::IntegerizedQM(Quasimorphism base, Word witness, Rational scale,
                             HomogenizationResult witness_homogenization, Rational base_defect,
                             std::int64_t power_range)
    : base_(std::move(base)),
      witness_(std::move(witness)),
      scale_(std::move(scale)),
      witness_hom_(std::move(witness_homogenization)),
      base_defect_(std::move(base_defect)),
      power_range_(power_range) {
  if (scale_ == 0) throw std::domain_error("integerize: zero scale");
  auto powers = std::make_shared<std::unordered_map<Word, std::int64_t, WordHash>>();
  Word up{witness_.presentation_ref()}, down{witness_.presentation_ref()};
  const Word inv = invert(witness_);
  for (std::int64_t n = 1; n <= power_range_; ++n) {
    up = multiply(up, witness_);
    down = multiply(down, inv);
    powers->emplace(up, n);
    powers->emplace(down, -n);
  }
  powers_ = std::move(powers);

  // mu0 = mu/s + e with |e| <= 1/2 off the pinned powers; on g0^n the error is
  // |mu(g0^n)/s - n| <= (D + |n| err)/|s|, and |mu(1)| <= D.
  const Rational s = abs(scale_);
  const Rational pinned = (base_defect_ + from_int64(power_range_) * witness_hom_.error_bound) / s;
  const Rational e_max = std::max(Rational{1, 2}, pinned);
  certified_defect_ = base_defect_ / s + 3 * e_max;
}

std::int64_t IntegerizedQM::operator()(const Word& w) const {
  if (w.is_identity()) return 0;
  if (auto it = powers_->find(w); it != powers_->end()) return it->second;
  return to_int64(round_half_away(base_(w) / scale_));
}

Quasimorphism IntegerizedQM::as_quasimorphism() const {
  Quasimorphism q;
  q.label = "mu0[" + base_.label + " / mu^h(" + format_word(witness_) + ")]";
  q.claimed_defect = certified_defect_;
  q.evaluator = [self = *this](const Word& w) { return from_int64(self(w)); };
  return q;
}

IntegerizedQM integerize(const Quasimorphism& mu, const Word& g0, const IntegerizeBudgets& budgets) {
  std::optional<Rational> D = budgets.defect_bound ? budgets.defect_bound : mu.claimed_defect;
  if (!D) throw std::domain_error("integerize: " + mu.label + " has no certified defect bound");
  auto hom = homogenize(mu, g0, budgets.doublings, *D);
  if (abs(hom.value) <= hom.error_bound)
    throw std::domain_error("integerize: mu^h(" + format_word(g0) + ") = " + to_string(hom.value) +
                            " is not separated from 0 (error bound " + to_string(hom.error_bound) + ")");
  IntegerizedQM iq{mu, g0, hom.value, hom, *D, budgets.power_range};

  // Properties (ii)-(iv) hold by construction; check them anyway, then (i)
  // on a sample: both homogenizations estimate the same limit mu^h / s.
  const Word e{g0.presentation_ref()};
  if (iq(e) != 0) throw std::domain_error("integerize: mu0(1) != 0");
  for (std::int64_t n = -budgets.power_range; n <= budgets.power_range; ++n)
    if (iq(power(g0, n)) != n) throw std::domain_error("integerize: mu0(g0^" + std::to_string(n) + ") != n");

  const Quasimorphism q0 = iq.as_quasimorphism();
  for (const auto& w : enumerate(g0.presentation_ref(), budgets.validation_length)) {
    auto h0 = homogenize(q0, w, budgets.doublings, iq.certified_defect());
    auto h = homogenize(mu, w, budgets.doublings, *D);
    const Rational gap = abs(h0.value - h.value / iq.scale());
    const Rational allowed = h0.error_bound + h.error_bound / abs(iq.scale());
    if (gap > allowed)
      throw std::domain_error("integerize: homogenization of mu0 disagrees at " + format_word(w) + " (gap " +
                              to_string(gap) + " > " + to_string(allowed) + ")");
  }
  return iq;
}

std::optional<LadderPoint> LadderEmbedding::Data::point_of(const Word& w) const {
  auto it = index.find(w);
  if (it == index.end()) return std::nullopt;
  return points[it->second];
}

std::optional<Word> LadderEmbedding::Data::word_at(const LadderPoint& p) const {
  auto it = levels.find(p.level);
  if (it == levels.end() || p.slot >= it->second.size()) return std::nullopt;
  return words[it->second[p.slot]];
}

LadderEmbedding::LadderEmbedding(PresentationRef group, IntegerizedQM iq, std::size_t max_length,
                                 std::size_t root_length) {
  if (max_length < 1) throw std::domain_error("build_embedding: max_length must be >= 1");
  if (!(group->operator==(iq.witness().presentation())))
    throw std::domain_error("build_embedding: quasimorphism lives on a different group");
  auto d = std::make_shared<Data>(Data{group, std::move(iq), max_length, std::min(root_length, max_length), {}, {}, {}, {}, {}});
  d->words = enumerate(group, max_length);
  d->points.reserve(d->words.size());
  for (std::size_t i = 0; i < d->words.size(); ++i) {
    const std::int64_t lvl = d->iq(d->words[i]);
    auto& bucket = d->levels[lvl];
    d->points.push_back({bucket.size(), lvl});
    bucket.push_back(i);
    d->index.emplace(d->words[i], i);
  }

  // Root condition of mu0 for G acting on itself, over the root budget.
  std::size_t n_root = 0;
  while (n_root < d->words.size() && d->words[n_root].length() <= d->root_length) ++n_root;
  const auto& ws = d->words;
  const auto& q = d->iq;
  auto best = kernels::spread_parallel(n_root, n_root, [&](std::size_t i, std::size_t j) {
    return std::optional<Rational>{from_int64(q(multiply(ws[i], ws[j])) - q(ws[j]))};
  });
  d->B = best.value;
  data_ = std::move(d);
}

LadderEmbedding build_embedding(const PresentationRef& p, const IntegerizedQM& iq, std::size_t max_length,
                                std::size_t root_length) {
  return LadderEmbedding{p, iq, max_length, root_length};
}

std::optional<LadderPoint> LadderEmbedding::induced_action(const Word& g, const LadderPoint& pt) const {
  auto w = word_at(pt);
  if (!w) return std::nullopt;
  return point_of(multiply(g, *w));
}

std::optional<LadderPoint> induced_action(const LadderEmbedding& e, const Word& g, const LadderPoint& pt) {
  return e.induced_action(g, pt);
}

std::vector<std::int64_t> LadderEmbedding::orbit_levels(const Word& g, std::size_t n_iters) const {
  std::vector<std::int64_t> out;
  Word x{group()};
  out.push_back(level_of(x));
  for (std::size_t n = 1; n <= n_iters; ++n) {
    x = multiply(g, x);
    out.push_back(level_of(x));
  }
  return out;
}

Triple<Word> LadderEmbedding::triple() const {
  Triple<Word> t;
  t.kind = "ladder";
  auto d = data_;
  t.h = [d](const Word& w) { return from_int64(d->iq(w)); };
  t.domain_of = [d](const Word& w) { return d->iq(w); };
  t.shift = [d](std::int64_t alpha, const Word& w) -> std::optional<Word> {
    auto p = d->point_of(w);
    if (!p) return std::nullopt;
    return d->word_at({p->slot, p->level + alpha});
  };
  t.base_domain = [d](std::size_t truncation) {
    std::vector<Word> out;
    auto it = d->levels.find(0);
    if (it == d->levels.end()) return out;
    for (std::size_t i : it->second)
      if (d->words[i].length() <= truncation) out.push_back(d->words[i]);
    return out;
  };
  t.M0 = 0;
  return t;
}

GAction<Word> LadderEmbedding::action() const {
  GAction<Word> a;
  a.label = "left-multiplication[" + qm().base().label + "]";
  a.group = group();
  a.act = [](const Word& g, const Word& x) { return std::optional<Word>{multiply(g, x)}; };
  a.commutation = CommutationMode::almost(certified_root_bound());
  return a;
}

QiCertificate qi_certificate(const LadderEmbedding& e, const Word& g, const std::vector<PointPair>& pairs,
                             kernels::Execution exec) {
  QiCertificate c;
  c.B = e.B();
  std::vector<std::optional<PointPair>> images(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto gx = e.induced_action(g, pairs[i].first);
    auto gy = e.induced_action(g, pairs[i].second);
    if (gx && gy) images[i] = PointPair{*gx, *gy};
  }
  auto d_best = kernels::max_over(exec, pairs.size(), [&](std::size_t i) -> std::optional<Rational> {
    if (!images[i]) return std::nullopt;
    return abs(LadderSpace::distance(images[i]->first, images[i]->second) -
               LadderSpace::distance(pairs[i].first, pairs[i].second));
  });
  auto d2_best = kernels::max_over(exec, pairs.size(), [&](std::size_t i) -> std::optional<Rational> {
    if (!images[i]) return std::nullopt;
    return from_int64(std::abs(LadderSpace::d2(images[i]->first, images[i]->second) -
                               LadderSpace::d2(pairs[i].first, pairs[i].second)));
  });
  c.evaluated = d_best.evaluated;
  c.skipped = d_best.skipped;
  if (d_best.found) {
    c.d_distortion = d_best.value;
    c.d2_distortion = d2_best.value;
    c.witness = "g=" + format_word(g) + " x=" + describe(pairs[d_best.i].first) + " y=" + describe(pairs[d_best.i].second);
  }
  c.passed = c.d_distortion <= c.B + 2 && c.d2_distortion <= c.B;
  return c;
}

std::vector<PointPair> sample_pairs(const LadderEmbedding& e, std::size_t count, std::size_t max_word_length,
                                    std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < e.words().size(); ++i)
    if (e.words()[i].length() <= max_word_length) pool.push_back(i);
  if (pool.size() < 2) throw std::domain_error("sample_pairs: fewer than two candidate points");
  std::mt19937_64 rng{seed};
  std::uniform_int_distribution<std::size_t> pick{0, pool.size() - 1};
  std::vector<PointPair> out;
  out.reserve(count);
  while (out.size() < count) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    out.emplace_back(e.points()[pool[i]], e.points()[pool[j]]);
  }
  return out;
}

Rational reconstruct_mu(const LadderEmbedding& e, const Word& g, std::size_t n_iters) {
  if (n_iters == 0) throw std::domain_error("reconstruct_mu: n_iters must be >= 1");
  const auto levels = e.orbit_levels(g, n_iters);
  return from_int64(levels.back()) / from_int64(static_cast<std::int64_t>(n_iters));
}

ReconstructionCheck check_reconstruction(const LadderEmbedding& e, const Word& g, std::size_t n_iters,
                                         std::size_t doublings) {
  const auto& iq = e.qm();
  ReconstructionCheck c;
  c.reconstructed = reconstruct_mu(e, g, n_iters);
  auto hom = homogenize(iq.base(), g, doublings, iq.base_defect());
  c.homogenized = hom.value / iq.scale();
  c.gap = abs(c.reconstructed - c.homogenized);
  const Rational n = from_int64(static_cast<std::int64_t>(n_iters));
  c.allowed = e.B() / n + 1 / n + hom.error_bound / abs(iq.scale());
  c.passed = c.gap <= c.allowed;
  return c;
}

std::string to_string(EquivalenceVerdict::Kind k) {
  return k == EquivalenceVerdict::Kind::inequivalent ? "inequivalent" : "equivalent-so-far";
}

EquivalenceVerdict equivalence_test(const LadderEmbedding& e1, const LadderEmbedding& e2,
                                    const std::vector<Word>& g_sample, std::size_t n_iters, std::int64_t threshold) {
  if (!(*e1.group() == *e2.group())) throw std::domain_error("equivalence_test: embeddings over different groups");
  EquivalenceVerdict v;
  for (const auto& g : g_sample) {
    Word x{e1.group()};
    for (std::size_t n = 1; n <= n_iters; ++n) {
      x = multiply(g, x);
      const std::int64_t delta = std::abs(e1.level_of(x) - e2.level_of(x));
      v.trace.push_back({format_word(g), n, delta});
      v.max_delta = std::max(v.max_delta, delta);
      if (delta > threshold) {
        v.kind = EquivalenceVerdict::Kind::inequivalent;
        v.witness_g = g;
        v.witness_n = n;
        return v;
      }
    }
  }
  return v;
}

}  // namespace qmlab

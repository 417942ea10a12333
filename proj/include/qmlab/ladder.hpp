#pragma once

// The ladder L = H x Z with d = |h - h'| + |m - m'| and level function
// (h, m) -> m, together with the embedding of a countable group into the
// quasi-isometries of L induced by a nonzero homogeneous quasimorphism.

#include "qmlab/kernels.hpp"
#include "qmlab/qmcore.hpp"
#include "qmlab/triple.hpp"
#include "qmlab/words.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace qmlab {

struct LadderPoint {
  std::size_t slot = 0;
  std::int64_t level = 0;

  bool operator==(const LadderPoint&) const = default;
};

/// H = { 1 - 2^-(k+1) : k >= 0 }, so all distances are exact dyadic rationals.
struct LadderSpace {
  static Rational h_value(std::size_t slot);
  static Rational d1(const LadderPoint& p, const LadderPoint& q);
  static std::int64_t d2(const LadderPoint& p, const LadderPoint& q);
  static Rational distance(const LadderPoint& p, const LadderPoint& q);
  static std::int64_t level(const LadderPoint& p) { return p.level; }
};

std::string describe(const LadderPoint& p);

struct IntegerizeBudgets {
  std::size_t doublings = 10;
  /// Defaults to the quasimorphism's claimed defect.
  std::optional<Rational> defect_bound;
  /// mu0(g0^n) = n is pinned for |n| <= power_range.
  std::int64_t power_range = 64;
  /// Word length of the sample on which property (i) is validated.
  std::size_t validation_length = 3;
};

/// Integer-valued mu0 with mu0(1) = 0, mu0(g0^n) = n, and homogenization
/// mu^h / mu^h(g0).
class IntegerizedQM {
 public:
  IntegerizedQM(Quasimorphism base, Word witness, Rational scale, HomogenizationResult witness_homogenization,
                Rational base_defect, std::int64_t power_range);

  std::int64_t operator()(const Word& w) const;

  const Quasimorphism& base() const { return base_; }
  const Word& witness() const { return witness_; }
  /// Estimate of mu^h(g0) used as the normalizing scale.
  const Rational& scale() const { return scale_; }
  const HomogenizationResult& witness_homogenization() const { return witness_hom_; }
  const Rational& base_defect() const { return base_defect_; }
  /// Provable defect bound for mu0 from the base defect and the rounding.
  const Rational& certified_defect() const { return certified_defect_; }
  std::int64_t power_range() const { return power_range_; }

  Quasimorphism as_quasimorphism() const;

 private:
  Quasimorphism base_;
  Word witness_;
  Rational scale_;
  HomogenizationResult witness_hom_;
  Rational base_defect_;
  Rational certified_defect_;
  std::int64_t power_range_;
  std::shared_ptr<const std::unordered_map<Word, std::int64_t, WordHash>> powers_;
};

/// Throws std::domain_error when mu^h(g0) cannot be told apart from 0, when no
/// defect bound is available, or when one of the four properties fails on
/// the validation sample.
IntegerizedQM integerize(const Quasimorphism& mu, const Word& g0, const IntegerizeBudgets& budgets = {});

/// Psi: words of length <= max_length placed on the ladder, level = mu0,
/// slots in shortlex order of appearance within each level.
class LadderEmbedding {
 public:
  LadderEmbedding(PresentationRef group, IntegerizedQM iq, std::size_t max_length, std::size_t root_length);

  const PresentationRef& group() const { return data_->group; }
  const IntegerizedQM& qm() const { return data_->iq; }
  std::size_t max_length() const { return data_->max_length; }
  std::size_t root_length() const { return data_->root_length; }
  const std::vector<Word>& words() const { return data_->words; }
  const std::vector<LadderPoint>& points() const { return data_->points; }
  /// Word indices per level, in slot order.
  const std::map<std::int64_t, std::vector<std::size_t>>& levels() const { return data_->levels; }

  /// Observed root-condition bound of mu0 over g, x, y of length <= root_length.
  const Rational& B() const { return data_->B; }
  /// 2 * certified defect of mu0; bounds the root condition everywhere.
  Rational certified_root_bound() const { return 2 * data_->iq.certified_defect(); }

  /// Level of Psi(w). Defined for every word, inside the table or not.
  std::int64_t level_of(const Word& w) const { return data_->iq(w); }
  std::optional<LadderPoint> point_of(const Word& w) const { return data_->point_of(w); }
  std::optional<Word> word_at(const LadderPoint& p) const { return data_->word_at(p); }

  /// Psi(g . Psi^-1(pt)); nullopt when either end is outside the table.
  std::optional<LadderPoint> induced_action(const Word& g, const LadderPoint& pt) const;

  /// Levels of Psi(g^n) for n = 0..n_iters, following the induced action.
  std::vector<std::int64_t> orbit_levels(const Word& g, std::size_t n_iters) const;

  /// The embedding as a triple: points are Psi-preimages, h = level, the
  /// Z-action moves a point up the ladder within its slot (b = 0).
  Triple<Word> triple() const;
  /// Left multiplication, almost commuting with the Z-action up to the
  /// certified root bound.
  GAction<Word> action() const;

 private:
  struct Data {
    PresentationRef group;
    IntegerizedQM iq;
    std::size_t max_length = 0;
    std::size_t root_length = 0;
    std::vector<Word> words;
    std::vector<LadderPoint> points;
    std::unordered_map<Word, std::size_t, WordHash> index;
    std::map<std::int64_t, std::vector<std::size_t>> levels;
    Rational B;

    std::optional<LadderPoint> point_of(const Word& w) const;
    std::optional<Word> word_at(const LadderPoint& p) const;
  };
  std::shared_ptr<const Data> data_;
};

LadderEmbedding build_embedding(const PresentationRef& p, const IntegerizedQM& iq, std::size_t max_length,
                                std::size_t root_length = 4);

std::optional<LadderPoint> induced_action(const LadderEmbedding& e, const Word& g, const LadderPoint& pt);

struct QiCertificate {
  Rational d_distortion;   // max | d(gx, gy) - d(x, y) |
  Rational d2_distortion;  // same for the level distance alone
  Rational B;
  bool passed = false;  // d <= B + 2 and d2 <= B
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::string witness;
};

using PointPair = std::pair<LadderPoint, LadderPoint>;

QiCertificate qi_certificate(const LadderEmbedding& e, const Word& g, const std::vector<PointPair>& pairs,
                             kernels::Execution exec = kernels::Execution::parallel);

/// Deterministic sample of distinct pairs of table points whose words have
/// length <= max_word_length.
std::vector<PointPair> sample_pairs(const LadderEmbedding& e, std::size_t count, std::size_t max_word_length,
                                    std::uint64_t seed = 1);

/// level(Psi(g^n)) / n.
Rational reconstruct_mu(const LadderEmbedding& e, const Word& g, std::size_t n_iters);

struct ReconstructionCheck {
  Rational reconstructed;
  Rational homogenized;  // mu^h(g) / scale
  Rational gap;
  Rational allowed;  // B/n + 1/n + err/|scale|
  bool passed = false;
};

ReconstructionCheck check_reconstruction(const LadderEmbedding& e, const Word& g, std::size_t n_iters,
                                         std::size_t doublings);

struct DeltaSample {
  std::string g;
  std::size_t n = 0;
  std::int64_t delta = 0;
};

struct EquivalenceVerdict {
  enum class Kind { equivalent_so_far, inequivalent };
  Kind kind = Kind::equivalent_so_far;
  std::optional<Word> witness_g;
  std::size_t witness_n = 0;
  std::int64_t max_delta = 0;
  std::vector<DeltaSample> trace;
};

std::string to_string(EquivalenceVerdict::Kind k);

/// Compares orbit levels of the two embeddings from Psi(1). One-sided: a
/// divergence beyond the threshold proves inequivalence, anything else only
/// accumulates evidence.
EquivalenceVerdict equivalence_test(const LadderEmbedding& e1, const LadderEmbedding& e2,
                                    const std::vector<Word>& g_sample, std::size_t n_iters = 200,
                                    std::int64_t threshold = 10);

}  // namespace qmlab

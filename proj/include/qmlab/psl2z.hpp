#pragma once

// PSL2(Z) = Z/2 * Z/3 with the counting quasimorphism #R - #R^2 on normal
// forms, its homogenization through matrix squaring, and its ladder.

#include "qmlab/ladder.hpp"
#include "qmlab/qmcore.hpp"
#include "qmlab/words.hpp"

#include <cstdint>
#include <optional>

namespace qmlab {

/// Number of R syllables minus number of R^2 syllables. Throws
/// std::domain_error for words outside Z/2 * Z/3.
std::int64_t rademacher_counting(const Word& w);

/// The counting function as a quasimorphism; its claimed defect is twice the
/// exhaustive defect over words of length <= 6.
Quasimorphism rademacher_qm();

/// Exhaustive defect over pairs of words of length <= max_length (>= 2).
Rational rademacher_defect(std::size_t max_length, kernels::Execution exec = kernels::Execution::parallel);

/// mu^h via g^(2^k) computed on matrices, re-reading the word at every
/// doubling. Elliptic elements (|trace| <= 1) and the identity give exactly 0.
HomogenizationResult homogenized_rademacher(const IntMatrix& g, std::size_t doublings,
                                            std::optional<Rational> defect_bound = std::nullopt);
HomogenizationResult homogenized_rademacher(const Word& g, std::size_t doublings,
                                            std::optional<Rational> defect_bound = std::nullopt);

/// Integerizes the counting function with witness S R and places words of
/// length <= max_length on the ladder.
LadderEmbedding build_psl2z_ladder(std::size_t max_length, std::size_t root_length = 4);

}  // namespace qmlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qhmm/alphabet.hpp"
#include "qhmm/model.hpp"

namespace qhmm {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// 1ᵀ T(x_L) ... T(x_0) π, clamped to [0, 1]. The empty word has probability 1.
double word_probability(const ClassicalHmm& model, const Word& word);

/// tr(ℰ^{x_L} ∘ ... ∘ ℰ^{x_0}[ρ₀]), clamped to [0, 1]. Throws
/// NumericalError when the trace has an imaginary part above 1e-10.
double word_probability(const Qhmm& model, const Word& word);

double word_probability(const AnyModel& model, const Word& word);

/// Exhaustive distribution over words of one length, in lexicographic
/// symbol-index order.
struct WordDistribution {
  std::size_t length = 0;
  std::vector<Word> words;
  std::vector<double> probabilities;  // clamped to [0, 1]
  double total = 0.0;                 // Σ of clamped probabilities
  double most_negative = 0.0;         // smallest pre-clamp value (0 if none negative)

  double normalization_residual() const { return std::abs(total - 1.0); }
  std::size_t size() const noexcept { return words.size(); }
};

/// Throws CapExceededError when |𝒜|^L > cap.
WordDistribution enumerate_distribution(const AnyModel& model, std::size_t length,
                                        std::size_t cap = kDefaultEnumerationCap);

/// Σ_w P(w)² over all words of the given length (1 for L = 0).
double squared_moment(const AnyModel& model, std::size_t length,
                      std::size_t cap = kDefaultEnumerationCap);

/// Σ_w P_A(w) P_B(w) over all words of the given length. The models must
/// share an alphabet.
double overlap_moment(const AnyModel& a, const AnyModel& b, std::size_t length,
                      std::size_t cap = kDefaultEnumerationCap);

/// Draws one word from the exact length-L distribution by sequential
/// conditional draws. Throws NumericalError if a drawn symbol had
/// conditional weight below 1e-300.
Word sample(const AnyModel& model, std::size_t length, std::uint64_t seed);

/// `count` independent words from one seeded stream.
std::vector<Word> sample_many(const AnyModel& model, std::size_t length, std::size_t count,
                              std::uint64_t seed);

}  // namespace qhmm

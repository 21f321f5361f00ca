#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qhmm/linalg.hpp"
#include "qhmm/model.hpp"
#include "qhmm/spectral.hpp"
#include "qhmm/tolerance.hpp"

namespace qhmm {

/// Phase actually used for one nonzero transition.
struct PhaseEntry {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t symbol = 0;
  double phase = 0.0;
};

/// Square-root memory states of a classical model,
///
///   |ψ_i⟩ = Σ_{j,x} e^{iφ(i,j,x)} √Pr(x, j | i) |j⟩|x⟩,
///
/// stored as the columns of `states` ((m·|𝒜|) × m, row index j·|𝒜| + x).
struct MemoryStateSet {
  ComplexMatrix states;
  ComplexMatrix gram;                  // G_ij = ⟨ψ_i|ψ_j⟩
  Eigen::VectorXd gram_singular_values;  // descending
  std::size_t rank = 0;                // singular values > tol.rank × largest
  std::string phase_label;
  std::vector<PhaseEntry> phases;
};

MemoryStateSet build_memory_states(const ClassicalHmm& model,
                                   const PhaseAssignment& phases = PhaseAssignment::zero(),
                                   const ToleranceConfig& tol = {});

/// The uncompressed square-root QHMM on the (m·|𝒜|)-dimensional space, with
/// Kraus operators K_k^(x) = |ψ_k⟩⟨k|⟨x| and ρ = Σ π_i |ψ_i⟩⟨ψ_i|.
Qhmm square_root_qhmm(const ClassicalHmm& model,
                      const PhaseAssignment& phases = PhaseAssignment::zero());

struct CompressedQhmm {
  Qhmm model;
  /// Column i holds the coordinates of |ψ_i⟩ in the compressed basis (r × m).
  ComplexMatrix isometry;
  ClassicalHmm source;
  std::string phase_label;
  std::vector<PhaseEntry> phases;
  Eigen::VectorXd gram_singular_values;
  std::vector<std::string> warnings;
  std::size_t verified_length = 0;   // words up to this length were compared
  double max_word_deviation = 0.0;   // over the verified words

  std::size_t dim() const noexcept { return model.dim(); }
};

/// Restricts the square-root QHMM to span{|ψ_i⟩}. The basis comes from a
/// column-pivoted QR of the state matrix truncated at the Gram rank. When
/// `verify_length` > 0 every word up to that length is compared against the
/// source; the largest deviation is recorded (not thrown).
CompressedQhmm compress(const ClassicalHmm& model,
                        const PhaseAssignment& phases = PhaseAssignment::zero(),
                        const ToleranceConfig& tol = {}, std::size_t verify_length = 0);

/// Largest |P_compressed(w) − P_source(w)| over all words with 1 <= |w| <= length.
double max_word_deviation(const AnyModel& a, const AnyModel& b, std::size_t length);

struct PhaseSearchResult {
  PhaseAssignment phases;
  std::size_t rank = 0;
  double smallest_kept_ratio = 0.0;  // smallest singular value / largest
  std::size_t trials = 0;
};

/// Random phase explorer: tries zero phases plus `trials` random
/// assignments and keeps the one with the lowest Gram rank (ties broken by
/// the smallest singular-value ratio). This is a search, not an optimizer.
PhaseSearchResult explore_phases(const ClassicalHmm& model, std::size_t trials,
                                 std::uint64_t seed, const ToleranceConfig& tol = {});

/// One row of the reduction-curve sweep over the three-state example family.
struct SweepRow {
  double beta = 0.0;
  ExampleBranch branch = ExampleBranch::quantum_reduction;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_bar = 0.0;
  std::size_t gram_rank = 0;  // zero phases
  std::size_t spectrum_size_effective = 0;
  std::size_t quantum_min_dim = 0;
  std::size_t classical_min_dim = 0;
};

std::string to_string(ExampleBranch branch);
ExampleBranch parse_branch(const std::string& text);

/// Two rows per β (quantum branch first), in grid order. Rows are computed
/// with up to `threads` workers; output order does not depend on it.
std::vector<SweepRow> sweep_reduction_curves(double alpha, const std::vector<double>& betas,
                                             const ToleranceConfig& tol = {},
                                             std::size_t threads = 1);

}  // namespace qhmm

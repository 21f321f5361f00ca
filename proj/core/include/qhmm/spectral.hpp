#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qhmm/linalg.hpp"
#include "qhmm/model.hpp"
#include "qhmm/tolerance.hpp"
#include "qhmm/transfer.hpp"

namespace qhmm {

/// One distinct eigenvalue (a cluster of numerically coincident
/// eigenvalues) with its projector coefficient α_λ = ⟨⟨1|Π_λ|ρ⟩⟩.
struct EigenCluster {
  Complex value;           // mean of the clustered eigenvalues
  std::size_t multiplicity = 0;
  Complex alpha;
};

/// Spectral invariants of a transfer operator.
///
/// Eigenvalues are grouped by transitive closure of |λ_i − λ_j| ≤
/// eig_dedup · radius; a cluster whose value has |λ| ≤ eig_zero · radius is
/// the zero cluster and is excluded from `distinct_nonzero`. A nonzero
/// cluster is effective when |α_λ| > eig_zero.
struct SpectrumReport {
  std::vector<Complex> raw_eigenvalues;
  std::vector<EigenCluster> distinct_nonzero;  // sorted by descending |λ|, then arg
  std::optional<EigenCluster> zero_cluster;
  std::size_t effective_count = 0;
  double spectral_radius = 0.0;
  ToleranceConfig tolerances_used;
  bool diagonalizable = true;
  double condition_estimate = 1.0;  // 2-norm condition number of the eigenvector matrix
  double self_test_residual = 0.0;  // max_L |Σ α_λ λ^L − moment_via_transfer(L)|
  std::size_t self_test_max_length = 0;

  std::size_t raw_count() const noexcept { return distinct_nonzero.size(); }
  std::vector<EigenCluster> effective() const;
  /// Σ over all clusters (zero cluster included) of α_λ λ^L.
  Complex reconstruct_moment(std::size_t length) const;
  /// Diagonalizable and the moment self-test passed.
  bool reliable() const noexcept;
};

inline constexpr double kDefectiveConditionLimit = 1e12;
inline constexpr double kSelfTestTolerance = 1e-8;
/// Relative pivot size below which a direction of the operator counts as
/// exact null space and is deflated before the eigendecomposition.
inline constexpr double kNullSpaceThreshold = 1e-12;

/// Full eigendecomposition of a transfer operator. Never throws for
/// defective operators; they are reported with diagonalizable = false.
SpectrumReport spectrum(const TransferOperator& op, const ToleranceConfig& tol = {});

/// Lower bounds on the generative memory implied by a spectrum size.
struct BoundReport {
  std::size_t spectrum_size = 0;      // effective |Λ|
  std::size_t raw_spectrum_size = 0;  // all distinct nonzero eigenvalues
  std::size_t quantum_min_dim = 0;    // smallest n with n⁴ >= |Λ|
  std::size_t classical_min_dim = 0;  // smallest n with n² >= |Λ|
  double c_q_lower_bits = 0.0;        // log₂ quantum_min_dim
  double c_c_lower_bits = 0.0;        // log₂ classical_min_dim
  std::size_t raw_quantum_min_dim = 0;
  std::size_t raw_classical_min_dim = 0;
};

/// Smallest n >= 1 with n^power >= count, in exact integer arithmetic.
std::size_t integer_root_ceil(std::size_t count, unsigned power);

/// Throws DomainError when the effective spectrum is empty.
BoundReport complexity_bounds(const SpectrumReport& report);
/// Bounds for a bare spectrum size (raw fields mirror the effective ones).
BoundReport complexity_bounds(std::size_t spectrum_size);

struct MomentCheck {
  std::size_t length = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

struct EquivalenceVerdict {
  enum class Outcome { consistent, refuted, withheld };

  bool spectra_match = false;
  bool coefficients_match = false;
  double max_eigenvalue_gap = 0.0;    // over matched effective eigenvalues
  double max_coefficient_gap = 0.0;   // over matched effective eigenvalues
  std::vector<MomentCheck> moment_checks;
  std::vector<std::pair<std::size_t, double>> vandermonde;
  std::optional<bool> brute_force_match;
  std::size_t brute_force_max_length = 0;
  double brute_force_max_gap = 0.0;
  Outcome outcome = Outcome::withheld;
  std::string reason;

  bool consistent() const noexcept { return outcome == Outcome::consistent; }
  bool refuted() const noexcept { return outcome == Outcome::refuted; }
};

std::string to_string(EquivalenceVerdict::Outcome outcome);

struct EquivalenceOptions {
  ToleranceConfig tol;
  double coefficient_tolerance = 1e-8;
  double moment_tolerance = 1e-8;
  std::optional<std::size_t> brute_force_length;
  double brute_force_tolerance = 1e-8;
};

/// Tests Theorem-1 style necessary conditions for two models to generate the
/// same process: equal effective spectra, equal α on matched eigenvalues and
/// equal self-overlap moment sequences. "consistent" is not a proof of
/// equivalence; "refuted" is conclusive. When either transfer operator is
/// defective the spectral verdict is withheld and only the optional
/// brute-force comparison decides.
EquivalenceVerdict check_equivalence(const AnyModel& a, const AnyModel& b,
                                     const EquivalenceOptions& options = {});

/// |Σ_λ λ^L (α_A(λ) − α_B(λ))| for L = 1..|Λ_A ∪ Λ_B|, using the nonzero
/// clusters of both reports (a value missing on one side has α = 0 there).
std::vector<std::pair<std::size_t, double>> vandermonde_residual(const SpectrumReport& a,
                                                                 const SpectrumReport& b);

}  // namespace qhmm

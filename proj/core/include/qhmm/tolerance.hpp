#pragma once

namespace qhmm {

/// Numerical thresholds used across validation, spectral analysis and
/// compression. The spectral thresholds (eig_zero, eig_dedup) are relative
/// to the spectral radius of the operator being analysed; rank is relative
/// to the largest singular value.
struct ToleranceConfig {
  double stoch = 1e-9;      // stochasticity / trace-one residuals
  double cptp = 1e-9;       // completeness and unitarity residuals (Frobenius)
  double herm = 1e-9;       // Hermiticity of density matrices
  double psd = 1e-9;        // smallest eigenvalue must be >= -psd
  double eig_zero = 1e-9;   // |λ| <= eig_zero * radius counts as zero
  double eig_dedup = 1e-7;  // eigenvalues closer than eig_dedup * radius are one value
  double rank = 1e-8;       // singular value cut for numerical rank
  double prob = 1e-10;      // probability normalization / agreement

  /// Throws DomainError unless every threshold is strictly positive.
  void check() const;
};

}  // namespace qhmm

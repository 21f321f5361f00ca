#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "qhmm/linalg.hpp"
#include "qhmm/model.hpp"

namespace qhmm {

/// Largest transfer-operator dimension handled with dense storage.
inline constexpr Eigen::Index kMaxTransferDim = 4096;

enum class TransferKind { quantum, classical, mixed };

std::string to_string(TransferKind kind);

/// Vectorized transfer operator of a model pair, with the boundary and
/// initial vectors that turn its powers into overlap moments:
///
///   Σ_{|w|=L} P_A(w) P_B(w) = boundaryᵀ · matrix^L · initial.
///
/// For quantum pairs the A factor's doubled index is the outer Kronecker
/// factor: index = (column-stacked index of A) * d_B² + (index of B).
struct TransferOperator {
  TransferKind kind = TransferKind::quantum;
  std::size_t dim_a = 0;  // d_A (quantum) or m_A (classical)
  std::size_t dim_b = 0;
  ComplexMatrix matrix;
  ComplexVector boundary;
  ComplexVector initial;

  Eigen::Index size() const noexcept { return matrix.rows(); }
};

/// Σ_α conj(K_α) ⊗ K_α, the column-stacking superoperator:
/// result · vec(ρ) = vec(Σ_α K_α ρ K_α†).
ComplexMatrix vectorize_map(std::span<const ComplexMatrix> kraus);

/// Σₓ Ê_A^x ⊗ Ê_B^x with boundary vec(I)⊗vec(I) and initial vec(ρ_A)⊗vec(ρ_B).
TransferOperator build_quantum_transfer(const Qhmm& a, const Qhmm& b);

/// Σₓ T_A(x) ⊗ T_B(x) with an all-ones boundary and initial π_A ⊗ π_B.
TransferOperator build_classical_transfer(const ClassicalHmm& a, const ClassicalHmm& b);

/// Self-pair transfer operator of either model class.
TransferOperator build_self_transfer(const AnyModel& model);

/// Lifts a classical transfer operator onto the quantum doubled-index space:
/// entry (kA kB, iA iB) moves to (|kA kA⟩|kB kB⟩, |iA iA⟩|iB iB⟩), every other
/// entry is zero.
TransferOperator embed_classical_in_quantum(const TransferOperator& classical);

/// Real part of boundaryᵀ · matrix^L · initial. Throws NumericalError when the
/// imaginary part exceeds `imag_tolerance`.
double moment_via_transfer(const TransferOperator& op, std::size_t length,
                           double imag_tolerance = 1e-9);

}  // namespace qhmm

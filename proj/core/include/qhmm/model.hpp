#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qhmm/alphabet.hpp"
#include "qhmm/linalg.hpp"
#include "qhmm/tolerance.hpp"

namespace qhmm {

/// Classical hidden Markov model with symbol-labelled substochastic
/// transition matrices.
///
/// Columns index the source state: transition(x)(j, i) = Pr(x, j | i), so
/// word probabilities are 1ᵀ T(x_L) ... T(x_0) π and, summed over symbols,
/// every column adds up to one.
class ClassicalHmm {
 public:
  /// Throws DimensionError unless there is one m×m matrix per symbol and
  /// the initial vector has length m.
  ClassicalHmm(Alphabet alphabet, std::vector<RealMatrix> transitions, RealVector initial);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(initial_.size()); }
  const std::vector<RealMatrix>& transitions() const noexcept { return transitions_; }
  const RealMatrix& transition(std::size_t symbol) const { return transitions_.at(symbol); }
  const RealVector& initial() const noexcept { return initial_; }

  /// Σₓ T(x), the symbol-blind state transition matrix.
  RealMatrix total_transition() const;

  ClassicalHmm with_initial(RealVector initial) const;

 private:
  Alphabet alphabet_;
  std::vector<RealMatrix> transitions_;
  RealVector initial_;
};

/// Quantum hidden Markov model: a quantum instrument given by one Kraus
/// family per symbol, plus an initial density matrix.
class Qhmm {
 public:
  /// Throws DimensionError unless every Kraus operator and the initial state
  /// are d×d and each symbol has a nonempty Kraus family.
  Qhmm(Alphabet alphabet, std::vector<std::vector<ComplexMatrix>> kraus, ComplexMatrix initial);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(initial_.rows()); }
  const std::vector<std::vector<ComplexMatrix>>& kraus() const noexcept { return kraus_; }
  const std::vector<ComplexMatrix>& kraus(std::size_t symbol) const { return kraus_.at(symbol); }
  const ComplexMatrix& initial() const noexcept { return initial_; }

  /// ℰˣ(ρ) = Σ_α K_α ρ K_α†.
  ComplexMatrix apply(std::size_t symbol, const ComplexMatrix& rho) const;

  Qhmm with_initial(ComplexMatrix initial) const;

 private:
  Alphabet alphabet_;
  std::vector<std::vector<ComplexMatrix>> kraus_;
  ComplexMatrix initial_;
};

using AnyModel = std::variant<ClassicalHmm, Qhmm>;

const Alphabet& alphabet_of(const AnyModel& model);
std::size_t dim_of(const AnyModel& model);

/// One measured invariant of a model.
struct ValidationCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool valid() const noexcept;
  std::vector<ValidationCheck> violations() const;
  /// Residual of the named check; throws std::out_of_range if absent.
  double residual(const std::string& name) const;
};

ValidationReport validate_classical(const ClassicalHmm& model, const ToleranceConfig& tol = {});
ValidationReport validate_quantum(const Qhmm& model, const ToleranceConfig& tol = {});
ValidationReport validate(const AnyModel& model, const ToleranceConfig& tol = {});

/// Phase e^{iφ(from, to, symbol)} attached to the amplitude of a classical
/// transition when it is lifted to a quantum model.
struct PhaseAssignment {
  std::function<double(std::size_t from, std::size_t to, std::size_t symbol)> fn;
  std::string label = "zero";

  double operator()(std::size_t from, std::size_t to, std::size_t symbol) const {
    return fn ? fn(from, to, symbol) : 0.0;
  }

  static PhaseAssignment zero();
  /// Independent uniform phases in [0, 2π), a pure function of the seed and
  /// the transition coordinates.
  static PhaseAssignment random(std::uint64_t seed);
  static PhaseAssignment custom(
      std::function<double(std::size_t, std::size_t, std::size_t)> fn, std::string label = "custom");
};

/// Strictly incoherent embedding: one Kraus operator e^{iφ}√T(x)(j,i) |j⟩⟨i|
/// per nonzero transition entry, initial state diag(π). Symbols without any
/// nonzero transition get a single zero operator.
Qhmm sio_embed(const ClassicalHmm& model, const PhaseAssignment& phases = PhaseAssignment::zero());

/// Stationary distribution of Σₓ T(x) (eigenvalue-one eigenvector, normalized
/// to sum one). Throws NumericalError if none exists.
RealVector stationary_distribution(const ClassicalHmm& model);

enum class ExampleBranch { quantum_reduction, classical_reduction };

struct ExampleGammas {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_bar = 0.0;
  double nu = 0.0;  // normalization constant (ν, not ν²)
};

/// Transition weights of the third state of the three-state example family.
///
/// quantum_reduction: γ₁ = (√α+√β)²/ν², γ₂ = (1−α)/ν², γ̄ = (1−β)/ν² with
/// ν² = 2 + 2√(αβ), making |ψ_C⟩ = (|ψ_A⟩+|ψ_B⟩)/ν.
/// classical_reduction: γ₁ = (α+β)/2, γ₂ = (1−α)/2, γ̄ = 1−γ₁−γ₂.
ExampleGammas example_gammas(double alpha, double beta, ExampleBranch branch);

/// The three-state, two-symbol family
///
///   T(0) = [α β γ₁; 1−α 0 γ₂; 0 0 0],  T(1) = [0 0 0; 0 0 0; 0 1−β γ̄].
///
/// Requires α, β in the open interval (0, 1). The initial distribution
/// defaults to the stationary one.
ClassicalHmm example_model(double alpha, double beta, double gamma1, double gamma2,
                           std::optional<RealVector> initial = std::nullopt);
ClassicalHmm example_model_family(double alpha, double beta, ExampleBranch branch,
                                  std::optional<RealVector> initial = std::nullopt);

/// Random valid QHMM: the Kraus operators are consecutive d×d blocks of a
/// random isometry, and ρ₀ = GG†/tr(GG†) for a complex Gaussian G.
Qhmm random_qhmm(std::size_t dim, std::size_t alphabet_size, std::size_t kraus_per_symbol,
                 std::uint64_t seed);

/// Random valid classical HMM with uniform weights; each entry is zeroed
/// with probability `sparsity` (at least one entry per column survives).
ClassicalHmm random_classical_hmm(std::size_t dim, std::size_t alphabet_size, std::uint64_t seed,
                                  double sparsity = 0.0);

/// Haar-random d×d unitary.
ComplexMatrix random_unitary(std::size_t dim, std::uint64_t seed);

/// K' = U K U†, ρ₀' = U ρ₀ U†. Throws DomainError if U is not unitary
/// within tol.cptp.
Qhmm conjugate_by_unitary(const Qhmm& model, const ComplexMatrix& unitary,
                          const ToleranceConfig& tol = {});

}  // namespace qhmm

#include "qhmm/compress.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "qhmm/errors.hpp"
#include "qhmm/process.hpp"
#include "qhmm/transfer.hpp"
#include "parallel.hpp"

namespace qhmm {

namespace {

// Row of |j⟩|x⟩ in the (m·|𝒜|)-dimensional state space.
Eigen::Index joint_index(std::size_t state, std::size_t symbol, std::size_t alphabet_size) {
  return static_cast<Eigen::Index>(state * alphabet_size + symbol);
}

std::size_t numerical_rank(const Eigen::VectorXd& descending, double rel_tol) {
  if (descending.size() == 0 || !(descending(0) > 0.0)) return 0;
  const double cut = rel_tol * descending(0);
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < descending.size(); ++k) {
    if (descending(k) > cut) ++r;
  }
  return r;
}

}  // namespace

MemoryStateSet build_memory_states(const ClassicalHmm& model, const PhaseAssignment& phases,
                                   const ToleranceConfig& tol) {
  tol.check();
  const std::size_t m = model.dim();
  const std::size_t n_symbols = model.alphabet().size();

  MemoryStateSet set;
  set.phase_label = phases.label;
  set.states = ComplexMatrix::Zero(static_cast<Eigen::Index>(m * n_symbols),
                                   static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t x = 0; x < n_symbols; ++x) {
      const RealMatrix& t = model.transition(x);
      for (std::size_t j = 0; j < m; ++j) {
        const double p = t(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        if (p <= 0.0) continue;
        const double phi = phases(i, j, x);
        set.states(joint_index(j, x, n_symbols), static_cast<Eigen::Index>(i)) =
            std::polar(std::sqrt(p), phi);
        set.phases.push_back({i, j, x, phi});
      }
    }
  }
  set.gram = set.states.adjoint() * set.states;

  // G is Hermitian PSD, so its singular values are its eigenvalues.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(set.gram, Eigen::EigenvaluesOnly);
  Eigen::VectorXd sv = eig.eigenvalues().cwiseAbs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  set.gram_singular_values = sv;
  set.rank = numerical_rank(sv, tol.rank);
  return set;
}

Qhmm square_root_qhmm(const ClassicalHmm& model, const PhaseAssignment& phases) {
  const MemoryStateSet set = build_memory_states(model, phases);
  const std::size_t m = model.dim();
  const std::size_t n_symbols = model.alphabet().size();
  const Eigen::Index n = set.states.rows();

  std::vector<std::vector<ComplexMatrix>> kraus(n_symbols);
  for (std::size_t x = 0; x < n_symbols; ++x) {
    for (std::size_t k = 0; k < m; ++k) {
      ComplexMatrix op = ComplexMatrix::Zero(n, n);
      op.col(joint_index(k, x, n_symbols)) = set.states.col(static_cast<Eigen::Index>(k));
      kraus[x].push_back(std::move(op));
    }
  }
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto psi = set.states.col(static_cast<Eigen::Index>(i));
    rho += model.initial()(static_cast<Eigen::Index>(i)) * psi * psi.adjoint();
  }
  return Qhmm(model.alphabet(), std::move(kraus), std::move(rho));
}

CompressedQhmm compress(const ClassicalHmm& model, const PhaseAssignment& phases,
                        const ToleranceConfig& tol, std::size_t verify_length) {
  const auto source_report = validate_classical(model, tol);
  if (!source_report.valid()) {
    throw DomainError("compress needs a valid classical model (" +
                      source_report.violations().front().name + " violated)");
  }
  const MemoryStateSet set = build_memory_states(model, phases, tol);
  const std::size_t m = model.dim();
  const std::size_t n_symbols = model.alphabet().size();
  const auto r = static_cast<Eigen::Index>(set.rank);
  if (r == 0) throw NumericalError("memory states have numerical rank zero");

  std::vector<std::string> warnings;
  const auto& sv = set.gram_singular_values;
  if (sv(r - 1) < 10.0 * tol.rank * sv(0)) {
    warnings.push_back("smallest kept singular value " + std::to_string(sv(r - 1) / sv(0)) +
                       " (relative) is within 10x of the rank threshold");
  }

  // Coincident states span the same direction; projecting onto the span
  // merges them, and ρ_m picks up their combined weight.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i + 1; k < m; ++k) {
      const auto a = set.states.col(static_cast<Eigen::Index>(i));
      const auto b = set.states.col(static_cast<Eigen::Index>(k));
      if ((a - b).norm() <= 1e-12) {
        warnings.push_back("memory states " + std::to_string(i) + " and " + std::to_string(k) +
                           " coincide and are merged");
      }
    }
  }

  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(set.states);
  const ComplexMatrix full_q = qr.householderQ();
  const ComplexMatrix basis = full_q.leftCols(r);
  const ComplexMatrix coords = basis.adjoint() * set.states;  // r × m

  constexpr double kNegligible = 1e-13;
  std::vector<std::vector<ComplexMatrix>> kraus(n_symbols);
  for (std::size_t x = 0; x < n_symbols; ++x) {
    for (std::size_t k = 0; k < m; ++k) {
      const Eigen::RowVectorXcd bra = basis.row(joint_index(k, x, n_symbols));
      const auto ket = coords.col(static_cast<Eigen::Index>(k));
      if (bra.norm() <= kNegligible || ket.norm() <= kNegligible) continue;
      kraus[x].push_back(ket * bra);
    }
    if (kraus[x].empty()) kraus[x].push_back(ComplexMatrix::Zero(r, r));
  }

  ComplexMatrix rho = ComplexMatrix::Zero(r, r);
  for (std::size_t i = 0; i < m; ++i) {
    const auto c = coords.col(static_cast<Eigen::Index>(i));
    rho += model.initial()(static_cast<Eigen::Index>(i)) * c * c.adjoint();
  }
  rho = (0.5 * (rho + rho.adjoint())).eval();

  CompressedQhmm out{Qhmm(model.alphabet(), std::move(kraus), std::move(rho)),
                     coords,
                     model,
                     set.phase_label,
                     set.phases,
                     sv,
                     std::move(warnings),
                     0,
                     0.0};

  const auto check = validate_quantum(out.model, tol);
  for (const auto& v : check.violations()) {
    out.warnings.push_back("compressed model violates " + v.name + " (residual " +
                           std::to_string(v.residual) + ")");
  }
  if (verify_length > 0) {
    out.verified_length = verify_length;
    out.max_word_deviation = max_word_deviation(AnyModel(model), AnyModel(out.model), verify_length);
  }
  return out;
}

double max_word_deviation(const AnyModel& a, const AnyModel& b, std::size_t length) {
  double worst = 0.0;
  for (std::size_t l = 1; l <= length; ++l) {
    const auto da = enumerate_distribution(a, l);
    const auto db = enumerate_distribution(b, l);
    for (std::size_t k = 0; k < da.size(); ++k) {
      worst = std::max(worst, std::abs(da.probabilities[k] - db.probabilities[k]));
    }
  }
  return worst;
}

PhaseSearchResult explore_phases(const ClassicalHmm& model, std::size_t trials,
                                 std::uint64_t seed, const ToleranceConfig& tol) {
  auto score = [&](const PhaseAssignment& p) {
    const auto set = build_memory_states(model, p, tol);
    const auto& sv = set.gram_singular_values;
    const double ratio = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    return std::pair{set.rank, ratio};
  };
  PhaseSearchResult best{PhaseAssignment::zero(), 0, 0.0, trials + 1};
  std::tie(best.rank, best.smallest_kept_ratio) = score(best.phases);
  for (std::size_t t = 0; t < trials; ++t) {
    auto candidate = PhaseAssignment::random(seed + t);
    const auto [rank, ratio] = score(candidate);
    if (rank < best.rank || (rank == best.rank && ratio < best.smallest_kept_ratio)) {
      best.phases = std::move(candidate);
      best.rank = rank;
      best.smallest_kept_ratio = ratio;
    }
  }
  return best;
}

std::string to_string(ExampleBranch branch) {
  return branch == ExampleBranch::quantum_reduction ? "quantum" : "classical";
}

ExampleBranch parse_branch(const std::string& text) {
  if (text == "quantum" || text == "quantum_reduction") return ExampleBranch::quantum_reduction;
  if (text == "classical" || text == "classical_reduction") return ExampleBranch::classical_reduction;
  throw DomainError("unknown branch '" + text + "' (expected quantum or classical)");
}

std::vector<SweepRow> sweep_reduction_curves(double alpha, const std::vector<double>& betas,
                                             const ToleranceConfig& tol, std::size_t threads) {
  constexpr ExampleBranch kBranches[] = {ExampleBranch::quantum_reduction,
                                         ExampleBranch::classical_reduction};
  std::vector<SweepRow> rows(betas.size() * 2);
  detail::parallel_for(rows.size(), threads, [&](std::size_t idx) {
    SweepRow row;
    row.beta = betas[idx / 2];
    row.branch = kBranches[idx % 2];
    const ExampleGammas g = example_gammas(alpha, row.beta, row.branch);
    row.gamma1 = g.gamma1;
    row.gamma2 = g.gamma2;
    row.gamma_bar = g.gamma_bar;
    const ClassicalHmm model = example_model(alpha, row.beta, g.gamma1, g.gamma2);
    row.gram_rank = build_memory_states(model, PhaseAssignment::zero(), tol).rank;
    const SpectrumReport report = spectrum(build_classical_transfer(model, model), tol);
    const BoundReport bounds = complexity_bounds(report);
    row.spectrum_size_effective = bounds.spectrum_size;
    row.quantum_min_dim = bounds.quantum_min_dim;
    row.classical_min_dim = bounds.classical_min_dim;
    rows[idx] = row;
  });
  return rows;
}

}  // namespace qhmm

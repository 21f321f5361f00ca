#include "qhmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "qhmm/errors.hpp"
#include "random.hpp"

namespace qhmm {

void ToleranceConfig::check() const {
  for (double v : {stoch, cptp, herm, psd, eig_zero, eig_dedup, rank, prob}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("tolerances must be finite and positive");
  }
}

// ---------------------------------------------------------------------------
// ClassicalHmm / Qhmm

ClassicalHmm::ClassicalHmm(Alphabet alphabet, std::vector<RealMatrix> transitions,
                           RealVector initial)
    : alphabet_(std::move(alphabet)),
      transitions_(std::move(transitions)),
      initial_(std::move(initial)) {
  if (alphabet_.size() == 0) throw DimensionError("classical model needs a nonempty alphabet");
  if (transitions_.size() != alphabet_.size()) {
    throw DimensionError("expected one transition matrix per symbol (" +
                         std::to_string(alphabet_.size()) + "), got " +
                         std::to_string(transitions_.size()));
  }
  const auto m = initial_.size();
  if (m == 0) throw DimensionError("classical model needs at least one hidden state");
  for (std::size_t x = 0; x < transitions_.size(); ++x) {
    if (transitions_[x].rows() != m || transitions_[x].cols() != m) {
      throw DimensionError("transition matrix for symbol '" + alphabet_.symbol(x) + "' is " +
                           std::to_string(transitions_[x].rows()) + "x" +
                           std::to_string(transitions_[x].cols()) + ", expected " +
                           std::to_string(m) + "x" + std::to_string(m));
    }
  }
}

RealMatrix ClassicalHmm::total_transition() const {
  RealMatrix total = RealMatrix::Zero(initial_.size(), initial_.size());
  for (const auto& t : transitions_) total += t;
  return total;
}

ClassicalHmm ClassicalHmm::with_initial(RealVector initial) const {
  return ClassicalHmm(alphabet_, transitions_, std::move(initial));
}

Qhmm::Qhmm(Alphabet alphabet, std::vector<std::vector<ComplexMatrix>> kraus,
           ComplexMatrix initial)
    : alphabet_(std::move(alphabet)), kraus_(std::move(kraus)), initial_(std::move(initial)) {
  if (alphabet_.size() == 0) throw DimensionError("quantum model needs a nonempty alphabet");
  if (kraus_.size() != alphabet_.size()) {
    throw DimensionError("expected one Kraus family per symbol (" +
                         std::to_string(alphabet_.size()) + "), got " +
                         std::to_string(kraus_.size()));
  }
  const auto d = initial_.rows();
  if (d == 0 || initial_.cols() != d) throw DimensionError("initial state must be a nonempty square matrix");
  for (std::size_t x = 0; x < kraus_.size(); ++x) {
    if (kraus_[x].empty()) {
      throw DimensionError("Kraus family for symbol '" + alphabet_.symbol(x) + "' is empty");
    }
    for (const auto& k : kraus_[x]) {
      if (k.rows() != d || k.cols() != d) {
        throw DimensionError("Kraus operator for symbol '" + alphabet_.symbol(x) + "' is " +
                             std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                             ", expected " + std::to_string(d) + "x" + std::to_string(d));
      }
    }
  }
}

ComplexMatrix Qhmm::apply(std::size_t symbol, const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus_.at(symbol)) out.noalias() += k * rho * k.adjoint();
  return out;
}

Qhmm Qhmm::with_initial(ComplexMatrix initial) const {
  return Qhmm(alphabet_, kraus_, std::move(initial));
}

const Alphabet& alphabet_of(const AnyModel& model) {
  return std::visit([](const auto& m) -> const Alphabet& { return m.alphabet(); }, model);
}

std::size_t dim_of(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::valid() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<ValidationCheck> ValidationReport::violations() const {
  std::vector<ValidationCheck> out;
  std::copy_if(checks.begin(), checks.end(), std::back_inserter(out),
               [](const auto& c) { return !c.passed; });
  return out;
}

double ValidationReport::residual(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c.residual;
  }
  throw std::out_of_range("no validation check named " + name);
}

namespace {

void add_check(ValidationReport& report, std::string name, double residual, double tolerance) {
  const bool passed = std::isfinite(residual) && residual <= tolerance;
  report.checks.push_back({std::move(name), residual, tolerance, passed});
}

}  // namespace

ValidationReport validate_classical(const ClassicalHmm& model, const ToleranceConfig& tol) {
  tol.check();
  ValidationReport report;
  const auto m = static_cast<Eigen::Index>(model.dim());

  bool finite = model.initial().allFinite();
  for (const auto& t : model.transitions()) finite = finite && t.allFinite();
  add_check(report, "finite_entries", finite ? 0.0 : INFINITY, 0.0);
  if (!finite) return report;

  add_check(report, "initial_nonnegative", std::max(0.0, -model.initial().minCoeff()), tol.stoch);
  add_check(report, "initial_normalized", std::abs(model.initial().sum() - 1.0), tol.stoch);

  double range_excess = 0.0;
  for (const auto& t : model.transitions()) {
    range_excess = std::max({range_excess, -t.minCoeff(), t.maxCoeff() - 1.0});
  }
  add_check(report, "entries_in_unit_interval", range_excess, tol.stoch);

  const RealMatrix total = model.total_transition();
  double column_residual = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    column_residual = std::max(column_residual, std::abs(total.col(i).sum() - 1.0));
  }
  add_check(report, "column_stochastic", column_residual, tol.stoch);
  return report;
}

ValidationReport validate_quantum(const Qhmm& model, const ToleranceConfig& tol) {
  tol.check();
  ValidationReport report;
  const auto d = static_cast<Eigen::Index>(model.dim());

  bool finite = model.initial().allFinite();
  for (const auto& family : model.kraus()) {
    for (const auto& k : family) finite = finite && k.allFinite();
  }
  add_check(report, "finite_entries", finite ? 0.0 : INFINITY, 0.0);
  if (!finite) return report;

  ComplexMatrix completeness = -ComplexMatrix::Identity(d, d);
  for (const auto& family : model.kraus()) {
    for (const auto& k : family) completeness.noalias() += k.adjoint() * k;
  }
  add_check(report, "cptp", completeness.norm(), tol.cptp);

  const ComplexMatrix& rho = model.initial();
  add_check(report, "initial_hermitian", (rho - rho.adjoint()).norm(), tol.herm);
  const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
  add_check(report, "initial_psd", std::max(0.0, -eig.eigenvalues().minCoeff()), tol.psd);
  add_check(report, "initial_trace", std::abs(rho.trace() - Complex(1.0, 0.0)), tol.stoch);
  return report;
}

ValidationReport validate(const AnyModel& model, const ToleranceConfig& tol) {
  return std::visit(
      [&](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ClassicalHmm>) {
          return validate_classical(m, tol);
        } else {
          return validate_quantum(m, tol);
        }
      },
      model);
}

// ---------------------------------------------------------------------------
// Phases and the SIO embedding

PhaseAssignment PhaseAssignment::zero() { return PhaseAssignment{}; }

PhaseAssignment PhaseAssignment::random(std::uint64_t seed) {
  PhaseAssignment p;
  p.fn = [seed](std::size_t i, std::size_t j, std::size_t x) {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ i);
    h = detail::splitmix64(h ^ (j + 0x100000000ULL));
    h = detail::splitmix64(h ^ (x + 0x200000000ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
  };
  p.label = "random:" + std::to_string(seed);
  return p;
}

PhaseAssignment PhaseAssignment::custom(
    std::function<double(std::size_t, std::size_t, std::size_t)> fn, std::string label) {
  return PhaseAssignment{std::move(fn), std::move(label)};
}

Qhmm sio_embed(const ClassicalHmm& model, const PhaseAssignment& phases) {
  const auto m = static_cast<Eigen::Index>(model.dim());
  std::vector<std::vector<ComplexMatrix>> kraus(model.alphabet().size());
  for (std::size_t x = 0; x < model.alphabet().size(); ++x) {
    const RealMatrix& t = model.transition(x);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double p = t(j, i);
        if (p <= 0.0) continue;
        ComplexMatrix k = ComplexMatrix::Zero(m, m);
        k(j, i) = std::polar(std::sqrt(p), phases(i, j, x));
        kraus[x].push_back(std::move(k));
      }
    }
    if (kraus[x].empty()) kraus[x].push_back(ComplexMatrix::Zero(m, m));
  }
  ComplexMatrix rho = model.initial().cast<Complex>().asDiagonal();
  return Qhmm(model.alphabet(), std::move(kraus), std::move(rho));
}

RealVector stationary_distribution(const ClassicalHmm& model) {
  const auto m = static_cast<Eigen::Index>(model.dim());
  // Stack (T − I)π = 0 with 1ᵀπ = 1 and solve in the least-squares sense.
  RealMatrix system(m + 1, m);
  system.topRows(m) = model.total_transition() - RealMatrix::Identity(m, m);
  system.row(m).setOnes();
  RealVector rhs = RealVector::Zero(m + 1);
  rhs(m) = 1.0;
  Eigen::ColPivHouseholderQR<RealMatrix> qr(system);
  RealVector pi = qr.solve(rhs);
  if (!pi.allFinite() || (system * pi - rhs).norm() > 1e-8) {
    throw NumericalError("no stationary distribution found");
  }
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

// ---------------------------------------------------------------------------
// Example family

namespace {

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError(std::string(name) + " must lie strictly inside (0, 1), got " +
                      std::to_string(v));
  }
}

}  // namespace

ExampleGammas example_gammas(double alpha, double beta, ExampleBranch branch) {
  require_open_unit(alpha, "alpha");
  require_open_unit(beta, "beta");
  ExampleGammas g;
  switch (branch) {
    case ExampleBranch::quantum_reduction: {
      const double root_sum = std::sqrt(alpha) + std::sqrt(beta);
      const double nu2 = root_sum * root_sum + (1.0 - alpha) + (1.0 - beta);
      g.nu = std::sqrt(nu2);
      g.gamma1 = root_sum * root_sum / nu2;
      g.gamma2 = (1.0 - alpha) / nu2;
      g.gamma_bar = (1.0 - beta) / nu2;
      break;
    }
    case ExampleBranch::classical_reduction:
      g.nu = 2.0;
      g.gamma1 = (alpha + beta) / g.nu;
      g.gamma2 = (1.0 - alpha) / g.nu;
      g.gamma_bar = 1.0 - g.gamma1 - g.gamma2;
      break;
  }
  return g;
}

ClassicalHmm example_model(double alpha, double beta, double gamma1, double gamma2,
                           std::optional<RealVector> initial) {
  require_open_unit(alpha, "alpha");
  require_open_unit(beta, "beta");
  const double gamma_bar = 1.0 - gamma1 - gamma2;
  if (gamma1 < 0.0 || gamma2 < 0.0 || gamma_bar < -1e-15) {
    throw DomainError("gamma1, gamma2 must be nonnegative with gamma1 + gamma2 <= 1");
  }
  RealMatrix t0(3, 3);
  t0 << alpha, beta, gamma1,
        1.0 - alpha, 0.0, gamma2,
        0.0, 0.0, 0.0;
  RealMatrix t1(3, 3);
  t1 << 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0,
        0.0, 1.0 - beta, std::max(0.0, gamma_bar);
  ClassicalHmm model(Alphabet({"0", "1"}), {t0, t1}, RealVector::Constant(3, 1.0 / 3.0));
  if (initial) return model.with_initial(std::move(*initial));
  return model.with_initial(stationary_distribution(model));
}

ClassicalHmm example_model_family(double alpha, double beta, ExampleBranch branch,
                                  std::optional<RealVector> initial) {
  const ExampleGammas g = example_gammas(alpha, beta, branch);
  return example_model(alpha, beta, g.gamma1, g.gamma2, std::move(initial));
}

// ---------------------------------------------------------------------------
// Random models

ComplexMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
  detail::Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) g(r, c) = rng.complex_normal();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

Qhmm random_qhmm(std::size_t dim, std::size_t alphabet_size, std::size_t kraus_per_symbol,
                 std::uint64_t seed) {
  if (dim == 0 || alphabet_size == 0 || kraus_per_symbol == 0) {
    throw DomainError("random_qhmm arguments must all be >= 1");
  }
  detail::Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(dim);
  const auto blocks = static_cast<Eigen::Index>(alphabet_size * kraus_per_symbol);

  ComplexMatrix g(d * blocks, d);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = rng.complex_normal();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  const ComplexMatrix isometry =
      qr.householderQ() * ComplexMatrix::Identity(g.rows(), d);

  std::vector<std::vector<ComplexMatrix>> kraus(alphabet_size);
  Eigen::Index block = 0;
  for (auto& family : kraus) {
    for (std::size_t a = 0; a < kraus_per_symbol; ++a, ++block) {
      family.push_back(isometry.middleRows(block * d, d));
    }
  }

  ComplexMatrix h(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) h(r, c) = rng.complex_normal();
  }
  ComplexMatrix rho = h * h.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return Qhmm(Alphabet::numeric(alphabet_size), std::move(kraus), std::move(rho));
}

ClassicalHmm random_classical_hmm(std::size_t dim, std::size_t alphabet_size, std::uint64_t seed,
                                  double sparsity) {
  if (dim == 0 || alphabet_size == 0) throw DomainError("random_classical_hmm needs dim, alphabet >= 1");
  if (!(sparsity >= 0.0 && sparsity < 1.0)) throw DomainError("sparsity must lie in [0, 1)");
  detail::Rng rng(seed);
  const auto m = static_cast<Eigen::Index>(dim);
  std::vector<RealMatrix> t(alphabet_size, RealMatrix::Zero(m, m));
  for (Eigen::Index i = 0; i < m; ++i) {
    double column_sum = 0.0;
    for (auto& tx : t) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double w = rng.uniform();
        const bool keep = rng.uniform() >= sparsity;
        tx(j, i) = keep ? w : 0.0;
        column_sum += tx(j, i);
      }
    }
    if (column_sum == 0.0) {
      t[0](i, i) = 1.0;
      column_sum = 1.0;
    }
    for (auto& tx : t) tx.col(i) /= column_sum;
  }
  RealVector pi(m);
  for (Eigen::Index i = 0; i < m; ++i) pi(i) = -std::log(1.0 - rng.uniform());
  pi /= pi.sum();
  return ClassicalHmm(Alphabet::numeric(alphabet_size), std::move(t), std::move(pi));
}

Qhmm conjugate_by_unitary(const Qhmm& model, const ComplexMatrix& unitary,
                          const ToleranceConfig& tol) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  if (unitary.rows() != d || unitary.cols() != d) {
    throw DimensionError("unitary must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  const double residual = (unitary.adjoint() * unitary - ComplexMatrix::Identity(d, d)).norm();
  if (!(residual <= tol.cptp)) {
    throw DomainError("matrix is not unitary (residual " + std::to_string(residual) + ")");
  }
  std::vector<std::vector<ComplexMatrix>> kraus;
  kraus.reserve(model.kraus().size());
  for (const auto& family : model.kraus()) {
    auto& out = kraus.emplace_back();
    for (const auto& k : family) out.push_back(unitary * k * unitary.adjoint());
  }
  return Qhmm(model.alphabet(), std::move(kraus),
              unitary * model.initial() * unitary.adjoint());
}

}  // namespace qhmm

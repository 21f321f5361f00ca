#include "qhmm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qhmm/errors.hpp"
#include "qhmm/process.hpp"

namespace qhmm {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

double condition_number(const ComplexMatrix& v) {
  Eigen::VectorXd sv;
  if (v.rows() <= 256) {
    sv = Eigen::JacobiSVD<ComplexMatrix>(v).singularValues();
  } else {
    sv = Eigen::BDCSVD<ComplexMatrix>(v).singularValues();
  }
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0)) return INFINITY;
  return sv(0) / smallest;
}

Complex power(Complex z, std::size_t n) {
  Complex out(1.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) out *= z;
  return out;
}

// Descending |λ|, then ascending arg. Magnitudes are compared on a grid of
// 1e-9 · radius so that conjugate pairs order by arg alone.
void sort_clusters(std::vector<EigenCluster>& clusters, double radius) {
  const double step = radius > 0.0 ? 1e-9 * radius : 1.0;
  auto key = [step](const EigenCluster& c) { return std::llround(std::abs(c.value) / step); };
  std::sort(clusters.begin(), clusters.end(), [&](const EigenCluster& a, const EigenCluster& b) {
    const auto ka = key(a);
    const auto kb = key(b);
    if (ka != kb) return ka > kb;
    return std::arg(a.value) < std::arg(b.value);
  });
}

// Pairs clusters of two reports whose values lie within `radius_tol` of each
// other. Returns, for each cluster in `a`, the matched index in `b` (or
// npos); greedy by distance, each cluster used at most once.
std::vector<std::size_t> match_clusters(const std::vector<EigenCluster>& a,
                                        const std::vector<EigenCluster>& b, double radius_tol) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  struct Pair {
    double dist;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double dist = std::abs(a[i].value - b[j].value);
      if (dist <= radius_tol) pairs.push_back({dist, i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.dist < y.dist; });
  std::vector<std::size_t> match(a.size(), npos);
  std::vector<bool> used(b.size(), false);
  for (const auto& p : pairs) {
    if (match[p.i] == npos && !used[p.j]) {
      match[p.i] = p.j;
      used[p.j] = true;
    }
  }
  return match;
}

}  // namespace

std::vector<EigenCluster> SpectrumReport::effective() const {
  std::vector<EigenCluster> out;
  for (const auto& c : distinct_nonzero) {
    if (std::abs(c.alpha) > tolerances_used.eig_zero) out.push_back(c);
  }
  return out;
}

Complex SpectrumReport::reconstruct_moment(std::size_t length) const {
  Complex sum(0.0, 0.0);
  for (const auto& c : distinct_nonzero) sum += c.alpha * power(c.value, length);
  if (zero_cluster && length == 0) sum += zero_cluster->alpha;
  return sum;
}

bool SpectrumReport::reliable() const noexcept {
  return diagonalizable && self_test_residual <= kSelfTestTolerance;
}

SpectrumReport spectrum(const TransferOperator& op, const ToleranceConfig& tol) {
  tol.check();
  const Eigen::Index n = op.matrix.rows();
  if (n == 0 || op.matrix.cols() != n || op.boundary.size() != n || op.initial.size() != n) {
    throw DimensionError("malformed transfer operator");
  }
  if (!op.matrix.allFinite()) throw NumericalError("transfer operator has non-finite entries");

  SpectrumReport report;
  report.tolerances_used = tol;

  // Deflate the numerical null space first. With E P = Q R of rank r,
  // E = A B for A = Q_r and B = R_r Pᵀ; the nonzero spectrum of E is that of
  // M = B A, and bᵀ E^L ρ = (bᵀ A) M^(L-1) (B ρ) for L >= 1. Large exact null
  // spaces (doubled-index embeddings) otherwise wreck the eigenvector basis.
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(op.matrix);
  qr.setThreshold(kNullSpaceThreshold);
  const Eigen::Index r = qr.rank();

  ComplexVector values;
  ComplexVector contribution;
  bool zero_block_defective = false;
  if (r == n) {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(op.matrix, true);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    values = solver.eigenvalues();
    const ComplexMatrix& vectors = solver.eigenvectors();
    report.condition_estimate = condition_number(vectors);
    // α contributions per eigenvector: (boundaryᵀ v_k) (w_kᵀ initial), where
    // the rows w_k of V⁻¹ are the biorthogonal left eigenvectors.
    const ComplexVector right = vectors.partialPivLu().solve(op.initial);
    const ComplexVector left = (op.boundary.transpose() * vectors).transpose();
    contribution = left.cwiseProduct(right);
  } else {
    values = ComplexVector::Zero(n);
    contribution = ComplexVector::Zero(n);
    if (r > 0) {
      const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, r);
      const ComplexMatrix upper = qr.matrixR().topRows(r).triangularView<Eigen::Upper>();
      const ComplexMatrix b = upper * qr.colsPermutation().transpose();
      const ComplexMatrix reduced = b * q;
      // rank(E²) = rank(M); a drop below r means a Jordan block at zero.
      Eigen::ColPivHouseholderQR<ComplexMatrix> reduced_qr(reduced);
      reduced_qr.setThreshold(kNullSpaceThreshold);
      zero_block_defective = reduced_qr.rank() < r;
      Eigen::ComplexEigenSolver<ComplexMatrix> solver(reduced, true);
      if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
      const ComplexMatrix& vectors = solver.eigenvectors();
      report.condition_estimate = condition_number(vectors);
      const ComplexVector right = vectors.partialPivLu().solve(b * op.initial);
      const ComplexVector left = (op.boundary.transpose() * q * vectors).transpose();
      const double reduced_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
      for (Eigen::Index k = 0; k < r; ++k) {
        const Complex mu = solver.eigenvalues()(k);
        values(k) = mu;
        if (std::abs(mu) > tol.eig_zero * reduced_radius) contribution(k) = left(k) * right(k) / mu;
      }
    }
    // The zero eigenvalues carry whatever the L = 0 moment still needs.
    const Complex total = op.boundary.transpose() * op.initial;
    contribution(n - 1) += total - contribution.sum();
  }
  report.raw_eigenvalues.assign(values.data(), values.data() + n);
  report.spectral_radius = values.cwiseAbs().maxCoeff();
  report.diagonalizable = !zero_block_defective && std::isfinite(report.condition_estimate) &&
                          report.condition_estimate <= kDefectiveConditionLimit;

  const double radius = report.spectral_radius;
  const double dedup = tol.eig_dedup * radius;
  const double zero = tol.eig_zero * radius;

  DisjointSets sets(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(values(i) - values(j)) <= dedup) sets.unite(i, j);
    }
  }

  std::vector<EigenCluster> clusters;
  std::vector<std::size_t> slot(static_cast<std::size_t>(n), static_cast<std::size_t>(-1));
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t root = sets.find(static_cast<std::size_t>(k));
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = clusters.size();
      clusters.push_back({Complex(0.0, 0.0), 0, Complex(0.0, 0.0)});
    }
    auto& c = clusters[slot[root]];
    c.value += values(k);
    c.multiplicity += 1;
    c.alpha += contribution(k);
  }

  for (auto& c : clusters) {
    c.value /= static_cast<double>(c.multiplicity);
    if (radius == 0.0 || std::abs(c.value) <= zero) {
      if (!report.zero_cluster) report.zero_cluster = EigenCluster{Complex(0.0, 0.0), 0, Complex(0.0, 0.0)};
      report.zero_cluster->multiplicity += c.multiplicity;
      report.zero_cluster->alpha += c.alpha;
    } else {
      report.distinct_nonzero.push_back(c);
    }
  }
  sort_clusters(report.distinct_nonzero, radius);
  report.effective_count = report.effective().size();

  // Moment self-test against direct powers of the operator.
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  report.self_test_max_length = std::max<std::size_t>(8, 2 * side);
  ComplexVector v = op.initial;
  for (std::size_t length = 0; length <= report.self_test_max_length; ++length) {
    const Complex direct = op.boundary.transpose() * v;
    report.self_test_residual =
        std::max(report.self_test_residual, std::abs(direct - report.reconstruct_moment(length)));
    v = op.matrix * v;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Bounds

std::size_t integer_root_ceil(std::size_t count, unsigned power) {
  if (power == 0) throw DomainError("root power must be positive");
  auto reaches = [&](std::size_t base) {
    std::size_t acc = 1;
    for (unsigned k = 0; k < power; ++k) {
      if (acc > count / base) return true;  // acc * base would exceed count
      acc *= base;
    }
    return acc >= count;
  };
  std::size_t n = 1;
  while (!reaches(n)) ++n;
  return n;
}

BoundReport complexity_bounds(std::size_t spectrum_size) {
  if (spectrum_size == 0) throw DomainError("complexity bounds need a nonempty spectrum");
  BoundReport b;
  b.spectrum_size = spectrum_size;
  b.raw_spectrum_size = spectrum_size;
  b.quantum_min_dim = integer_root_ceil(spectrum_size, 4);
  b.classical_min_dim = integer_root_ceil(spectrum_size, 2);
  b.raw_quantum_min_dim = b.quantum_min_dim;
  b.raw_classical_min_dim = b.classical_min_dim;
  b.c_q_lower_bits = std::log2(static_cast<double>(b.quantum_min_dim));
  b.c_c_lower_bits = std::log2(static_cast<double>(b.classical_min_dim));
  return b;
}

BoundReport complexity_bounds(const SpectrumReport& report) {
  if (report.effective_count == 0) throw DomainError("spectrum has no effective eigenvalues");
  BoundReport b = complexity_bounds(report.effective_count);
  b.raw_spectrum_size = report.raw_count();
  b.raw_quantum_min_dim = integer_root_ceil(std::max<std::size_t>(1, b.raw_spectrum_size), 4);
  b.raw_classical_min_dim = integer_root_ceil(std::max<std::size_t>(1, b.raw_spectrum_size), 2);
  return b;
}

// ---------------------------------------------------------------------------
// Equivalence

std::string to_string(EquivalenceVerdict::Outcome outcome) {
  switch (outcome) {
    case EquivalenceVerdict::Outcome::consistent: return "consistent";
    case EquivalenceVerdict::Outcome::refuted: return "refuted";
    case EquivalenceVerdict::Outcome::withheld: return "withheld";
  }
  return "unknown";
}

std::vector<std::pair<std::size_t, double>> vandermonde_residual(const SpectrumReport& a,
                                                                 const SpectrumReport& b) {
  const double radius = std::max(a.spectral_radius, b.spectral_radius);
  const double tol = std::max(a.tolerances_used.eig_dedup, b.tolerances_used.eig_dedup) * radius;
  const auto match = match_clusters(a.distinct_nonzero, b.distinct_nonzero, tol);

  std::vector<std::pair<Complex, Complex>> terms;  // (λ, Δα)
  std::vector<bool> used(b.distinct_nonzero.size(), false);
  for (std::size_t i = 0; i < a.distinct_nonzero.size(); ++i) {
    Complex delta = a.distinct_nonzero[i].alpha;
    if (match[i] != static_cast<std::size_t>(-1)) {
      delta -= b.distinct_nonzero[match[i]].alpha;
      used[match[i]] = true;
    }
    terms.emplace_back(a.distinct_nonzero[i].value, delta);
  }
  for (std::size_t j = 0; j < b.distinct_nonzero.size(); ++j) {
    if (!used[j]) terms.emplace_back(b.distinct_nonzero[j].value, -b.distinct_nonzero[j].alpha);
  }

  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t length = 1; length <= terms.size(); ++length) {
    Complex sum(0.0, 0.0);
    for (const auto& [lambda, delta] : terms) sum += power(lambda, length) * delta;
    out.emplace_back(length, std::abs(sum));
  }
  return out;
}

EquivalenceVerdict check_equivalence(const AnyModel& a, const AnyModel& b,
                                     const EquivalenceOptions& options) {
  if (!(alphabet_of(a) == alphabet_of(b))) throw DomainError("models have different alphabets");
  EquivalenceVerdict verdict;

  std::string brute_reason;
  if (options.brute_force_length) {
    verdict.brute_force_max_length = *options.brute_force_length;
    bool match = true;
    for (std::size_t length = 1; length <= *options.brute_force_length; ++length) {
      const auto da = enumerate_distribution(a, length);
      const auto db = enumerate_distribution(b, length);
      for (std::size_t k = 0; k < da.size(); ++k) {
        const double gap = std::abs(da.probabilities[k] - db.probabilities[k]);
        verdict.brute_force_max_gap = std::max(verdict.brute_force_max_gap, gap);
        if (gap > options.brute_force_tolerance && match) {
          match = false;
          brute_reason = "word probabilities differ at length " + std::to_string(length) +
                         " (gap " + std::to_string(gap) + ")";
        }
      }
    }
    verdict.brute_force_match = match;
  }

  const SpectrumReport sa = spectrum(build_self_transfer(a), options.tol);
  const SpectrumReport sb = spectrum(build_self_transfer(b), options.tol);

  if (!sa.reliable() || !sb.reliable()) {
    if (verdict.brute_force_match == false) {
      verdict.outcome = EquivalenceVerdict::Outcome::refuted;
      verdict.reason = brute_reason;
    } else {
      verdict.outcome = EquivalenceVerdict::Outcome::withheld;
      verdict.reason = "transfer operator is defective or failed its moment self-test";
    }
    return verdict;
  }

  const auto ea = sa.effective();
  const auto eb = sb.effective();
  const double radius = std::max(sa.spectral_radius, sb.spectral_radius);
  const auto match = match_clusters(ea, eb, options.tol.eig_dedup * radius);

  verdict.spectra_match = ea.size() == eb.size();
  verdict.coefficients_match = true;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (match[i] == static_cast<std::size_t>(-1)) {
      verdict.spectra_match = false;
      continue;
    }
    const auto& ca = ea[i];
    const auto& cb = eb[match[i]];
    verdict.max_eigenvalue_gap = std::max(verdict.max_eigenvalue_gap, std::abs(ca.value - cb.value));
    const double gap = std::abs(ca.alpha - cb.alpha);
    verdict.max_coefficient_gap = std::max(verdict.max_coefficient_gap, gap);
    if (gap > options.coefficient_tolerance) verdict.coefficients_match = false;
  }

  verdict.vandermonde = vandermonde_residual(sa, sb);
  const std::size_t union_size = std::max<std::size_t>(1, verdict.vandermonde.size());
  bool moments_ok = true;
  for (std::size_t length = 1; length <= union_size; ++length) {
    MomentCheck check;
    check.length = length;
    check.lhs = sa.reconstruct_moment(length).real();
    check.rhs = sb.reconstruct_moment(length).real();
    check.residual = std::abs(check.lhs - check.rhs);
    if (check.residual > options.moment_tolerance) moments_ok = false;
    verdict.moment_checks.push_back(check);
  }

  if (!verdict.spectra_match) {
    verdict.outcome = EquivalenceVerdict::Outcome::refuted;
    verdict.reason = "effective spectra differ (" + std::to_string(ea.size()) + " vs " +
                     std::to_string(eb.size()) + " effective eigenvalues or unmatched values)";
  } else if (!verdict.coefficients_match) {
    verdict.outcome = EquivalenceVerdict::Outcome::refuted;
    verdict.reason = "coefficients of matched eigenvalues differ (max gap " +
                     std::to_string(verdict.max_coefficient_gap) + ")";
  } else if (!moments_ok) {
    verdict.outcome = EquivalenceVerdict::Outcome::refuted;
    verdict.reason = "self-overlap moment sequences differ";
  } else if (verdict.brute_force_match == false) {
    verdict.outcome = EquivalenceVerdict::Outcome::refuted;
    verdict.reason = brute_reason;
  } else {
    verdict.outcome = EquivalenceVerdict::Outcome::consistent;
    verdict.reason = "all necessary conditions hold";
  }
  return verdict;
}

}  // namespace qhmm

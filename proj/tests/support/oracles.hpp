#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's evaluation, transfer or spectral code.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qhmm/model.hpp"

namespace qhmm::oracle {

inline std::vector<std::vector<std::size_t>> all_words(std::size_t symbols, std::size_t length) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t l = 0; l < length; ++l) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& w : out) {
      for (std::size_t x = 0; x < symbols; ++x) {
        auto v = w;
        v.push_back(x);
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

// Sum over every hidden path s_0 ... s_L of π(s_0) Π T(x_t)(s_{t+1}, s_t).
inline double path_sum(const ClassicalHmm& m, const std::vector<std::size_t>& w) {
  const std::size_t n = m.dim();
  std::vector<std::size_t> path(w.size() + 1, 0);
  double total = 0.0;
  while (true) {
    double p = m.initial()(static_cast<Eigen::Index>(path[0]));
    for (std::size_t t = 0; t < w.size() && p != 0.0; ++t) {
      p *= m.transition(w[t])(static_cast<Eigen::Index>(path[t + 1]), static_cast<Eigen::Index>(path[t]));
    }
    total += p;
    std::size_t k = 0;
    while (k < path.size() && ++path[k] == n) path[k++] = 0;
    if (k == path.size()) break;
  }
  return total;
}

// Applies each Kraus operator explicitly, ρ ← Σ K ρ K†, then takes the trace.
inline std::complex<double> kraus_trace(const Qhmm& m, const std::vector<std::size_t>& w) {
  Eigen::MatrixXcd rho = m.initial();
  for (std::size_t x : w) {
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (const auto& k : m.kraus(x)) next += k * rho * k.adjoint();
    rho = next;
  }
  return rho.trace();
}

inline double probability(const AnyModel& m, const std::vector<std::size_t>& w) {
  if (const auto* c = std::get_if<ClassicalHmm>(&m)) return path_sum(*c, w);
  return kraus_trace(std::get<Qhmm>(m), w).real();
}

inline double overlap(const AnyModel& a, const AnyModel& b, std::size_t length) {
  double s = 0.0;
  for (const auto& w : all_words(alphabet_of(a).size(), length)) s += probability(a, w) * probability(b, w);
  return s;
}

inline ClassicalHmm coin(double p) {
  Eigen::MatrixXd t0(1, 1), t1(1, 1);
  t0 << p;
  t1 << 1.0 - p;
  return ClassicalHmm(Alphabet::numeric(2), {t0, t1}, Eigen::VectorXd::Ones(1));
}

inline Qhmm quantum_coin(double p) {
  Eigen::MatrixXcd k0(1, 1), k1(1, 1), rho(1, 1);
  k0 << std::sqrt(p);
  k1 << std::sqrt(1.0 - p);
  rho << 1.0;
  return Qhmm(Alphabet::numeric(2), {{k0}, {k1}}, rho);
}

// The printed three-state matrices, written out by hand.
inline std::vector<Eigen::MatrixXd> example_matrices(double a, double b, double g1, double g2) {
  const double gb = 1.0 - g1 - g2;
  Eigen::MatrixXd t0(3, 3), t1(3, 3);
  t0 << a, b, g1,
        1 - a, 0, g2,
        0, 0, 0;
  t1 << 0, 0, 0,
        0, 0, 0,
        0, 1 - b, gb;
  return {t0, t1};
}

// Quantum-branch weights straight from the closed form.
struct Gammas {
  double g1, g2, gb;
};
inline Gammas quantum_branch(double a, double b) {
  const double nu2 = 2.0 + 2.0 * std::sqrt(a * b);
  const double s = std::sqrt(a) + std::sqrt(b);
  return {s * s / nu2, (1 - a) / nu2, (1 - b) / nu2};
}
inline Gammas classical_branch(double a, double b) {
  const double g1 = (a + b) / 2.0;
  const double g2 = (1 - a) / 2.0;
  return {g1, g2, 1.0 - g1 - g2};
}

// Phases on the classical reduction line that make |ψ_C⟩ a combination of
// |ψ_A⟩ and |ψ_B⟩: the C→C emission of symbol 1 is rotated by π/2 and the
// C→A emission of symbol 0 by atan(√(β/α)).
inline PhaseAssignment classical_line_witness(double a, double b) {
  const double c1 = std::atan(std::sqrt(b / a));
  return PhaseAssignment::custom(
      [c1](std::size_t from, std::size_t to, std::size_t x) {
        if (from == 2 && to == 2 && x == 1) return M_PI / 2.0;
        if (from == 2 && to == 0 && x == 0) return c1;
        return 0.0;
      },
      "witness");
}

}  // namespace qhmm::oracle

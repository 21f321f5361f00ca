#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qhmm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Kronecker product a ⊗ b; block (i, j) of the result is a(i, j) * b.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Column-stacking vectorization: vec(m)[r + c * rows] = m(r, c).
inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

/// Inverse of vec() for a square d×d matrix.
inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace qhmm

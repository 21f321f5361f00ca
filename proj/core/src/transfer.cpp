#include "qhmm/transfer.hpp"

#include <cmath>

#include "qhmm/errors.hpp"

namespace qhmm {

namespace {

void check_dense_limit(Eigen::Index dim) {
  if (dim > kMaxTransferDim) {
    throw DimensionError("transfer operator of dimension " + std::to_string(dim) +
                         " exceeds the dense limit of " + std::to_string(kMaxTransferDim));
  }
}

void check_same_alphabet(const Alphabet& a, const Alphabet& b) {
  if (!(a == b)) throw DomainError("transfer operator needs models over the same alphabet");
}

}  // namespace

std::string to_string(TransferKind kind) {
  switch (kind) {
    case TransferKind::quantum: return "quantum";
    case TransferKind::classical: return "classical";
    case TransferKind::mixed: return "mixed";
  }
  return "unknown";
}

ComplexMatrix vectorize_map(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw DimensionError("vectorize_map needs at least one Kraus operator");
  const auto d = kraus.front().rows();
  ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw DimensionError("Kraus operators have ragged dimensions");
    out += kron(k.conjugate(), k);
  }
  return out;
}

TransferOperator build_quantum_transfer(const Qhmm& a, const Qhmm& b) {
  check_same_alphabet(a.alphabet(), b.alphabet());
  const auto da = static_cast<Eigen::Index>(a.dim());
  const auto db = static_cast<Eigen::Index>(b.dim());
  check_dense_limit(da * da * db * db);

  TransferOperator op;
  op.kind = da == db ? TransferKind::quantum : TransferKind::mixed;
  op.dim_a = a.dim();
  op.dim_b = b.dim();
  op.matrix = ComplexMatrix::Zero(da * da * db * db, da * da * db * db);
  for (std::size_t x = 0; x < a.alphabet().size(); ++x) {
    op.matrix += kron(vectorize_map(a.kraus(x)), vectorize_map(b.kraus(x)));
  }
  const ComplexVector id_a = vec(ComplexMatrix::Identity(da, da));
  const ComplexVector id_b = vec(ComplexMatrix::Identity(db, db));
  op.boundary = kron(id_a, id_b);
  op.initial = kron(vec(a.initial()), vec(b.initial()));
  return op;
}

TransferOperator build_classical_transfer(const ClassicalHmm& a, const ClassicalHmm& b) {
  check_same_alphabet(a.alphabet(), b.alphabet());
  const auto ma = static_cast<Eigen::Index>(a.dim());
  const auto mb = static_cast<Eigen::Index>(b.dim());
  check_dense_limit(ma * mb);

  TransferOperator op;
  op.kind = TransferKind::classical;
  op.dim_a = a.dim();
  op.dim_b = b.dim();
  RealMatrix sum = RealMatrix::Zero(ma * mb, ma * mb);
  for (std::size_t x = 0; x < a.alphabet().size(); ++x) {
    sum += kron(a.transition(x), b.transition(x));
  }
  op.matrix = sum.cast<Complex>();
  op.boundary = ComplexVector::Ones(ma * mb);
  op.initial = kron(a.initial(), b.initial()).cast<Complex>();
  return op;
}

TransferOperator build_self_transfer(const AnyModel& model) {
  if (const auto* c = std::get_if<ClassicalHmm>(&model)) return build_classical_transfer(*c, *c);
  const auto& q = std::get<Qhmm>(model);
  return build_quantum_transfer(q, q);
}

TransferOperator embed_classical_in_quantum(const TransferOperator& classical) {
  if (classical.kind != TransferKind::classical) {
    throw DomainError("embed_classical_in_quantum expects a classical transfer operator");
  }
  const auto ma = static_cast<Eigen::Index>(classical.dim_a);
  const auto mb = static_cast<Eigen::Index>(classical.dim_b);
  const Eigen::Index big = ma * ma * mb * mb;
  check_dense_limit(big);

  // Classical pair index (i, j) -> doubled quantum index |ii⟩|jj⟩.
  auto lift = [&](Eigen::Index pair) {
    const Eigen::Index i = pair / mb;
    const Eigen::Index j = pair % mb;
    return (i * ma + i) * (mb * mb) + (j * mb + j);
  };

  TransferOperator op;
  op.kind = ma == mb ? TransferKind::quantum : TransferKind::mixed;
  op.dim_a = classical.dim_a;
  op.dim_b = classical.dim_b;
  op.matrix = ComplexMatrix::Zero(big, big);
  op.boundary = ComplexVector::Zero(big);
  op.initial = ComplexVector::Zero(big);
  const Eigen::Index small = ma * mb;
  for (Eigen::Index c = 0; c < small; ++c) {
    op.boundary(lift(c)) = classical.boundary(c);
    op.initial(lift(c)) = classical.initial(c);
    for (Eigen::Index r = 0; r < small; ++r) op.matrix(lift(r), lift(c)) = classical.matrix(r, c);
  }
  return op;
}

double moment_via_transfer(const TransferOperator& op, std::size_t length, double imag_tolerance) {
  ComplexVector v = op.initial;
  for (std::size_t k = 0; k < length; ++k) v = op.matrix * v;
  const Complex value = op.boundary.transpose() * v;
  if (std::abs(value.imag()) > imag_tolerance) {
    throw NumericalError("transfer moment has imaginary part " + std::to_string(value.imag()));
  }
  return value.real();
}

}  // namespace qhmm

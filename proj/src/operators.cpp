#include "srad/operators.hpp"

#include <cmath>
#include <sstream>

namespace srad {

namespace {

SparseMatrixC from_triplets(Index n, const std::vector<Eigen::Triplet<Complex>>& t) {
  SparseMatrixC m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

QuantumOperator::QuantumOperator(SparseMatrixC matrix, Index boson_dim, Index spin_dim)
    : m_(std::move(matrix)), boson_dim_(boson_dim), spin_dim_(spin_dim) {
  if (boson_dim < 1 || spin_dim < 1) throw ValidationError("operator dimensions must be positive");
  if (m_.rows() != m_.cols()) throw ValidationError("operator matrix must be square");
  if (m_.rows() != boson_dim * spin_dim) {
    std::ostringstream os;
    os << "matrix dimension " << m_.rows() << " != boson_dim * spin_dim = " << boson_dim * spin_dim;
    throw ValidationError(os.str());
  }
  m_.makeCompressed();
}

QuantumOperator QuantumOperator::identity(Index boson_dim, Index spin_dim) {
  return diagonal(Eigen::VectorXcd::Ones(boson_dim * spin_dim), boson_dim, spin_dim);
}

QuantumOperator QuantumOperator::zero(Index boson_dim, Index spin_dim) {
  const Index n = boson_dim * spin_dim;
  return QuantumOperator(SparseMatrixC(n, n), boson_dim, spin_dim);
}

QuantumOperator QuantumOperator::diagonal(const Eigen::VectorXcd& diag, Index boson_dim,
                                          Index spin_dim) {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(diag.size()));
  for (Index i = 0; i < diag.size(); ++i)
    if (diag[i] != Complex(0.0)) t.emplace_back(i, i, diag[i]);
  return QuantumOperator(from_triplets(diag.size(), t), boson_dim, spin_dim);
}

QuantumOperator QuantumOperator::from_dense(const Eigen::MatrixXcd& m, Index boson_dim,
                                            Index spin_dim) {
  return QuantumOperator(m.sparseView(Complex(0.0), 0.0), boson_dim, spin_dim);
}

QuantumOperator QuantumOperator::adjoint() const {
  return QuantumOperator(SparseMatrixC(m_.adjoint()), boson_dim_, spin_dim_);
}

double QuantumOperator::hermiticity_defect() const {
  const SparseMatrixC diff = m_ - SparseMatrixC(m_.adjoint());
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

bool QuantumOperator::is_real(double tol) const {
  for (Index k = 0; k < m_.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(m_, k); it; ++it)
      if (std::abs(it.value().imag()) > tol) return false;
  return true;
}

bool QuantumOperator::is_diagonal() const {
  for (Index k = 0; k < m_.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(m_, k); it; ++it)
      if (it.row() != it.col() && it.value() != Complex(0.0)) return false;
  return true;
}

double QuantumOperator::norm_inf() const {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(dim());
  for (Index k = 0; k < m_.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(m_, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

void QuantumOperator::check_same_space(const QuantumOperator& other, const char* what) const {
  if (boson_dim_ != other.boson_dim_ || spin_dim_ != other.spin_dim_) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << boson_dim_ << "x" << spin_dim_ << " vs "
       << other.boson_dim_ << "x" << other.spin_dim_ << ")";
    throw ValidationError(os.str());
  }
}

QuantumOperator& QuantumOperator::operator+=(const QuantumOperator& rhs) {
  check_same_space(rhs, "operator+");
  m_ += rhs.m_;
  return *this;
}

QuantumOperator& QuantumOperator::operator-=(const QuantumOperator& rhs) {
  check_same_space(rhs, "operator-");
  m_ -= rhs.m_;
  return *this;
}

QuantumOperator& QuantumOperator::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b) {
  a.check_same_space(b, "operator*");
  return QuantumOperator(SparseMatrixC(a.m_ * b.m_), a.boson_dim_, a.spin_dim_);
}

LadderOperators ladder_operators(Index boson_dim) {
  if (boson_dim < 2) throw ValidationError("ladder_operators: boson_dim must be >= 2");
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index n = 1; n < boson_dim; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  QuantumOperator a(from_triplets(boson_dim, t), boson_dim, 1);
  QuantumOperator ad = a.adjoint();
  Eigen::VectorXcd diag(boson_dim);
  for (Index n = 0; n < boson_dim; ++n) diag[n] = static_cast<double>(n);
  QuantumOperator number = QuantumOperator::diagonal(diag, boson_dim, 1);
  const double r = 1.0 / std::sqrt(2.0);
  QuantumOperator x = (ad + a) * r;
  QuantumOperator p = (ad - a) * Complex(0.0, r);
  return {std::move(a), std::move(ad), std::move(number), std::move(x), std::move(p)};
}

SpinOperators collective_spin(int atom_count) {
  if (atom_count < 1) throw ValidationError("collective_spin: N must be >= 1");
  const Index d = atom_count + 1;
  const double j = 0.5 * atom_count;
  std::vector<Eigen::Triplet<Complex>> t;
  Eigen::VectorXcd z(d);
  for (Index s = 0; s < d; ++s) {
    const double m = static_cast<double>(s) - j;
    z[s] = m;
    if (s + 1 < d) t.emplace_back(s + 1, s, std::sqrt(j * (j + 1.0) - m * (m + 1.0)));
  }
  QuantumOperator jp(from_triplets(d, t), 1, d);
  QuantumOperator jm = jp.adjoint();
  QuantumOperator jx = (jp + jm) * 0.5;
  QuantumOperator jy = (jp - jm) * Complex(0.0, -0.5);
  return {std::move(jx), std::move(jy), QuantumOperator::diagonal(z, 1, d), std::move(jp), std::move(jm)};
}

QuantumOperator tensor(const QuantumOperator& field_op, const QuantumOperator& spin_op) {
  if (field_op.spin_dim() != 1 || spin_op.boson_dim() != 1)
    throw ValidationError("tensor: expects a pure field operator and a pure spin operator");
  const Index nb = field_op.boson_dim();
  const Index ns = spin_op.spin_dim();
  const SparseMatrixC& a = field_op.matrix();
  const SparseMatrixC& b = spin_op.matrix();
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Index ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrixC::InnerIterator ia(a, ka); ia; ++ia)
      for (Index kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrixC::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(ia.row() * ns + ib.row(), ia.col() * ns + ib.col(), ia.value() * ib.value());
  return QuantumOperator(from_triplets(nb * ns, t), nb, ns);
}

QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b) {
  return a * b - b * a;
}

Complex expectation(const QuantumOperator& op, const Eigen::Ref<const Eigen::VectorXcd>& v) {
  if (v.size() != op.dim()) throw ValidationError("expectation: dimension mismatch");
  const Eigen::VectorXcd w = op.matrix() * v;
  return v.dot(w);
}

double top_fock_population(const Eigen::Ref<const Eigen::VectorXcd>& state, Index boson_dim,
                           Index spin_dim) {
  if (state.size() != boson_dim * spin_dim)
    throw ValidationError("top_fock_population: dimension mismatch");
  return state.segment((boson_dim - 1) * spin_dim, spin_dim).squaredNorm();
}

Index heuristic_cutoff(double expected_photons) {
  const double n = std::max(0.0, expected_photons);
  return static_cast<Index>(std::ceil(n + 6.0 * std::sqrt(n + 1.0))) + 10;
}

}  // namespace srad

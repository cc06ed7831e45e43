#pragma once

#include <vector>

#include "srad/common.hpp"

namespace srad {

/// Square operator on the boson (x) spin product space. The basis index of
/// |n, s> is n * spin_dim + s: boson index slow, spin index fast. Spin states
/// are ordered by ascending Jz.
///
/// Storage is sparse; dense() materializes on demand.
class QuantumOperator {
 public:
  QuantumOperator() = default;
  QuantumOperator(SparseMatrixC matrix, Index boson_dim, Index spin_dim);

  static QuantumOperator identity(Index boson_dim, Index spin_dim);
  static QuantumOperator zero(Index boson_dim, Index spin_dim);
  static QuantumOperator diagonal(const Eigen::VectorXcd& diag, Index boson_dim, Index spin_dim);
  static QuantumOperator from_dense(const Eigen::MatrixXcd& m, Index boson_dim, Index spin_dim);

  const SparseMatrixC& matrix() const noexcept { return m_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(m_); }

  Index dim() const noexcept { return m_.rows(); }
  Index boson_dim() const noexcept { return boson_dim_; }
  Index spin_dim() const noexcept { return spin_dim_; }

  QuantumOperator adjoint() const;
  /// max |H - H^dagger| elementwise.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }
  bool is_real(double tol = 0.0) const;
  bool is_diagonal() const;
  /// Maximum absolute row sum; an upper bound on the spectral norm.
  double norm_inf() const;
  double frobenius_norm() const { return m_.norm(); }
  SparseMatrixR real_part() const { return m_.real(); }

  QuantumOperator& operator+=(const QuantumOperator& rhs);
  QuantumOperator& operator-=(const QuantumOperator& rhs);
  QuantumOperator& operator*=(Complex s);

  friend QuantumOperator operator+(QuantumOperator a, const QuantumOperator& b) { return a += b; }
  friend QuantumOperator operator-(QuantumOperator a, const QuantumOperator& b) { return a -= b; }
  friend QuantumOperator operator*(QuantumOperator a, Complex s) { return a *= s; }
  friend QuantumOperator operator*(Complex s, QuantumOperator a) { return a *= s; }
  friend QuantumOperator operator*(QuantumOperator a, double s) { return a *= Complex(s); }
  friend QuantumOperator operator*(double s, QuantumOperator a) { return a *= Complex(s); }
  friend QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b);

 private:
  void check_same_space(const QuantumOperator& other, const char* what) const;

  SparseMatrixC m_;
  Index boson_dim_ = 0;
  Index spin_dim_ = 0;
};

struct LadderOperators {
  QuantumOperator annihilator;
  QuantumOperator creator;
  QuantumOperator number;
  QuantumOperator x;  // (a^dagger + a)/sqrt2
  QuantumOperator p;  // i(a^dagger - a)/sqrt2
};

/// Truncated single-mode operators on Fock levels 0..boson_dim-1.
LadderOperators ladder_operators(Index boson_dim);

struct SpinOperators {
  QuantumOperator jx;
  QuantumOperator jy;
  QuantumOperator jz;
  QuantumOperator jplus;
  QuantumOperator jminus;
};

/// Total-spin j = N/2 matrices on the (N+1)-dimensional ladder.
SpinOperators collective_spin(int atom_count);

/// Kronecker product of a pure field operator (spin_dim 1) with a pure spin
/// operator (boson_dim 1).
QuantumOperator tensor(const QuantumOperator& field_op, const QuantumOperator& spin_op);

QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b);

/// <v|op|v> for a normalized state.
Complex expectation(const QuantumOperator& op, const Eigen::Ref<const Eigen::VectorXcd>& v);

/// Population of the highest Fock level, summed over the spin index.
double top_fock_population(const Eigen::Ref<const Eigen::VectorXcd>& state, Index boson_dim,
                           Index spin_dim);

inline constexpr double kTruncationThreshold = 1e-8;

/// ceil(n + 6 sqrt(n + 1)) + 10 for an expected photon number n.
Index heuristic_cutoff(double expected_photons);

}  // namespace srad

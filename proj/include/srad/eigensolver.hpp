#pragma once

#include "srad/operators.hpp"

namespace srad {

struct EigenResult {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // columns; empty when not requested
  double max_residual = 0.0;      // max ||Hv - lv|| / ||H|| over returned pairs

  bool has_vectors() const noexcept { return eigenvectors.cols() > 0; }
};

struct EigenOptions {
  bool vectors = true;
  // Problems at or below this dimension always go to the dense solver.
  Index dense_limit = 600;
  // Lanczos convergence threshold, relative to ||H||_inf.
  double tolerance = 1e-10;
};

template <class Scalar>
struct PartialSpectrum {
  Eigen::VectorXd values;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
  double max_residual = 0.0;
};

/// k lowest eigenpairs of a self-adjoint sparse matrix. Uses a dense solver
/// for small or nearly-full requests and Lanczos with full
/// reorthogonalization, locking and a deflated verification sweep otherwise.
/// Hermiticity is the caller's responsibility.
template <class Scalar>
PartialSpectrum<Scalar> lowest_eigenpairs(const Eigen::SparseMatrix<Scalar>& h, Index k,
                                          const EigenOptions& opts = {});

/// k lowest eigenpairs of a Hermitian operator; real operators take the
/// real-symmetric path.
EigenResult eig_hermitian(const QuantumOperator& op, Index k_levels, const EigenOptions& opts = {});

}  // namespace srad

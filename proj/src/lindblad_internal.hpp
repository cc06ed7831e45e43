#pragma once

#include <span>
#include <vector>

#include "srad/open_systems.hpp"

namespace srad::detail {

/// Precomputed pieces of the generator: with M = -iH - sum rate L^dagger L,
/// d rho/dt = M rho + (M rho)^dagger + 2 sum rate L rho L^dagger.
class Generator {
 public:
  Generator(const QuantumOperator& h, std::span<const JumpOperator> jumps);

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  Index dim() const noexcept { return m_.rows(); }
  /// Crude bound on the generator's spectral radius.
  double norm_bound() const noexcept { return bound_; }

 private:
  SparseMatrixC m_;
  std::vector<SparseMatrixC> l_;
  std::vector<double> rates_;
  double bound_ = 0.0;
};

void check_jumps(const QuantumOperator& h, std::span<const JumpOperator> jumps);

}  // namespace srad::detail

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "srad/operators.hpp"

namespace srad {

/// Validated density matrix: Hermitian and unit trace to 1e-10, smallest
/// eigenvalue >= -1e-8.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd rho);

  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
  Index dim() const noexcept { return rho_.rows(); }
  double expectation(const QuantumOperator& op) const;
  double fidelity(const Eigen::VectorXcd& psi) const;  // <psi|rho|psi>
  double trace_distance(const DensityMatrix& other) const;
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXcd rho_;
};

/// Dissipator term rate * (2 L rho L^dagger - L^dagger L rho - rho L^dagger L).
struct JumpOperator {
  QuantumOperator op;
  double rate;
};

struct Observable {
  std::string name;
  QuantumOperator op;
};

/// i[rho, H] + sum_i rate_i (2 L rho L^dagger - L^dagger L rho - rho L^dagger L).
Eigen::MatrixXcd liouvillian_apply(const QuantumOperator& h, std::span<const JumpOperator> jumps,
                                   const Eigen::MatrixXcd& rho);

/// Column-stacking superoperator of the same generator.
SparseMatrixC vectorized_liouvillian(const QuantumOperator& h, std::span<const JumpOperator> jumps);

struct TrajectorySeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> mean;            // [observable][time]
  std::vector<std::vector<double>> standard_error;  // sample std / sqrt(n_traj)
  Index n_traj = 1;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::vector<std::vector<double>> jump_log;  // per trajectory, when recorded

  const std::vector<double>& mean_of(const std::string& name) const;
  const std::vector<double>& error_of(const std::string& name) const;
};

void write_series_csv(std::ostream& os, const TrajectorySeries& series);

struct MasterOptions {
  double dt = 0.0;  // 0 selects a step from the generator's norm
  std::function<void(double, const DensityMatrix&)> observer;
};

/// RK4 propagation of the master equation; the state is validated at every
/// output time and the whole run is retried with dt halved (up to 4 times)
/// if it drifts out of the physical set.
TrajectorySeries evolve_master(const QuantumOperator& h, std::span<const JumpOperator> jumps,
                               const DensityMatrix& rho0, std::span<const double> t_grid,
                               std::span<const Observable> observables, const MasterOptions& opts = {});

struct McwfOptions {
  double dt = 0.0;  // 0 selects a step from the spectral width
  unsigned threads = 0;
  bool record_jumps = false;
};

/// Quantum-jump unraveling: RK4 drift under H - i sum rate L^dagger L with the
/// state renormalized each step; the jump probability per step is
/// 2 rate <L^dagger L> dt, realized as a waiting time against the integrated
/// rate so that the jump instant is resolved inside the step. Steps with jump
/// probability above 0.1 are halved. Trajectory i draws from a counter-based
/// stream keyed by (seed, i), so results do not depend on the thread count.
TrajectorySeries mcwf_ensemble(const QuantumOperator& h, std::span<const JumpOperator> jumps,
                               const Eigen::VectorXcd& psi0, std::span<const double> t_grid, Index n_traj,
                               std::uint64_t seed, std::span<const Observable> observables,
                               const McwfOptions& opts = {});

struct SteadyState {
  std::optional<DensityMatrix> state;    // set when the kernel is one-dimensional
  std::optional<Index> kernel_dimension;  // unknown on the time-evolution fallback
  std::vector<Eigen::MatrixXcd> kernel;   // Hermitized kernel elements
};

/// Null space of the vectorized generator by shift-invert subspace iteration.
/// Above d^2 = 4e6 falls back to long-time propagation.
SteadyState steady_state(const QuantumOperator& h, std::span<const JumpOperator> jumps);

/// tr(P_K rho) for every integer eigenvalue K of a diagonal symmetry operator.
std::map<int, double> k_block_populations(const DensityMatrix& rho, const QuantumOperator& k);

}  // namespace srad

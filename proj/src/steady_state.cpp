#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "lindblad_internal.hpp"

namespace srad {

namespace {

constexpr double kMaxVectorizedSize = 4e6;
constexpr double kShift = 1e-8;          // relative to ||L||
constexpr double kKernelTol = 1e-9;      // singular value of L X, relative to ||L||
constexpr double kClipTol = 1e-8;
constexpr double kEvolutionTol = 1e-10;  // ||d rho/dt||_F on the fallback path
constexpr int kMaxSweeps = 60;

double sparse_norm_inf(const SparseMatrixC& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(m, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

Eigen::MatrixXcd orthonormal_columns(const Eigen::MatrixXcd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(y);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(y.rows(), y.cols());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Index d) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

// Hermitian basis of a kernel closed under the adjoint, orthonormal in the
// Frobenius inner product.
std::vector<Eigen::MatrixXcd> hermitian_basis(const std::vector<Eigen::MatrixXcd>& kernel) {
  std::vector<Eigen::MatrixXcd> out;
  const auto keep = kernel.size();
  auto try_add = [&](Eigen::MatrixXcd m) {
    for (const auto& b : out) m -= (b.adjoint() * m).trace().real() * b;
    const double n = m.norm();
    if (n > 1e-6) out.push_back(m / n);
  };
  for (const auto& a : kernel) {
    if (out.size() == keep) break;
    try_add(0.5 * (a + a.adjoint()));
    if (out.size() == keep) break;
    try_add(Complex(0, -0.5) * (a - a.adjoint()));
  }
  return out;
}

DensityMatrix physical_state(Eigen::MatrixXcd rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) throw NumericalError("steady_state: kernel element is traceless");
  rho /= tr;
  rho = 0.5 * (rho + rho.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev(0) < -kClipTol) {
    std::ostringstream os;
    os << "steady_state: eigenvalue " << ev(0) << " below the clipping tolerance";
    throw NumericalError(os.str());
  }
  ev = ev.cwiseMax(0.0);
  ev /= ev.sum();
  Eigen::MatrixXcd out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out));
}

SteadyState kernel_solve(const QuantumOperator& h, std::span<const JumpOperator> jumps) {
  const Index d = h.dim();
  const Index n = d * d;
  const SparseMatrixC l = vectorized_liouvillian(h, jumps);
  const double scale = std::max(sparse_norm_inf(l), 1e-300);

  SparseMatrixC shifted = l;
  SparseMatrixC id(n, n);
  id.setIdentity();
  shifted -= (kShift * scale) * id;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseMatrixC> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw NumericalError("steady_state: factorization of the shifted generator failed");

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Index block = std::min<Index>(4, n);
  for (;;) {
    Eigen::MatrixXcd x(n, block);
    for (Index j = 0; j < block; ++j)
      for (Index i = 0; i < n; ++i) x(i, j) = Complex(normal(rng), normal(rng));
    x = orthonormal_columns(x);

    Index count = 0, previous = -1;
    Eigen::MatrixXcd kernel_vectors;
    for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
      x = orthonormal_columns(lu.solve(x));
      if (sweep % 4 != 0 && sweep != kMaxSweeps) continue;
      const Eigen::MatrixXcd lx = l * x;
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(lx, Eigen::ComputeThinV);
      const Eigen::VectorXd sv = svd.singularValues();  // descending
      count = 0;
      for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= kKernelTol * scale) ++count;
      kernel_vectors = x * svd.matrixV().rightCols(count);
      if (count == previous) break;
      previous = count;
    }
    if (count < block || block == n) {
      if (count == 0) throw NumericalError("steady_state: no null vector within tolerance");
      SteadyState out;
      out.kernel_dimension = count;
      std::vector<Eigen::MatrixXcd> raw;
      for (Index k = 0; k < count; ++k) raw.push_back(unvec(kernel_vectors.col(k), d));
      out.kernel = hermitian_basis(raw);
      if (count == 1) out.state = physical_state(raw.front());
      return out;
    }
    block = std::min(2 * block, n);
  }
}

SteadyState evolve_to_rest(const QuantumOperator& h, std::span<const JumpOperator> jumps) {
  const detail::Generator gen(h, jumps);
  const Index d = h.dim();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
  const double dt = 0.1 / std::max(gen.norm_bound(), 1e-12);
  constexpr Index kMaxSteps = 10'000'000;
  for (Index step = 0; step < kMaxSteps; ++step) {
    const Eigen::MatrixXcd k1 = gen.apply(rho);
    if (step % 100 == 0 && k1.norm() < kEvolutionTol) {
      SteadyState out;
      out.state = physical_state(rho);
      out.kernel.push_back(out.state->matrix());
      return out;
    }
    const Eigen::MatrixXcd k2 = gen.apply(rho + (0.5 * dt) * k1);
    const Eigen::MatrixXcd k3 = gen.apply(rho + (0.5 * dt) * k2);
    const Eigen::MatrixXcd k4 = gen.apply(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }
  throw NumericalError("steady_state: long-time evolution did not converge");
}

}  // namespace

SteadyState steady_state(const QuantumOperator& h, std::span<const JumpOperator> jumps) {
  detail::check_jumps(h, jumps);
  const double n = static_cast<double>(h.dim()) * static_cast<double>(h.dim());
  if (n > kMaxVectorizedSize) return evolve_to_rest(h, jumps);
  return kernel_solve(h, jumps);
}

}  // namespace srad

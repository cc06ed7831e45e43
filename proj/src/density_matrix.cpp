#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "srad/csv.hpp"
#include "srad/open_systems.hpp"

namespace srad {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kNegativityTol = 1e-8;

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw ValidationError("rho: must be a non-empty square matrix");
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    std::ostringstream os;
    os << "rho: not Hermitian (defect " << herm << ")";
    throw ValidationError(os.str());
  }
  const Complex tr = rho_.trace();
  if (std::abs(tr - Complex(1.0)) > kTraceTol) {
    std::ostringstream os;
    os << "rho: trace " << tr.real() << " differs from 1";
    throw ValidationError(os.str());
  }
  const double lmin = min_eigenvalue();
  if (lmin < -kNegativityTol) {
    std::ostringstream os;
    os << "rho: negative eigenvalue " << lmin;
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (!(n > 0)) throw ValidationError("psi: zero vector");
  const Eigen::VectorXcd v = psi / n;
  Eigen::MatrixXcd rho = v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

double DensityMatrix::expectation(const QuantumOperator& op) const {
  if (op.dim() != dim()) throw ValidationError("operator: dimension mismatch with rho");
  // tr(O rho) = sum_ij O_ij rho_ji
  Complex acc = 0;
  const SparseMatrixC& m = op.matrix();
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(m, c); it; ++it) acc += it.value() * rho_(it.col(), it.row());
  return acc.real();
}

double DensityMatrix::fidelity(const Eigen::VectorXcd& psi) const {
  if (psi.size() != dim()) throw ValidationError("psi: dimension mismatch with rho");
  return (psi.adjoint() * rho_ * psi)(0).real() / psi.squaredNorm();
}

double DensityMatrix::trace_distance(const DensityMatrix& other) const {
  if (other.dim() != dim()) throw ValidationError("rho: dimension mismatch");
  const Eigen::MatrixXcd diff = rho_ - other.rho_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

const std::vector<double>& TrajectorySeries::mean_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return mean[i];
  throw ValidationError("observable: unknown name '" + name + "'");
}

const std::vector<double>& TrajectorySeries::error_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return standard_error[i];
  throw ValidationError("observable: unknown name '" + name + "'");
}

void write_series_csv(std::ostream& os, const TrajectorySeries& series) {
  CsvWriter w(os);
  w.cell("t").cell("observable").cell("mean").cell("stderr");
  w.end_row();
  for (std::size_t t = 0; t < series.times.size(); ++t)
    for (std::size_t o = 0; o < series.names.size(); ++o) {
      w.cell(series.times[t]).cell(series.names[o]).cell(series.mean[o][t]).cell(series.standard_error[o][t]);
      w.end_row();
    }
}

std::map<int, double> k_block_populations(const DensityMatrix& rho, const QuantumOperator& k) {
  if (k.dim() != rho.dim()) throw ValidationError("K: dimension mismatch with rho");
  if (!k.is_diagonal()) throw ValidationError("K: must be diagonal in the product basis");
  const Eigen::VectorXcd diag = k.matrix().diagonal();
  std::map<int, double> pops;
  for (Index i = 0; i < rho.dim(); ++i) {
    const double kv = diag(i).real();
    const double rounded = std::round(kv);
    if (std::abs(kv - rounded) > 1e-9 || std::abs(diag(i).imag()) > 1e-9)
      throw ValidationError("K: spectrum must be integer");
    pops[static_cast<int>(rounded)] += rho.matrix()(i, i).real();
  }
  return pops;
}

}  // namespace srad

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace srad {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;
using SparseMatrixR = Eigen::SparseMatrix<double>;

/// Invalid input: bad dimensions, out-of-range parameters, malformed configs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to meet its accuracy contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Fock cutoff is too small: the top level carries visible population.
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, double coupling, double population)
      : NumericalError(what), coupling_(coupling), population_(population) {}
  double coupling() const noexcept { return coupling_; }
  double population() const noexcept { return population_; }

 private:
  double coupling_;
  double population_;
};

}  // namespace srad

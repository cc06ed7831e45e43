#include "srad/eigensolver.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace srad {

namespace {

constexpr double kResidualLimit = 1e-9;

template <class Scalar>
Scalar random_scalar(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  if constexpr (std::is_same_v<Scalar, double>) {
    return normal(rng);
  } else {
    const double re = normal(rng);
    return Scalar(re, normal(rng));
  }
}

template <class Scalar>
double sparse_norm_inf(const Eigen::SparseMatrix<Scalar>& h) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(h.rows());
  for (Index k = 0; k < h.outerSize(); ++k)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(h, k); it; ++it)
      rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

template <class Scalar>
double max_residual(const Eigen::SparseMatrix<Scalar>& h, const Eigen::VectorXd& values,
                    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& vectors, double scale) {
  double worst = 0.0;
  for (Index i = 0; i < vectors.cols(); ++i) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r = h * vectors.col(i) - values[i] * vectors.col(i);
    worst = std::max(worst, r.norm() / scale);
  }
  return worst;
}

template <class Scalar>
PartialSpectrum<Scalar> dense_lowest(const Eigen::SparseMatrix<Scalar>& h, Index k, bool vectors) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat dense(h);
  Eigen::SelfAdjointEigenSolver<Mat> es(dense, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
  PartialSpectrum<Scalar> out;
  out.values = es.eigenvalues().head(k);
  if (vectors) out.vectors = es.eigenvectors().leftCols(k);
  return out;
}

template <class Scalar>
class Lanczos {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Lanczos(const Eigen::SparseMatrix<Scalar>& h, double tol, double scale)
      : h_(h), n_(h.rows()), tol_(tol), scale_(scale), locked_(n_, 0), rng_(0x5eedULL) {}

  PartialSpectrum<Scalar> solve(Index k) {
    int stalls = 0;
    while (static_cast<Index>(values_.size()) < k) {
      const Index want = k - static_cast<Index>(values_.size());
      const Run run = krylov(want, stalls);
      Index added = 0;
      for (Index i = 0; i < static_cast<Index>(run.converged.size()) && i < want; ++i) {
        if (!run.converged[i]) break;
        lock(run.vectors.col(i), run.theta[i]);
        ++added;
      }
      if (added == 0 && ++stalls > 6) {
        std::ostringstream os;
        os << "Lanczos failed to converge (locked " << values_.size() << " of " << k << ")";
        throw NumericalError(os.str());
      }
    }
    // A single-vector Krylov space sees one copy of each degenerate
    // eigenvalue; sweep the deflated operator for anything missed below.
    for (int sweep = 0; sweep < 4 * static_cast<int>(k) + 8; ++sweep) {
      if (locked_.cols() >= n_) break;
      const Run run = krylov(1, 2);
      if (run.converged.empty() || !run.converged[0]) break;
      const auto top = std::max_element(values_.begin(), values_.end());
      if (run.theta[0] >= *top - 1e-9 * scale_) break;
      const Index idx = std::distance(values_.begin(), top);
      locked_.col(idx) = run.vectors.col(0);
      values_[static_cast<std::size_t>(idx)] = run.theta[0];
    }
    std::vector<Index> order(values_.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return values_[a] < values_[b]; });
    PartialSpectrum<Scalar> out;
    out.values.resize(k);
    out.vectors.resize(n_, k);
    for (Index i = 0; i < k; ++i) {
      out.values[i] = values_[static_cast<std::size_t>(order[i])];
      out.vectors.col(i) = locked_.col(order[i]);
    }
    return out;
  }

 private:
  struct Run {
    Eigen::VectorXd theta;
    Mat vectors;
    std::vector<bool> converged;
  };

  void lock(const Vec& v, double value) {
    const Index c = locked_.cols();
    locked_.conservativeResize(n_, c + 1);
    locked_.col(c) = v;
    values_.push_back(value);
  }

  void orthogonalize(Vec& w, const Mat& basis, Index cols) const {
    for (int pass = 0; pass < 2; ++pass) {
      if (locked_.cols() > 0) w.noalias() -= locked_ * (locked_.adjoint() * w);
      if (cols > 0) w.noalias() -= basis.leftCols(cols) * (basis.leftCols(cols).adjoint() * w);
    }
  }

  Run krylov(Index want, int growth) {
    const Index avail = n_ - locked_.cols();
    Index cap = std::max<Index>(3 * want + 80, 160) << std::min(growth, 4);
    cap = std::min(cap, avail);
    Mat basis(n_, cap);
    Vec v(n_);
    for (Index i = 0; i < n_; ++i) v[i] = random_scalar<Scalar>(rng_);
    orthogonalize(v, basis, 0);
    v.normalize();
    basis.col(0) = v;

    std::vector<double> alpha;
    std::vector<double> beta;
    Index next_check = std::min(cap, std::max<Index>(want + 20, 30));
    Index m = 0;
    while (true) {
      Vec w = h_ * basis.col(m);
      alpha.push_back(std::real(basis.col(m).dot(w)));
      orthogonalize(w, basis, m + 1);
      const double b = w.norm();
      ++m;
      const bool breakdown = b <= 1e-12 * scale_;
      if (m == next_check || m == cap || breakdown) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Index i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
        for (Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
        const Index got = std::min(want, m);
        std::vector<bool> conv(static_cast<std::size_t>(got));
        bool all = true;
        for (Index i = 0; i < got; ++i) {
          const double res = breakdown ? 0.0 : b * std::abs(tri.eigenvectors()(m - 1, i));
          conv[static_cast<std::size_t>(i)] = res <= tol_ * scale_;
          all = all && conv[static_cast<std::size_t>(i)];
        }
        if (all || m == cap || breakdown) {
          Run run;
          run.theta = tri.eigenvalues().head(got);
          run.vectors = basis.leftCols(m) * tri.eigenvectors().leftCols(got).template cast<Scalar>();
          for (Index i = 0; i < got; ++i) run.vectors.col(i).normalize();
          run.converged = std::move(conv);
          return run;
        }
        next_check = std::min(cap, m + std::max<Index>(10, m / 4));
      }
      beta.push_back(b);
      basis.col(m) = w / b;
    }
  }

  const Eigen::SparseMatrix<Scalar>& h_;
  Index n_;
  double tol_;
  double scale_;
  Mat locked_;
  std::vector<double> values_;
  std::mt19937_64 rng_;
};

}  // namespace

template <class Scalar>
PartialSpectrum<Scalar> lowest_eigenpairs(const Eigen::SparseMatrix<Scalar>& h, Index k,
                                          const EigenOptions& opts) {
  const Index n = h.rows();
  if (h.cols() != n) throw ValidationError("lowest_eigenpairs: matrix must be square");
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "lowest_eigenpairs: k_levels=" << k << " outside [1, " << n << "]";
    throw ValidationError(os.str());
  }
  const double scale = std::max(sparse_norm_inf(h), 1e-300);
  const bool dense = n <= opts.dense_limit || (k * 16 > n && n <= 6000);
  PartialSpectrum<Scalar> out;
  if (dense) {
    out = dense_lowest(h, k, opts.vectors);
  } else {
    out = Lanczos<Scalar>(h, opts.tolerance, scale).solve(k);
  }
  if (out.vectors.cols() > 0) {
    out.max_residual = max_residual(h, out.values, out.vectors, scale);
    if (out.max_residual > kResidualLimit) {
      std::ostringstream os;
      os << "eigensolver residual " << out.max_residual << " exceeds " << kResidualLimit << " * ||H||";
      throw NumericalError(os.str());
    }
    if (!opts.vectors) out.vectors.resize(0, 0);
  }
  return out;
}

template PartialSpectrum<double> lowest_eigenpairs(const SparseMatrixR&, Index, const EigenOptions&);
template PartialSpectrum<Complex> lowest_eigenpairs(const SparseMatrixC&, Index, const EigenOptions&);

EigenResult eig_hermitian(const QuantumOperator& op, Index k_levels, const EigenOptions& opts) {
  const double defect = op.hermiticity_defect();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "eig_hermitian: operator is not Hermitian (max |H - H^dagger| = " << defect << ")";
    throw ValidationError(os.str());
  }
  EigenResult result;
  if (op.is_real()) {
    const SparseMatrixR h = op.real_part();
    auto part = lowest_eigenpairs<double>(h, k_levels, opts);
    result.eigenvalues = std::move(part.values);
    result.eigenvectors = part.vectors.cast<Complex>();
    result.max_residual = part.max_residual;
  } else {
    auto part = lowest_eigenpairs<Complex>(op.matrix(), k_levels, opts);
    result.eigenvalues = std::move(part.values);
    result.eigenvectors = std::move(part.vectors);
    result.max_residual = part.max_residual;
  }
  return result;
}

}  // namespace srad

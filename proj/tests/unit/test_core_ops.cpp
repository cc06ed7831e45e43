#include <doctest.h>

#include <cmath>
#include <random>

#include "srad/eigensolver.hpp"
#include "srad/operators.hpp"

using namespace srad;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd random_hermitian(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXcd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
  return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("ladder operators on three Fock levels") {
  const LadderOperators l = ladder_operators(3);
  const Eigen::MatrixXcd a = l.annihilator.dense();
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(3, 3);
  expected(0, 1) = 1.0;
  expected(1, 2) = std::sqrt(2.0);
  CHECK(max_abs(a - expected) == 0.0);
  CHECK(l.annihilator.matrix().nonZeros() == 2);

  const Eigen::VectorXcd n = l.number.dense().diagonal();
  CHECK(max_abs(l.number.dense() - Eigen::MatrixXcd(n.asDiagonal())) == 0.0);
  CHECK(n(0).real() == 0.0);
  CHECK(n(1).real() == doctest::Approx(1.0));
  CHECK(n(2).real() == doctest::Approx(2.0));

  // Hand product: a a^dagger = diag(1, 2, 0), a^dagger a = diag(0, 1, 2).
  Eigen::MatrixXcd comm_expected = Eigen::MatrixXcd::Zero(3, 3);
  comm_expected.diagonal() << 1.0, 1.0, -2.0;
  CHECK(max_abs(commutator(l.annihilator, l.creator).dense() - comm_expected) < 1e-14);
}

TEST_CASE("ladder operators reject a single level") {
  CHECK_THROWS_AS(ladder_operators(1), ValidationError);
  CHECK_THROWS_AS(ladder_operators(0), ValidationError);
}

TEST_CASE("quadratures satisfy the canonical commutator away from the cutoff") {
  const Index d = 12;
  const LadderOperators l = ladder_operators(d);
  const Eigen::MatrixXcd c = commutator(l.x, l.p).dense();
  for (Index i = 0; i < d - 1; ++i)
    for (Index j = 0; j < d - 1; ++j) {
      const Complex want = i == j ? Complex(0, 1) : Complex(0);
      CHECK(std::abs(c(i, j) - want) < 1e-13);
    }
  CHECK(l.x.is_hermitian());
  CHECK(l.p.is_hermitian());
}

TEST_CASE("collective spin matrices") {
  SUBCASE("single atom is Pauli / 2") {
    const SpinOperators s = collective_spin(1);
    Eigen::MatrixXcd jx(2, 2);
    jx << 0, 0.5, 0.5, 0;
    CHECK(max_abs(s.jx.dense() - jx) < 1e-15);
  }
  SUBCASE("two atoms: Jz = diag(-1, 0, 1)") {
    const SpinOperators s = collective_spin(2);
    Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(3, 3);
    jz.diagonal() << -1, 0, 1;
    CHECK(max_abs(s.jz.dense() - jz) < 1e-15);
  }
  SUBCASE("angular momentum algebra at N = 8") {
    const SpinOperators s = collective_spin(8);
    const Eigen::MatrixXcd c = commutator(s.jx, s.jy).dense() - Complex(0, 1) * s.jz.dense();
    CHECK(c.norm() < 1e-12);
    const Eigen::MatrixXcd casimir = (s.jx * s.jx + s.jy * s.jy + s.jz * s.jz).dense();
    CHECK(max_abs(casimir - 4.0 * 5.0 * Eigen::MatrixXcd::Identity(9, 9)) < 1e-12);
  }
  SUBCASE("J+- = Jx +- i Jy elementwise") {
    for (int n : {1, 3, 6, 11}) {
      const SpinOperators s = collective_spin(n);
      CHECK(max_abs(s.jplus.dense() - (s.jx.dense() + Complex(0, 1) * s.jy.dense())) < 1e-14);
      CHECK(max_abs(s.jminus.dense() - (s.jx.dense() - Complex(0, 1) * s.jy.dense())) < 1e-14);
    }
  }
  CHECK_THROWS_AS(collective_spin(0), ValidationError);
}

TEST_CASE("tensor products") {
  const LadderOperators l = ladder_operators(5);
  const SpinOperators s = collective_spin(3);
  const QuantumOperator idf = QuantumOperator::identity(5, 1);
  const QuantumOperator ids = QuantumOperator::identity(1, 4);

  const QuantumOperator id = tensor(idf, ids);
  CHECK(id.dim() == 20);
  CHECK(max_abs(id.dense() - Eigen::MatrixXcd::Identity(20, 20)) == 0.0);

  const QuantumOperator n = tensor(l.number, ids);
  const QuantumOperator jz = tensor(idf, s.jz);
  CHECK(commutator(n, jz).frobenius_norm() == 0.0);

  const QuantumOperator coupling = tensor(l.annihilator, s.jplus) + tensor(l.creator, s.jminus);
  CHECK(coupling.is_hermitian());

  // Boson index slow: |n, s> sits at n * spin_dim + s.
  const Eigen::VectorXcd diag = n.dense().diagonal();
  CHECK(diag(4 * 2 + 3).real() == doctest::Approx(2.0));

  CHECK_THROWS_AS(tensor(s.jz, l.number), ValidationError);
}

TEST_CASE("product-space operators refuse mismatched arithmetic") {
  const QuantumOperator a = QuantumOperator::identity(3, 2);
  const QuantumOperator b = QuantumOperator::identity(2, 3);
  CHECK_THROWS_AS(a + b, ValidationError);
  CHECK_THROWS_AS(a * b, ValidationError);
}

TEST_CASE("eig_hermitian small cases") {
  Eigen::VectorXcd d(3);
  d << 3, 1, 2;
  const EigenResult r = eig_hermitian(QuantumOperator::diagonal(d, 3, 1), 2);
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(r.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(r.eigenvalues(1) == doctest::Approx(2.0));

  Eigen::MatrixXcd sx(2, 2);
  sx << 0, 1, 1, 0;
  const EigenResult p = eig_hermitian(QuantumOperator::from_dense(sx, 2, 1), 2);
  CHECK(p.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(p.eigenvalues(1) == doctest::Approx(1.0));

  Eigen::MatrixXcd bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(eig_hermitian(QuantumOperator::from_dense(bad, 2, 1), 1), ValidationError);
  CHECK_THROWS_AS(eig_hermitian(QuantumOperator::from_dense(sx, 2, 1), 3), ValidationError);
  CHECK_THROWS_AS(eig_hermitian(QuantumOperator::from_dense(sx, 2, 1), 0), ValidationError);
}

TEST_CASE("eigenvalue sum equals the trace for a random Hermitian matrix") {
  const Eigen::MatrixXcd m = random_hermitian(50, 7);
  const QuantumOperator op = QuantumOperator::from_dense(m, 50, 1);
  const EigenResult r = eig_hermitian(op, 50);
  CHECK(std::abs(r.eigenvalues.sum() - m.trace().real()) < 1e-9 * op.norm_inf());
  const Eigen::MatrixXcd v = r.eigenvectors;
  CHECK(max_abs(v.adjoint() * v - Eigen::MatrixXcd::Identity(50, 50)) < 1e-10);
}

TEST_CASE("Lanczos path agrees with the dense solver") {
  // A sparse nearest-neighbour Hamiltonian large enough to leave the dense path.
  const Index n = 1500;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0 * u(rng));
    if (i + 1 < n) {
      const Complex h(u(rng), u(rng));
      t.emplace_back(i, i + 1, h);
      t.emplace_back(i + 1, i, std::conj(h));
    }
    if (i + 7 < n) {
      const double h = u(rng);
      t.emplace_back(i, i + 7, h);
      t.emplace_back(i + 7, i, h);
    }
  }
  SparseMatrixC m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  const QuantumOperator op(m, n, 1);

  const EigenResult lanczos = eig_hermitian(op, 12);
  EigenOptions dense;
  dense.dense_limit = n;
  const EigenResult ref = eig_hermitian(op, 12, dense);
  for (Index i = 0; i < 12; ++i) CHECK(std::abs(lanczos.eigenvalues(i) - ref.eigenvalues(i)) < 1e-9);
  CHECK(lanczos.max_residual <= 1e-9);
  const Eigen::MatrixXcd v = lanczos.eigenvectors;
  CHECK(max_abs(v.adjoint() * v - Eigen::MatrixXcd::Identity(12, 12)) < 1e-10);
}

TEST_CASE("Lanczos resolves exactly degenerate levels") {
  // Two identical uncoupled blocks: every level is doubly degenerate.
  const Index half = 700;
  std::vector<Eigen::Triplet<double>> t;
  for (Index b = 0; b < 2; ++b)
    for (Index i = 0; i < half; ++i) {
      const Index o = b * half;
      t.emplace_back(o + i, o + i, std::sin(0.37 * static_cast<double>(i)) * 3.0);
      if (i + 1 < half) {
        t.emplace_back(o + i, o + i + 1, 1.0);
        t.emplace_back(o + i + 1, o + i, 1.0);
      }
    }
  SparseMatrixR m(2 * half, 2 * half);
  m.setFromTriplets(t.begin(), t.end());
  const auto got = lowest_eigenpairs<double>(m, 10);
  for (Index i = 0; i < 10; i += 2) CHECK(std::abs(got.values(i) - got.values(i + 1)) < 1e-9);
}

TEST_CASE("cutoff heuristic and truncation diagnostic") {
  CHECK(heuristic_cutoff(0.0) == 16);
  CHECK(heuristic_cutoff(44.0) == static_cast<Index>(std::ceil(44.0 + 6.0 * std::sqrt(45.0))) + 10);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(6);  // boson_dim 3, spin_dim 2
  psi(0) = std::sqrt(0.5);
  psi(5) = std::sqrt(0.5);
  CHECK(top_fock_population(psi, 3, 2) == doctest::Approx(0.5));
}

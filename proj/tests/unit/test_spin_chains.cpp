#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "srad/spectra.hpp"
#include "srad/spin_chains.hpp"

using namespace srad;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> grid(double lo, double hi, int points) {
  std::vector<double> v;
  for (int i = 0; i < points; ++i) v.push_back(lo + (hi - lo) * i / (points - 1));
  return v;
}

}  // namespace

TEST_CASE("Ising dispersion in both normalizations") {
  CHECK(ising_gap(2.0).scaled == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ising_gap(2.0).hamiltonian == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ising_dispersion(1.0, kPi) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(ising_dispersion_scaled(1.0, kPi) == doctest::Approx(4.0).epsilon(1e-15));
  for (double k : {-2.0, 0.0, 0.7, kPi}) {
    CHECK(ising_dispersion(1e-9, k) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(ising_dispersion_scaled(1.7, k) == doctest::Approx(ising_dispersion(1.7, k) / 1.7).epsilon(1e-14));
    CHECK(ising_dispersion(0.4, k) >= 0.0);
  }
  CHECK(std::isnan(ising_gap(0.0).scaled));
  CHECK_THROWS_AS(ising_dispersion_scaled(0.0, 1.0), ValidationError);
}

TEST_CASE("Ising ground energy") {
  CHECK(ising_ground_energy(0.0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ising_ground_energy(1.0, 0) == doctest::Approx(-4.0 / kPi).epsilon(1e-10));
  CHECK(ising_ground_energy(1.0, 0) == doctest::Approx(-1.27324).epsilon(1e-5));
  for (double g : {0.5, 1.0, 2.0}) {
    const ChainLevels dense = chain_dense_oracle(ChainKind::Ising, 12, g);
    const double inf = ising_ground_energy(g, 0);
    CHECK(std::abs(dense.ground_per_site - inf) / std::abs(inf) < 0.02);
    // The antiperiodic momentum sum is exact at finite N.
    CHECK(ising_ground_energy(g, 12) == doctest::Approx(dense.ground_per_site).epsilon(1e-10));
  }
  CHECK_THROWS_AS(ising_ground_energy(-0.1, 0), ValidationError);
}

TEST_CASE("Ising gap exponent") {
  std::vector<Sample> pts;
  for (int i = 0; i < 12; ++i) {
    const double d = 1e-3 * std::pow(10.0, i / 11.0 * 2.0);
    pts.emplace_back(d, ising_gap(1.0 + d).hamiltonian);
  }
  const FitResult f = fit_power_law(pts, {1e-3, 0.1});
  CHECK(f.exponent == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("XX chain on the full-zone grid") {
  CHECK(xx_dispersion(1.0, 0.0) == doctest::Approx(-3.0));
  for (Index n : {4, 8, 10}) {
    const XXGround x = xx_ground(0.25, n);
    CHECK(x.particles == n);
    CHECK(x.spin_energy == doctest::Approx(static_cast<double>(n) + 2.0 * x.fermion_energy));
  }
  // All modes filled: E = N + 2 sum(-2 g cos k - 1) = -N.
  CHECK(xx_ground(0.25, 8).spin_energy == doctest::Approx(-8.0));

  const CrossingList c = xx_crossings(8);
  REQUIRE(c.size() == 2);
  CHECK(c[0].g_star == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c[0].k == doctest::Approx(kPi));
  CHECK(c[1].g_star == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c[1].k == doctest::Approx(3 * kPi / 4));
  CHECK(c[1].delta_n == -2);
  CHECK_THROWS_AS(xx_crossings(7), ValidationError);
}

TEST_CASE("parity-resolved XX crossings agree with the dense oracle") {
  const CrossingList dense = xx_dense_crossings(8, 0.05, 1.5, 1451);
  const CrossingList free = xx_parity_crossings(8);
  REQUIRE(dense.size() == 3);
  REQUIRE(free.size() >= 3);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    CHECK(std::abs(dense[i].g_star - free[i].g_star) < 1e-3);
    CHECK(dense[i].delta_n == free[i].delta_n);
  }
  for (std::size_t i = 1; i < free.size(); ++i) CHECK(free[i].g_star > free[i - 1].g_star);
  CHECK(free.front().g_star == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("XX finite-N energy kinks sit exactly at the grid crossings") {
  const std::vector<double> g = grid(0.3, 1.0, 7001);
  std::vector<double> e;
  for (double v : g) e.push_back(xx_ground(v, 8).spin_energy);
  const double h = g[1] - g[0];
  const CrossingList c = xx_crossings(8);
  std::vector<double> kinks;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    // Continuity.
    CHECK(std::abs(e[i + 1] - e[i]) < 10 * h);
    const double left = (e[i] - e[i - 1]) / h, right = (e[i + 1] - e[i]) / h;
    if (std::abs(right - left) > 1e-6) kinks.push_back(g[i]);
  }
  REQUIRE_FALSE(kinks.empty());
  for (double k : kinks) {
    bool near = false;
    for (const Crossing& x : c) near = near || std::abs(k - x.g_star) <= 1.5 * h;
    CHECK(near);
  }
  for (const Crossing& x : c) {
    bool seen = false;
    for (double k : kinks) seen = seen || std::abs(k - x.g_star) <= 1.5 * h;
    CHECK(seen);
  }
}

TEST_CASE("XX grid energy converges as 1/N^2") {
  for (double g : {0.6, 0.8, 1.3}) {
    const double inf = xx_ground(g, 0).fermion_energy;
    for (Index n : {64, 128, 256}) {
      const double err = xx_ground(g, n).fermion_energy / static_cast<double>(n) - inf;
      CAPTURE(g);
      CAPTURE(n);
      CHECK(std::abs(err) * static_cast<double>(n * n) < 3.0);
    }
  }
  CHECK(xx_ground(0.3, 0).fermion_energy == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("infinite XX curvature kinks at g = 1/2") {
  const std::vector<double> g = grid(0.3, 0.7, 401);
  std::vector<double> e;
  for (double v : g) e.push_back(xx_ground(v, 0).fermion_energy);
  const DerivativeTable d = finite_derivatives(g, e);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    if (g[i] < 0.5 - 1.5e-3) CHECK(std::abs(d.second[i]) < 1e-8);
    if (g[i] > 0.5 + 1.5e-3) CHECK(std::abs(d.second[i]) > 0.1);
  }
}

TEST_CASE("LMG closed form") {
  CHECK(lmg_ground(1.0, 1e-9, 5.0).m == -5.0);
  const LmgGround a = lmg_ground(1.0, 1.0, 2.0);
  CHECK(a.m == -2.0);
  CHECK(a.energy == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_FALSE(a.degenerate);
  const std::vector<LmgLevel> levels = lmg_spectrum(1.0, 1.0, 2.0);
  REQUIRE(levels.size() == 5);
  for (const LmgLevel& l : levels) CHECK(l.energy == doctest::Approx(0.5 * l.m + 0.5 * (6 - l.m * l.m)));
  const LmgGround b = lmg_ground(1.0, -1.0, 2.0);
  CHECK(b.degenerate);
  CHECK(b.m == -1.0);
  CHECK(b.energy == doctest::Approx(-3.0));
  CHECK(lmg_spectrum(1.0, 0.3, 1.5).size() == 4);
  CHECK_THROWS_AS(lmg_spectrum(1.0, 0.3, 1.2), ValidationError);
}

TEST_CASE("dense oracle") {
  CHECK(chain_dense_oracle(ChainKind::Ising, 2, 0.0).levels(0) == doctest::Approx(-2.0));
  const double g = 0.7;
  const Eigen::VectorXd xx = chain_dense_oracle(ChainKind::XX, 2, g, 4).levels;
  REQUIRE(xx.size() == 4);
  // Hand diagonalization: |uu> -> -2, |dd> -> 2, the flip pair -> +-4g.
  CHECK(xx(0) == doctest::Approx(-4 * g));
  CHECK(xx(1) == doctest::Approx(-2.0));
  CHECK(xx(2) == doctest::Approx(2.0));
  CHECK(xx(3) == doctest::Approx(4 * g));

  const Index n = 6;
  const SparseMatrixR h = chain_hamiltonian(ChainKind::XX, n, 0.9);
  Eigen::VectorXd sz(1 << n);
  for (Index s = 0; s < sz.size(); ++s) sz(s) = 2.0 * std::popcount(static_cast<unsigned>(s)) - static_cast<double>(n);
  const Eigen::MatrixXd hd = Eigen::MatrixXd(h);
  CHECK((hd * sz.asDiagonal() - Eigen::MatrixXd(sz.asDiagonal()) * hd).norm() < 1e-12);
  CHECK((hd - hd.transpose()).norm() == 0.0);

  CHECK_THROWS_AS(chain_dense_oracle(ChainKind::Ising, 15, 1.0), ValidationError);
  CHECK_THROWS_AS(chain_dense_oracle(ChainKind::Ising, 1, 1.0), ValidationError);
}

TEST_CASE("chain spec JSON and CSV") {
  ChainSpec s{ChainKind::XX, 0.8, 8};
  const ChainSpec back = chain_from_json(chain_to_json(s));
  CHECK(back.kind == s.kind);
  CHECK(back.g == s.g);
  CHECK(back.sites == s.sites);
  CHECK_THROWS_AS(chain_from_json(nlohmann::json{{"kind", "Heisenberg"}, {"g", 1.0}}), ValidationError);
  ChainSpec one{ChainKind::Ising, 1.0, 1};
  CHECK_THROWS_AS(one.validate(), ValidationError);

  std::ostringstream os;
  write_crossings_csv(os, xx_crossings(8));
  CHECK(os.str().rfind("g_star,k,delta_n\n", 0) == 0);
  std::ostringstream scan;
  write_chain_scan_csv(scan, {0.1, 0.2}, {{"E0", {-1.0, -1.1}}});
  CHECK(scan.str().rfind("g,quantity,value\n", 0) == 0);
}

#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srad/common.hpp"

namespace srad {

enum class ChainKind { Ising, XX };

std::string_view to_string(ChainKind kind);
ChainKind chain_kind_from_string(std::string_view name);

/// Ising: H = -sum sigma^z - g sum sigma^x sigma^x.
/// XX:    H = -sum sigma^z - g sum (sigma^x sigma^x + sigma^y sigma^y).
/// Both periodic. sites = 0 stands for the infinite chain.
struct ChainSpec {
  ChainKind kind = ChainKind::Ising;
  double g = 0.0;
  Index sites = 0;

  bool infinite() const noexcept { return sites == 0; }
  void validate() const;
};

nlohmann::json chain_to_json(const ChainSpec& spec);
ChainSpec chain_from_json(const nlohmann::json& j);

/// 2 sqrt(1 + g^2 - 2 g cos k), the quasiparticle energy of the Hamiltonian above.
double ising_dispersion(double g, double k);
/// The same divided by g: 2 sqrt(1 + 1/g^2 - 2 cos(k)/g). g = 0 is an error.
double ising_dispersion_scaled(double g, double k);

struct IsingGap {
  double hamiltonian;  // 2|1 - g|
  double scaled;       // 2|1 - 1/g|; NaN at g = 0
};

IsingGap ising_gap(double g);

/// Ground energy per site. Finite chains sum over the antiperiodic momenta
/// k = (2n + 1) pi / N, which is exact for the even-parity ground sector;
/// the infinite chain uses adaptive Gauss-Kronrod quadrature to 1e-10.
double ising_ground_energy(double g, Index sites);

/// -2 g cos k - 1.
double xx_dispersion(double g, double k);

struct XXGround {
  double fermion_energy;  // sum of negative single-particle energies (per site when infinite)
  double spin_energy;     // N + 2 * fermion_energy, the spin-chain ground energy (finite only)
  Index particles;        // occupied momenta (finite only)
};

/// Full-zone grid k_n = -pi + 2 pi n / N, n = 1..N; sites = 0 integrates.
XXGround xx_ground(double g, Index sites);

struct Crossing {
  double g_star;
  double k;
  Index delta_n;
};

using CrossingList = std::vector<Crossing>;

/// Couplings where a full-zone grid mode changes sign (g* = -1/(2 cos k_n)),
/// one entry per distinct g* with k > 0 and delta_n = -multiplicity.
CrossingList xx_crossings(Index sites);

/// Ground-level crossings with Jordan-Wigner boundary conditions resolved:
/// M fermions see periodic momenta for odd M and antiperiodic ones for even
/// M. k is the momentum of the mode that empties, delta_n the change in M.
/// These coincide with the exact finite-chain crossings.
CrossingList xx_parity_crossings(Index sites);

struct LmgLevel {
  double m;
  double energy;
};

/// (Omega/2) m + (lambda/S)(S(S+1) - m^2) for m = -S..S. 2S must be a positive integer.
std::vector<LmgLevel> lmg_spectrum(double Omega, double lambda, double S);

struct LmgGround {
  double m;
  double energy;
  bool degenerate;  // exact tie; m is then the smaller of the tied values
};

LmgGround lmg_ground(double Omega, double lambda, double S);

struct ChainLevels {
  Eigen::VectorXd levels;  // ascending
  double ground_per_site;
};

inline constexpr Index kMaxOracleSites = 14;

/// Periodic chain Hamiltonian on the 2^N spin basis; bit i of a basis index
/// set means site i points up.
SparseMatrixR chain_hamiltonian(ChainKind kind, Index sites, double g);

/// Explicit 2^N diagonalization of the periodic chain.
ChainLevels chain_dense_oracle(ChainKind kind, Index sites, double g, Index k_levels = 4);

/// Ground energy of the XX chain inside the sector with M up spins.
double xx_sector_ground(Index sites, Index up_spins, double g);

/// Ground-level crossings of the XX chain from the dense oracle: the sector
/// of the ground state is tracked over a uniform grid on [lo, hi] and every
/// change is refined by bisection.
CrossingList xx_dense_crossings(Index sites, double lo, double hi, Index points);

void write_chain_scan_csv(std::ostream& os, const std::vector<double>& g,
                          const std::vector<std::pair<std::string, std::vector<double>>>& quantities);
void write_crossings_csv(std::ostream& os, const CrossingList& crossings);

}  // namespace srad

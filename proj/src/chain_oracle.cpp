#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "srad/eigensolver.hpp"
#include "srad/spin_chains.hpp"

namespace srad {

namespace {

// Bit i set means site i points up (sigma^z = +1).
void check_sites(Index sites) {
  if (sites < 2 || sites > kMaxOracleSites) {
    std::ostringstream os;
    os << "N: dense oracle supports 2 <= N <= " << kMaxOracleSites << ", got " << sites;
    throw ValidationError(os.str());
  }
}

SparseMatrixR chain_matrix(ChainKind kind, Index sites, double g, const std::vector<std::uint32_t>& basis) {
  const auto dim = static_cast<Index>(basis.size());
  std::vector<Index> lookup(std::size_t{1} << sites, -1);
  for (Index i = 0; i < dim; ++i) lookup[basis[static_cast<std::size_t>(i)]] = i;
  std::vector<Eigen::Triplet<double>> trip;
  for (Index i = 0; i < dim; ++i) {
    const std::uint32_t s = basis[static_cast<std::size_t>(i)];
    const int up = std::popcount(s);
    trip.emplace_back(i, i, -(2.0 * up - static_cast<double>(sites)));
    for (Index b = 0; b < sites; ++b) {
      const Index c = (b + 1) % sites;
      const std::uint32_t mask = (1u << b) | (1u << c);
      const bool antiparallel = ((s >> b) & 1u) != ((s >> c) & 1u);
      if (kind == ChainKind::Ising) {
        // sigma^x sigma^x flips both spins.
        trip.emplace_back(lookup[s ^ mask], i, -g);
      } else if (antiparallel) {
        // sigma^x sigma^x + sigma^y sigma^y = 2 (sigma^+ sigma^- + h.c.)
        trip.emplace_back(lookup[s ^ mask], i, -2.0 * g);
      }
    }
  }
  SparseMatrixR h(dim, dim);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

}  // namespace

SparseMatrixR chain_hamiltonian(ChainKind kind, Index sites, double g) {
  check_sites(sites);
  const std::uint32_t full = 1u << sites;
  std::vector<std::uint32_t> basis(full);
  for (std::uint32_t s = 0; s < full; ++s) basis[s] = s;
  return chain_matrix(kind, sites, g, basis);
}

ChainLevels chain_dense_oracle(ChainKind kind, Index sites, double g, Index k_levels) {
  const SparseMatrixR h = chain_hamiltonian(kind, sites, g);
  const Index k = std::clamp<Index>(k_levels, 1, h.rows());
  EigenOptions opts;
  opts.vectors = false;
  const auto res = lowest_eigenpairs<double>(h, k, opts);
  return {res.values, res.values(0) / static_cast<double>(sites)};
}

double xx_sector_ground(Index sites, Index up_spins, double g) {
  check_sites(sites);
  if (up_spins < 0 || up_spins > sites) throw ValidationError("M: must lie in [0, N]");
  std::vector<std::uint32_t> basis;
  for (std::uint32_t s = 0; s < (1u << sites); ++s)
    if (std::popcount(s) == up_spins) basis.push_back(s);
  const SparseMatrixR h = chain_matrix(ChainKind::XX, sites, g, basis);
  EigenOptions opts;
  opts.vectors = false;
  return lowest_eigenpairs<double>(h, 1, opts).values(0);
}

namespace {

// Sector of the ground level; ties go to the larger magnetization.
Index ground_sector(Index sites, double g, double* energy = nullptr) {
  Index best = sites;
  double e_best = std::numeric_limits<double>::infinity();
  for (Index m = sites; m >= 0; --m) {
    const double e = xx_sector_ground(sites, m, g);
    if (e < e_best - 1e-12 * (1.0 + std::abs(e))) {
      e_best = e;
      best = m;
    }
  }
  if (energy) *energy = e_best;
  return best;
}

}  // namespace

CrossingList xx_dense_crossings(Index sites, double lo, double hi, Index points) {
  check_sites(sites);
  if (!(lo < hi) || points < 2) throw ValidationError("grid: need lo < hi and at least 2 points");
  CrossingList out;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  double g_prev = lo;
  Index m_prev = ground_sector(sites, lo);
  for (Index i = 1; i < points; ++i) {
    const double g = lo + step * static_cast<double>(i);
    const Index m = ground_sector(sites, g);
    if (m != m_prev) {
      double a = g_prev, b = g;
      while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
        const double mid = 0.5 * (a + b);
        (ground_sector(sites, mid) == m_prev ? a : b) = mid;
      }
      out.push_back({0.5 * (a + b), std::numeric_limits<double>::quiet_NaN(), m - m_prev});
    }
    g_prev = g;
    m_prev = m;
  }
  return out;
}

}  // namespace srad

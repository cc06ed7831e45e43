#include "srad/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "srad/csv.hpp"
#include "srad/parallel.hpp"

namespace srad {

std::vector<int> basis_labels(const ModelSpec& spec) {
  if (spec.kind == ModelKind::LMG) {
    spec.validate(false);
    std::vector<int> m(static_cast<std::size_t>(spec.N + 1));
    std::iota(m.begin(), m.end(), 0);
    return m;
  }
  std::vector<int> k = excitation_labels(spec);
  if (!spec.rotating())
    for (int& v : k) v = v % 2 == 0 ? 1 : -1;
  return k;
}

namespace {

struct Sector {
  int label;
  std::vector<Index> states;  // full-space indices, ascending
  std::vector<Eigen::Triplet<double>> real_entries;
  std::vector<Eigen::Triplet<Complex>> entries;
};

// Splits H into its symmetry blocks with a single pass over the nonzeros.
std::vector<Sector> split_sectors(const QuantumOperator& h, const std::vector<int>& labels, bool real,
                                  std::optional<int> only = std::nullopt) {
  std::map<int, std::size_t> slot;
  std::vector<Sector> sectors;
  std::vector<Index> local(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (only && labels[i] != *only) continue;
    auto [it, inserted] = slot.try_emplace(labels[i], sectors.size());
    if (inserted) sectors.push_back(Sector{labels[i], {}, {}, {}});
    Sector& s = sectors[it->second];
    local[i] = static_cast<Index>(s.states.size());
    s.states.push_back(static_cast<Index>(i));
  }
  const SparseMatrixC& m = h.matrix();
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(m, k); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto c = static_cast<std::size_t>(it.col());
      if (only && labels[r] != *only) continue;
      if (labels[r] != labels[c])
        throw NumericalError("Hamiltonian couples different symmetry sectors");
      Sector& s = sectors[slot.at(labels[r])];
      if (real)
        s.real_entries.emplace_back(local[r], local[c], it.value().real());
      else
        s.entries.emplace_back(local[r], local[c], it.value());
    }
  std::sort(sectors.begin(), sectors.end(), [](const Sector& a, const Sector& b) { return a.label < b.label; });
  return sectors;
}

struct SectorLevels {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;  // sector-local
};

SectorLevels solve_block(const Sector& s, bool real, Index k, bool vectors, const EigenOptions& base) {
  const auto n = static_cast<Index>(s.states.size());
  EigenOptions opts = base;
  opts.vectors = vectors;
  SectorLevels out;
  if (real) {
    SparseMatrixR m(n, n);
    m.setFromTriplets(s.real_entries.begin(), s.real_entries.end());
    auto part = lowest_eigenpairs<double>(m, std::min(k, n), opts);
    out.values = std::move(part.values);
    if (vectors) out.vectors = part.vectors.cast<Complex>();
  } else {
    SparseMatrixC m(n, n);
    m.setFromTriplets(s.entries.begin(), s.entries.end());
    auto part = lowest_eigenpairs<Complex>(m, std::min(k, n), opts);
    out.values = std::move(part.values);
    if (vectors) out.vectors = std::move(part.vectors);
  }
  return out;
}

LabelledSpectrum merge(const std::vector<Sector>& sectors, const std::vector<SectorLevels>& levels, Index dim,
                       Index k, bool vectors) {
  struct Entry {
    double e;
    int label;
    std::size_t sector;
    Index col;
  };
  std::vector<Entry> all;
  for (std::size_t s = 0; s < sectors.size(); ++s)
    for (Index i = 0; i < levels[s].values.size(); ++i)
      all.push_back({levels[s].values[i], sectors[s].label, s, i});
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    return a.e != b.e ? a.e < b.e : a.label < b.label;
  });
  const Index take = std::min<Index>(k, static_cast<Index>(all.size()));
  LabelledSpectrum out;
  out.energies.resize(take);
  out.labels.resize(static_cast<std::size_t>(take));
  if (vectors) out.vectors = Eigen::MatrixXcd::Zero(dim, take);
  for (Index i = 0; i < take; ++i) {
    const Entry& e = all[static_cast<std::size_t>(i)];
    out.energies[i] = e.e;
    out.labels[static_cast<std::size_t>(i)] = e.label;
    if (vectors) {
      const auto& states = sectors[e.sector].states;
      for (std::size_t r = 0; r < states.size(); ++r)
        out.vectors(states[r], i) = levels[e.sector].vectors(static_cast<Index>(r), e.col);
    }
  }
  return out;
}

}  // namespace

LabelledSpectrum solve_sectors(const ModelSpec& spec, Index k_levels, bool vectors, const EigenOptions& opts) {
  const QuantumOperator h = build_hamiltonian(spec);
  if (k_levels < 1 || k_levels > h.dim()) throw ValidationError("k_levels outside [1, dimension]");
  const bool real = h.is_real();
  const std::vector<Sector> sectors = split_sectors(h, basis_labels(spec), real);
  std::vector<SectorLevels> levels;
  levels.reserve(sectors.size());
  for (const Sector& s : sectors) levels.push_back(solve_block(s, real, k_levels, vectors, opts));
  return merge(sectors, levels, h.dim(), k_levels, vectors);
}

LabelledSpectrum solve_sector(const ModelSpec& spec, int label, Index k_levels, bool vectors,
                              const EigenOptions& opts) {
  const QuantumOperator h = build_hamiltonian(spec);
  const bool real = h.is_real();
  const std::vector<Sector> sectors = split_sectors(h, basis_labels(spec), real, label);
  if (sectors.empty()) {
    std::ostringstream os;
    os << "no basis states carry symmetry label " << label;
    throw ValidationError(os.str());
  }
  std::vector<SectorLevels> levels{solve_block(sectors[0], real, k_levels, vectors, opts)};
  return merge(sectors, levels, h.dim(), k_levels, vectors);
}

void check_truncation(const ModelSpec& spec, const Eigen::MatrixXcd& vectors) {
  if (!spec.has_boson()) return;
  for (Index i = 0; i < vectors.cols(); ++i) {
    const double pop = top_fock_population(vectors.col(i), spec.boson_dim(), spec.spin_dim());
    if (pop >= kTruncationThreshold) {
      std::ostringstream os;
      os << "truncation diagnostic failed at g=" << spec.coupling() << ": level " << i
         << " has top-Fock population " << pop << " with boson_cutoff " << spec.boson_cutoff;
      throw TruncationError(os.str(), spec.coupling(), pop);
    }
  }
}

namespace {

void verify_labels(const ModelSpec& spec, const LabelledSpectrum& s) {
  Eigen::VectorXd diag(spec.dim());
  const std::vector<int> labels = basis_labels(spec);
  for (Index i = 0; i < diag.size(); ++i) diag[i] = labels[static_cast<std::size_t>(i)];
  for (Index c = 0; c < s.vectors.cols(); ++c) {
    const double value = (s.vectors.col(c).cwiseAbs2().array() * diag.array()).sum();
    if (std::abs(value - s.labels[static_cast<std::size_t>(c)]) >= 1e-6)
      throw NumericalError("symmetry label rounding residual exceeds 1e-6");
  }
}

}  // namespace

SpectrumScan spectrum_scan(const ModelSpec& spec, std::span<const double> g_grid, Index k_levels,
                           bool with_labels, unsigned threads) {
  spec.validate(true);
  if (g_grid.empty()) throw ValidationError("grid: must be nonempty");
  for (std::size_t i = 1; i < g_grid.size(); ++i)
    if (!(g_grid[i] > g_grid[i - 1])) throw ValidationError("grid: must be strictly increasing");
  if (k_levels < 1 || k_levels > spec.dim()) throw ValidationError("k_levels outside [1, dimension]");

  SpectrumScan scan;
  scan.spec = spec;
  scan.g_grid.assign(g_grid.begin(), g_grid.end());
  const auto n = static_cast<Index>(g_grid.size());
  scan.levels.resize(g_grid.size());
  std::vector<std::vector<int>> labels(g_grid.size());
  parallel_for(n, threads, [&](Index i) {
    const ModelSpec at = spec.with_coupling(g_grid[static_cast<std::size_t>(i)]);
    const bool last = i == n - 1;
    EigenOptions opts;
    const LabelledSpectrum s = solve_sectors(at, k_levels, last, opts);
    if (last) {
      check_truncation(at, s.vectors);
      verify_labels(at, s);
    }
    scan.levels[static_cast<std::size_t>(i)].assign(s.energies.data(), s.energies.data() + s.energies.size());
    labels[static_cast<std::size_t>(i)] = s.labels;
  });
  if (with_labels) scan.labels = std::move(labels);
  return scan;
}

void write_scan_csv(std::ostream& os, const SpectrumScan& scan) {
  CsvWriter w(os);
  w.cell("g").cell("level_index").cell("energy").cell("label");
  w.end_row();
  for (std::size_t i = 0; i < scan.g_grid.size(); ++i)
    for (std::size_t k = 0; k < scan.levels[i].size(); ++k) {
      w.cell(scan.g_grid[i]).cell(static_cast<long long>(k)).cell(scan.levels[i][k]);
      w.cell(scan.has_labels() ? std::to_string(scan.labels[i][k]) : std::string());
      w.end_row();
    }
}

std::vector<int> label_states(const Eigen::VectorXd& energies, Eigen::MatrixXcd& vectors,
                              const QuantumOperator& symmetry) {
  const Index k = energies.size();
  std::vector<int> labels(static_cast<std::size_t>(k));
  Index start = 0;
  while (start < k) {
    Index end = start + 1;
    while (end < k && energies[end] - energies[end - 1] < 1e-10) ++end;
    if (end - start > 1) {
      auto block = vectors.middleCols(start, end - start);
      const Eigen::MatrixXcd proj = block.adjoint() * (symmetry.matrix() * block);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (proj + proj.adjoint()));
      const Eigen::MatrixXcd rotated = block * es.eigenvectors();
      block = rotated;
    }
    start = end;
  }
  for (Index c = 0; c < k; ++c) {
    const double value = expectation(symmetry, vectors.col(c)).real();
    const double rounded = std::round(value);
    if (std::abs(value - rounded) >= 1e-6)
      throw NumericalError("symmetry label rounding residual exceeds 1e-6");
    labels[static_cast<std::size_t>(c)] = static_cast<int>(rounded);
  }
  return labels;
}

LevelTracks track_levels(const ModelSpec& spec, std::span<const double> g_grid, Index k_levels,
                         Symmetry symmetry) {
  spec.validate(true);
  if (g_grid.size() < 2) throw ValidationError("grid: need at least two points");
  const QuantumOperator sym = symmetry_operator(spec, symmetry);
  EigenOptions opts;
  opts.dense_limit = std::numeric_limits<Index>::max();

  LevelTracks tracks;
  tracks.g_grid.assign(g_grid.begin(), g_grid.end());
  Eigen::MatrixXcd prev;
  if (k_levels < 1 || k_levels > spec.dim()) throw ValidationError("k_levels outside [1, dimension]");
  // Extra levels let a tracked state climb past its neighbours without
  // leaving the computed window.
  const Index window = std::min(spec.dim(), 3 * k_levels + 4);
  std::vector<Index> current(static_cast<std::size_t>(k_levels));
  std::iota(current.begin(), current.end(), Index{0});
  for (std::size_t i = 0; i < g_grid.size(); ++i) {
    const ModelSpec at = spec.with_coupling(g_grid[i]);
    EigenResult r = eig_hermitian(build_hamiltonian(at), window, opts);
    const std::vector<int> labels = label_states(r.eigenvalues, r.eigenvectors, sym);
    if (i > 0) {
      const Eigen::MatrixXd overlap = (prev.adjoint() * r.eigenvectors).cwiseAbs2();
      std::vector<bool> taken(static_cast<std::size_t>(window), false);
      std::vector<Index> next(static_cast<std::size_t>(k_levels), -1);
      std::vector<std::size_t> order(current.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      auto peak = [&](std::size_t t) { return current[t] < 0 ? -1.0 : overlap.row(current[t]).maxCoeff(); };
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return peak(a) > peak(b); });
      for (std::size_t t : order) {
        // A state whose weight has left the computed window is lost for good.
        if (current[t] < 0 || overlap.row(current[t]).sum() < 0.5) {
          next[t] = -1;
          continue;
        }
        Index best = -1;
        for (Index j = 0; j < window; ++j) {
          if (taken[static_cast<std::size_t>(j)]) continue;
          if (best < 0 || overlap(current[t], j) > overlap(current[t], best) + 1e-12) best = j;
        }
        next[t] = best;
        taken[static_cast<std::size_t>(best)] = true;
      }
      current = next;
    }
    tracks.level.push_back(current);
    std::vector<int> tl;
    for (std::size_t t = 0; t < current.size(); ++t)
      tl.push_back(current[t] < 0 ? tracks.label.back()[t] : labels[static_cast<std::size_t>(current[t])]);
    tracks.label.push_back(std::move(tl));
    prev = r.eigenvectors;
  }
  return tracks;
}

DerivativeTable finite_derivatives(std::span<const double> grid, std::span<const double> f) {
  const std::size_t n = grid.size();
  if (n < 5) throw ValidationError("grid: derivatives need at least 5 points");
  if (f.size() != n) throw ValidationError("derivatives: value count differs from grid size");
  const double h = (grid[n - 1] - grid[0]) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ValidationError("grid: derivatives need a uniform grid");
  DerivativeTable d;
  d.g.assign(grid.begin(), grid.end());
  d.first.resize(n);
  d.second.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d.first[i] = (f[i + 1] - f[i - 1]) / (2 * h);
    d.second[i] = (f[i + 1] - 2 * f[i] + f[i - 1]) / (h * h);
  }
  d.first[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
  d.first[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
  d.second[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h);
  d.second[n - 1] = (2 * f[n - 1] - 5 * f[n - 2] + 4 * f[n - 3] - f[n - 4]) / (h * h);
  return d;
}

DerivativeTable ground_derivatives(const SpectrumScan& scan) {
  std::vector<double> e0;
  for (const auto& l : scan.levels) e0.push_back(l.at(0));
  return finite_derivatives(scan.g_grid, e0);
}

GapTable gap_function(const SpectrumScan& scan) {
  if (scan.k_levels() < 2) throw ValidationError("gap_function: scan needs at least 2 levels");
  GapTable t;
  t.g = scan.g_grid;
  for (std::size_t i = 0; i < scan.g_grid.size(); ++i) {
    const auto& l = scan.levels[i];
    t.raw.push_back(l[1] - l[0]);
    double sym = std::numeric_limits<double>::quiet_NaN();
    if (scan.has_labels()) {
      const auto& lab = scan.labels[i];
      for (std::size_t k = 1; k < l.size(); ++k)
        if (lab[k] == lab[0]) {
          sym = l[k] - l[0];
          break;
        }
    }
    t.symmetric.push_back(sym);
  }
  return t;
}

std::vector<SectorCrossing> sector_crossings(const ModelSpec& spec, std::span<const double> g_grid) {
  if (!spec.rotating()) throw ValidationError("kind: sector crossings need a K-conserving model (TC or JC)");
  spec.validate(true);
  if (g_grid.size() < 2) throw ValidationError("grid: need at least two points");
  auto ground_label = [&](double g) { return solve_sectors(spec.with_coupling(g), 1, false).labels[0]; };
  auto sector_ground = [&](double g, int label) {
    return solve_sector(spec.with_coupling(g), label, 1, false).energies[0];
  };

  std::vector<SectorCrossing> out;
  int before = ground_label(g_grid[0]);
  for (std::size_t i = 1; i < g_grid.size(); ++i) {
    double lo = g_grid[i - 1];
    const double hi = g_grid[i];
    const int end_label = ground_label(hi);
    // Several sectors may take over inside one grid interval; peel them off
    // left to right.
    while (before != end_label) {
      double a = lo, b = hi;
      while (b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, b)) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        (ground_label(mid) == before ? a : b) = mid;
      }
      const int after = ground_label(b);
      // Both ends bracket the sign change of E_before - E_after.
      const double da = sector_ground(a, before) - sector_ground(a, after);
      const double db = sector_ground(b, before) - sector_ground(b, after);
      const double gstar = (da == db) ? 0.5 * (a + b) : std::clamp(a - da * (b - a) / (db - da), a, b);
      const ModelSpec at = spec.with_coupling(gstar);
      const LabelledSpectrum all = solve_sectors(at, 2, false);
      const LabelledSpectrum own = solve_sector(at, before, 2, false);
      SectorCrossing c;
      c.g = gstar;
      c.label_before = before;
      c.label_after = after;
      c.raw_gap = all.energies[1] - all.energies[0];
      c.equal_label_gap = own.energies.size() > 1 ? own.energies[1] - own.energies[0]
                                                  : std::numeric_limits<double>::infinity();
      out.push_back(c);
      before = after;
      lo = b;
    }
  }
  return out;
}

}  // namespace srad

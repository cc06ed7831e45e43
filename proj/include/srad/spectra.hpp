#pragma once

#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srad/eigensolver.hpp"
#include "srad/models.hpp"

namespace srad {

/// Low-lying levels of one model instance, each tagged with its symmetry
/// sector: parity (+1/-1) for Dicke and Rabi, K for TC and JC, and m + S for
/// LMG. Vectors, when requested, live in the full product space.
struct LabelledSpectrum {
  Eigen::VectorXd energies;
  std::vector<int> labels;
  Eigen::MatrixXcd vectors;
};

/// Symmetry label of every basis state for the model's natural symmetry.
std::vector<int> basis_labels(const ModelSpec& spec);

/// Diagonalizes each symmetry sector separately and merges the k lowest.
LabelledSpectrum solve_sectors(const ModelSpec& spec, Index k_levels, bool vectors,
                               const EigenOptions& opts = {});

/// k lowest levels inside a single sector.
LabelledSpectrum solve_sector(const ModelSpec& spec, int label, Index k_levels, bool vectors,
                              const EigenOptions& opts = {});

/// Throws TruncationError if any column carries top-Fock population above
/// the threshold.
void check_truncation(const ModelSpec& spec, const Eigen::MatrixXcd& vectors);

struct SpectrumScan {
  ModelSpec spec;
  std::vector<double> g_grid;
  std::vector<std::vector<double>> levels;  // [g][k]
  std::vector<std::vector<int>> labels;     // [g][k]; empty without labels

  bool has_labels() const noexcept { return !labels.empty(); }
  Index k_levels() const noexcept { return levels.empty() ? 0 : static_cast<Index>(levels.front().size()); }
};

/// The coupling scanned is g (lambda for LMG). The truncation diagnostic is
/// applied to the eigenvectors at the largest coupling.
SpectrumScan spectrum_scan(const ModelSpec& spec, std::span<const double> g_grid, Index k_levels,
                           bool with_labels = true, unsigned threads = 0);

void write_scan_csv(std::ostream& os, const SpectrumScan& scan);

/// Symmetry quantum numbers of eigenvectors: <S> rounded to the nearest
/// integer, after diagonalizing S inside clusters closer than 1e-10 in energy.
/// The vectors of degenerate clusters are rotated in place.
std::vector<int> label_states(const Eigen::VectorXd& energies, Eigen::MatrixXcd& vectors,
                              const QuantumOperator& symmetry);

struct LevelTracks {
  std::vector<double> g_grid;
  std::vector<std::vector<Index>> level;  // [g][track] -> level index at g, -1 once lost
  std::vector<std::vector<int>> label;    // [g][track]
};

/// Follows the k lowest levels of the first grid point across the grid by maximal
/// overlap between neighbouring points (ties resolved by energy order). A
/// track is lost when less than half of its weight stays inside the computed
/// window of 3k + 4 levels; lost tracks keep their last label.
LevelTracks track_levels(const ModelSpec& spec, std::span<const double> g_grid, Index k_levels,
                         Symmetry symmetry);

struct DerivativeTable {
  std::vector<double> g;
  std::vector<double> first;
  std::vector<double> second;
};

/// Second-order finite differences of the ground energy; one-sided at the ends.
DerivativeTable ground_derivatives(const SpectrumScan& scan);
DerivativeTable finite_derivatives(std::span<const double> grid, std::span<const double> values);

struct GapTable {
  std::vector<double> g;
  std::vector<double> raw;        // E1 - E0
  std::vector<double> symmetric;  // first level sharing the ground label; NaN if none
};

GapTable gap_function(const SpectrumScan& scan);

struct SectorCrossing {
  double g;
  int label_before;
  int label_after;
  double raw_gap;
  double equal_label_gap;
};

/// Ground-state sector changes of a K-conserving model, refined by bisection
/// between the grid points that bracket them.
std::vector<SectorCrossing> sector_crossings(const ModelSpec& spec, std::span<const double> g_grid);

struct RidgePoint {
  double g;
  bool found;
  double energy;      // absolute ridge energy
  double ground;      // E0
  double excitation;  // energy - ground
  double separatrix;  // V(0) - E0 from the lowest adiabatic surface
};

struct RidgeAnalysis {
  std::vector<double> edges;               // bins + 1 energy edges shared by all g
  std::vector<std::vector<Index>> counts;  // [g][bin]
  std::vector<RidgePoint> ridge;
};

/// Level histograms per g and the excited-state transition energy, located as
/// the onset of parity-unpaired levels: below it every level has an
/// opposite-parity partner much closer than the local spacing.
RidgeAnalysis dos_and_ridge(const SpectrumScan& scan, Index bins);

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double r_squared = 0.0;
  double standard_error = 0.0;  // of the exponent; of the prefactor for fixed-power fits
  Index points = 0;

  bool accepted(double min_r_squared = 0.99) const noexcept { return r_squared >= min_r_squared; }
};

using Sample = std::pair<double, double>;

/// y = A x^p by least squares on log-log data within the control window.
FitResult fit_power_law(std::span<const Sample> points, std::pair<double, double> window);

/// y = A x^p with p fixed; r_squared measured on the linear data and the
/// reported error is the standard error of A.
FitResult fit_fixed_power(std::span<const Sample> points, double exponent, std::pair<double, double> window);

nlohmann::json fit_to_json(const FitResult& fit);

}  // namespace srad

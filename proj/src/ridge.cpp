#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "srad/semiclassics.hpp"
#include "srad/spectra.hpp"

namespace srad {

namespace {

// A level counts as paired when an opposite-parity level sits closer than
// this fraction of the local mean spacing.
constexpr double kPairedFraction = 0.1;
constexpr std::size_t kSpacingHalfWidth = 4;
// Onset: first level from which the majority of the next kOnsetWindow levels
// are unpaired.
constexpr std::size_t kOnsetWindow = 6;

std::optional<double> unpairing_onset(const std::vector<double>& e, const std::vector<int>& parity) {
  const std::size_t n = e.size();
  std::vector<bool> paired(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (parity[j] != parity[i]) nearest = std::min(nearest, std::abs(e[j] - e[i]));
    const std::size_t lo = i >= kSpacingHalfWidth ? i - kSpacingHalfWidth : 0;
    const std::size_t hi = std::min(n - 1, i + kSpacingHalfWidth);
    const double spacing = (e[hi] - e[lo]) / static_cast<double>(hi - lo);
    paired[i] = nearest < kPairedFraction * spacing;
  }
  for (std::size_t i = 0; i + kOnsetWindow <= n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = i; j < i + kOnsetWindow; ++j) count += paired[j] ? 1 : 0;
    if (2 * count < kOnsetWindow) return e[i];
  }
  return std::nullopt;
}

}  // namespace

RidgeAnalysis dos_and_ridge(const SpectrumScan& scan, Index bins) {
  if (bins < 1) throw ValidationError("bins: must be >= 1");
  if (scan.spec.rotating() || scan.spec.kind == ModelKind::LMG)
    throw ValidationError("kind: ridge detection needs a parity-symmetric model (Dicke or Rabi)");
  if (!scan.has_labels()) throw ValidationError("dos_and_ridge: scan carries no parity labels");
  if (scan.k_levels() < static_cast<Index>(2 * kOnsetWindow))
    throw ValidationError("dos_and_ridge: too few levels");

  RidgeAnalysis out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& l : scan.levels) {
    lo = std::min(lo, l.front());
    hi = std::max(hi, l.back());
  }
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (Index b = 0; b <= bins; ++b) out.edges.push_back(lo + width * static_cast<double>(b));

  const double gc = convention_ledger(scan.spec).critical_coupling;
  for (std::size_t i = 0; i < scan.g_grid.size(); ++i) {
    const auto& e = scan.levels[i];
    std::vector<Index> counts(static_cast<std::size_t>(bins), 0);
    for (double v : e) {
      auto b = static_cast<Index>((v - lo) / width);
      counts[static_cast<std::size_t>(std::clamp<Index>(b, 0, bins - 1))]++;
    }
    out.counts.push_back(std::move(counts));

    const ModelSpec at = scan.spec.with_coupling(scan.g_grid[i]);
    RidgePoint pt{};
    pt.g = scan.g_grid[i];
    pt.ground = e.front();
    pt.separatrix = adiabatic_potential(at, 0.0) - pt.ground;
    pt.found = false;
    pt.energy = pt.excitation = std::numeric_limits<double>::quiet_NaN();
    if (pt.g > gc) {
      const auto onset = unpairing_onset(e, scan.labels[i]);
      if (!onset) {
        std::ostringstream os;
        os << "ridge outside window at g=" << pt.g << ": all " << e.size()
           << " levels are parity-paired; increase k_levels";
        throw NumericalError(os.str());
      }
      pt.found = true;
      pt.energy = *onset;
      pt.excitation = *onset - pt.ground;
    }
    out.ridge.push_back(pt);
  }
  return out;
}

}  // namespace srad

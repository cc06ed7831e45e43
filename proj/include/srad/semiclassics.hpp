#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "srad/models.hpp"

namespace srad {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Mean-field variables: field quadratures (alpha = (x + ip)/sqrt2) and the
/// classical collective spin.
struct SemiclassicalState {
  double x = 0.0;
  double p = 0.0;
  double jx = 0.0;
  double jy = 0.0;
  double jz = 0.0;

  Vector5 vec() const { return (Vector5() << x, p, jx, jy, jz).finished(); }
  static SemiclassicalState from(const Vector5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }
  double spin_length() const;
};

/// Lowest adiabatic surface. For TC and JC the surface depends on x^2 + p^2.
double adiabatic_potential(const ModelSpec& spec, double x, double p = 0.0);

/// All adiabatic surfaces at (x, p), ascending.
std::vector<double> adiabatic_surfaces(const ModelSpec& spec, double x, double p = 0.0);

/// Coefficient of the neglected Sy gauge term, Omega^2 N / (Omega^2 N + 16 g^2 x^2).
double gauge_potential(const ModelSpec& spec, double x);

struct OrderParameter {
  double x = 0.0;  // >= 0 representative of the symmetry-broken pair
  double p = 0.0;
  Complex alpha;
  double photon_number = 0.0;
  double inversion = 0.0;  // Jz at the minimum
  double energy = 0.0;
};

/// Newton minimization of the coherent-state energy over field amplitude and
/// spin direction; cross-checked against the convention ledger.
OrderParameter mf_order_parameter(const ModelSpec& spec);

/// argmin over x >= 0 of the lowest adiabatic surface at p = 0.
double surface_minimizer(const ModelSpec& spec);

/// Threshold coupling with photon loss; nullopt when no finite threshold
/// exists (rotating-wave models with kappa > 0).
std::optional<double> critical_coupling(const ModelSpec& spec, double kappa);

double mean_field_energy(const ModelSpec& spec, const SemiclassicalState& s);

/// Mean-field equations of motion with photon loss on the field quadratures.
Vector5 eom_rhs(const ModelSpec& spec, const SemiclassicalState& s, double kappa);
Matrix5 eom_jacobian(const ModelSpec& spec, const SemiclassicalState& s, double kappa);

/// 1e-3 * min(1/A, 1/W, 1/max(kappa, A)) in the model's mean-field frequencies.
double default_time_step(const ModelSpec& spec, double kappa);

/// Fixed-step RK4 from s to t_end. dt <= 0 selects the default step.
SemiclassicalState integrate(const ModelSpec& spec, SemiclassicalState s, double kappa, double t_end,
                             double dt = 0.0);

enum class Stability { Stable, Center, Unstable };

struct FixedPoint {
  SemiclassicalState state;
  bool stable = false;
  Stability kind = Stability::Unstable;
  std::array<Complex, 5> jacobian_eigenvalues{};
};

/// Newton search from the trivial point and from spin-aligned starts at
/// several field amplitudes on both sides of x = 0. Results sorted by x.
std::vector<FixedPoint> fixed_points(const ModelSpec& spec, double kappa);

struct BranchRow {
  double g;
  int branch_id;  // 0 = trivial, then 1, 2, ... in order of x
  SemiclassicalState state;
  bool stable;
};

std::vector<BranchRow> bifurcation_scan(const ModelSpec& spec, std::span<const double> g_grid, double kappa,
                                        unsigned threads = 0);

/// Smallest grid coupling carrying a nontrivial branch.
std::optional<double> first_nontrivial_coupling(const std::vector<BranchRow>& rows);

void write_branch_csv(std::ostream& os, const std::vector<BranchRow>& rows);

}  // namespace srad

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "srad/operators.hpp"

namespace srad {

enum class ModelKind { Dicke, TC, Rabi, JC, LMG };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// Physical parameters of one model instance. N is used by Dicke, TC and LMG
/// (S = N/2 for LMG); C by Rabi and JC. boson_cutoff = 0 means "not chosen
/// yet" and is rejected by build_hamiltonian.
struct ModelSpec {
  ModelKind kind = ModelKind::Dicke;
  double omega = 1.0;  // boson frequency
  double Omega = 1.0;  // atomic frequency
  double g = 0.0;
  int N = 1;
  double C = 1.0;
  double kappa = 0.0;
  Index boson_cutoff = 0;
  double lambda = 0.0;

  bool has_boson() const noexcept { return kind != ModelKind::LMG; }
  bool rotating() const noexcept { return kind == ModelKind::TC || kind == ModelKind::JC; }
  bool scaled() const noexcept { return kind == ModelKind::Rabi || kind == ModelKind::JC; }
  Index spin_dim() const noexcept;
  Index boson_dim() const noexcept { return has_boson() ? boson_cutoff : 1; }
  Index dim() const noexcept { return boson_dim() * spin_dim(); }

  /// The scanned coupling: g, or lambda for LMG.
  double coupling() const noexcept { return kind == ModelKind::LMG ? lambda : g; }
  ModelSpec with_coupling(double value) const;

  /// Throws ValidationError naming the offending field. The cutoff is only
  /// checked when require_cutoff is set.
  void validate(bool require_cutoff = true) const;

  bool operator==(const ModelSpec&) const = default;
};

/// Coefficients of the coherent-state energy
///   E = A (x^2 + p^2)/2 + W Jz + c (x Jx - rho p Jy),  |J| = R,
/// with rho = 1 for the rotating-wave models and 0 otherwise.
struct MeanFieldCoefficients {
  double field_frequency;  // A
  double spin_frequency;   // W
  double spin_length;      // R
  double coupling;         // c
  bool rotating;
};

struct ConventionLedger {
  ModelKind kind;
  double critical_coupling;  // kappa = 0
  MeanFieldCoefficients surface;
  /// Prefactor P and shift Q in n_mf(g) = P (g^2/omega^2 - Q Omega^2/g^2).
  double photon_prefactor;
  double photon_shift;

  double photon_number(double g, double omega, double Omega) const;
};

MeanFieldCoefficients mean_field_coefficients(const ModelSpec& spec);
ConventionLedger convention_ledger(const ModelSpec& spec);

/// Mean-field photon number at the model's coupling (0 below threshold).
double ledger_photon_number(const ModelSpec& spec);

QuantumOperator build_hamiltonian(const ModelSpec& spec);

enum class Symmetry { Parity, Excitation };

/// Diagonal excitation number K = a^dagger a + Jz + N/2 or parity exp(i pi K).
QuantumOperator symmetry_operator(const ModelSpec& spec, Symmetry which);

/// Integer eigenvalue of K for each basis state.
std::vector<int> excitation_labels(const ModelSpec& spec);

/// Cutoff heuristic applied to the mean-field photon number at g_max.
Index heuristic_cutoff(const ModelSpec& spec, double g_max);

/// Copy of spec with boson_cutoff filled from the heuristic if unset.
ModelSpec resolve_cutoff(const ModelSpec& spec, double g_max);

}  // namespace srad

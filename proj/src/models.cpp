#include "srad/models.hpp"

#include <cmath>
#include <sstream>

namespace srad {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dicke: return "Dicke";
    case ModelKind::TC: return "TC";
    case ModelKind::Rabi: return "Rabi";
    case ModelKind::JC: return "JC";
    case ModelKind::LMG: return "LMG";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (ModelKind k : {ModelKind::Dicke, ModelKind::TC, ModelKind::Rabi, ModelKind::JC, ModelKind::LMG})
    if (name == to_string(k)) return k;
  throw ValidationError("kind: unknown model '" + std::string(name) + "'");
}

Index ModelSpec::spin_dim() const noexcept {
  return scaled() ? 2 : static_cast<Index>(N) + 1;
}

ModelSpec ModelSpec::with_coupling(double value) const {
  ModelSpec s = *this;
  if (kind == ModelKind::LMG)
    s.lambda = value;
  else
    s.g = value;
  return s;
}

void ModelSpec::validate(bool require_cutoff) const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError(field + ": " + why);
  };
  if (!(std::isfinite(omega) && omega > 0)) fail("omega", "must be > 0");
  if (!(std::isfinite(Omega) && Omega > 0)) fail("Omega", "must be > 0");
  if (!(std::isfinite(kappa) && kappa >= 0)) fail("kappa", "must be >= 0");
  if (kind == ModelKind::LMG) {
    if (!std::isfinite(lambda)) fail("lambda", "must be finite");
  } else if (!(std::isfinite(g) && g >= 0)) {
    fail("g", "must be >= 0");
  }
  if (scaled()) {
    if (!(std::isfinite(C) && C >= 1)) fail("C", "must be >= 1");
  } else if (N < 1) {
    fail("N", "must be >= 1");
  }
  if (require_cutoff && has_boson() && boson_cutoff < 2) fail("boson_cutoff", "must be >= 2");
}

double ConventionLedger::photon_number(double g, double omega, double Omega) const {
  if (g <= critical_coupling) return 0.0;
  return std::max(0.0, photon_prefactor * (g * g / (omega * omega) - photon_shift * Omega * Omega / (g * g)));
}

MeanFieldCoefficients mean_field_coefficients(const ModelSpec& spec) {
  spec.validate(false);
  const double sq2 = std::sqrt(2.0);
  switch (spec.kind) {
    case ModelKind::Dicke:
      return {spec.omega, spec.Omega, 0.5 * spec.N, 2.0 * sq2 * spec.g / std::sqrt(double(spec.N)), false};
    case ModelKind::TC:
      return {spec.omega, spec.Omega, 0.5 * spec.N, sq2 * spec.g / std::sqrt(double(spec.N)), true};
    case ModelKind::Rabi:
      return {spec.omega / std::sqrt(spec.C), std::sqrt(spec.C) * spec.Omega, 0.5, 2.0 * sq2 * spec.g, false};
    case ModelKind::JC:
      return {spec.omega / std::sqrt(spec.C), std::sqrt(spec.C) * spec.Omega, 0.5, sq2 * spec.g, true};
    case ModelKind::LMG: break;
  }
  throw ValidationError("kind: LMG has no boson mode");
}

ConventionLedger convention_ledger(const ModelSpec& spec) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double root = std::sqrt(spec.omega * spec.Omega);
  const double size = spec.scaled() ? spec.C : static_cast<double>(spec.N);
  if (spec.rotating()) return {spec.kind, root, mf, 0.25 * size, 1.0};
  return {spec.kind, 0.5 * root, mf, size, 1.0 / 16.0};
}

double ledger_photon_number(const ModelSpec& spec) {
  return convention_ledger(spec).photon_number(spec.g, spec.omega, spec.Omega);
}

namespace {

QuantumOperator lmg_hamiltonian(const ModelSpec& spec) {
  const double S = 0.5 * spec.N;
  Eigen::VectorXcd diag(spec.N + 1);
  for (int s = 0; s <= spec.N; ++s) {
    const double m = s - S;
    diag[s] = 0.5 * spec.Omega * m + (spec.lambda / S) * (S * (S + 1.0) - m * m);
  }
  return QuantumOperator::diagonal(diag, 1, spec.N + 1);
}

}  // namespace

QuantumOperator build_hamiltonian(const ModelSpec& spec) {
  spec.validate(true);
  if (spec.kind == ModelKind::LMG) return lmg_hamiltonian(spec);

  const double photons = ledger_photon_number(spec);
  if (photons >= static_cast<double>(spec.boson_cutoff - 1)) {
    std::ostringstream os;
    os << "boson_cutoff " << spec.boson_cutoff << " cannot hold the mean-field photon number " << photons
       << " at g=" << spec.g;
    throw TruncationError(os.str(), spec.g, 1.0);
  }

  const LadderOperators f = ladder_operators(spec.boson_cutoff);
  const SpinOperators j = collective_spin(spec.scaled() ? 1 : spec.N);
  const QuantumOperator field_id = QuantumOperator::identity(spec.boson_cutoff, 1);
  const QuantumOperator spin_id = QuantumOperator::identity(1, j.jz.spin_dim());

  double field_freq = spec.omega;
  double spin_freq = spec.Omega;
  double coupling = 0.0;
  if (spec.scaled()) {
    field_freq = spec.omega / std::sqrt(spec.C);
    spin_freq = std::sqrt(spec.C) * spec.Omega;  // (sqrt(C) Omega / 2) sigma_z = sqrt(C) Omega Jz
  }
  switch (spec.kind) {
    case ModelKind::Dicke: coupling = 2.0 * spec.g / std::sqrt(double(spec.N)); break;
    case ModelKind::TC: coupling = spec.g / std::sqrt(double(spec.N)); break;
    case ModelKind::Rabi: coupling = 2.0 * spec.g; break;  // sigma_x = 2 Jx
    case ModelKind::JC: coupling = spec.g; break;          // sigma_- = J-
    case ModelKind::LMG: break;
  }

  QuantumOperator h = field_freq * tensor(f.number, spin_id) + spin_freq * tensor(field_id, j.jz);
  if (spec.rotating()) {
    h += coupling * (tensor(f.creator, j.jminus) + tensor(f.annihilator, j.jplus));
  } else {
    h += coupling * tensor(f.creator + f.annihilator, j.jx);
  }
  return h;
}

std::vector<int> excitation_labels(const ModelSpec& spec) {
  spec.validate(true);
  if (spec.kind == ModelKind::LMG) throw ValidationError("kind: symmetry labels unsupported for LMG");
  const Index ns = spec.spin_dim();
  std::vector<int> k(static_cast<std::size_t>(spec.dim()));
  for (Index n = 0; n < spec.boson_cutoff; ++n)
    for (Index s = 0; s < ns; ++s) k[static_cast<std::size_t>(n * ns + s)] = static_cast<int>(n + s);
  return k;
}

QuantumOperator symmetry_operator(const ModelSpec& spec, Symmetry which) {
  const std::vector<int> k = excitation_labels(spec);
  Eigen::VectorXcd diag(static_cast<Index>(k.size()));
  for (std::size_t i = 0; i < k.size(); ++i) {
    const auto idx = static_cast<Index>(i);
    diag[idx] = which == Symmetry::Excitation ? double(k[i]) : (k[i] % 2 == 0 ? 1.0 : -1.0);
  }
  return QuantumOperator::diagonal(diag, spec.boson_cutoff, spec.spin_dim());
}

Index heuristic_cutoff(const ModelSpec& spec, double g_max) {
  if (!spec.has_boson()) return 0;
  return heuristic_cutoff(ledger_photon_number(spec.with_coupling(g_max)));
}

ModelSpec resolve_cutoff(const ModelSpec& spec, double g_max) {
  ModelSpec out = spec;
  if (out.has_boson() && out.boson_cutoff == 0) out.boson_cutoff = heuristic_cutoff(spec, g_max);
  return out;
}

}  // namespace srad

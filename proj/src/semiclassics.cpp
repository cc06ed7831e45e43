#include "srad/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "srad/csv.hpp"
#include "srad/parallel.hpp"

namespace srad {

double SemiclassicalState::spin_length() const { return std::sqrt(jx * jx + jy * jy + jz * jz); }

namespace {

double field_radius_sq(const ModelSpec& spec, double x, double p) {
  if (!spec.rotating() && p != 0.0)
    throw ValidationError("adiabatic_potential: Dicke and Rabi surfaces depend on x only");
  return x * x + p * p;
}

}  // namespace

double adiabatic_potential(const ModelSpec& spec, double x, double p) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double q2 = field_radius_sq(spec, x, p);
  return 0.5 * mf.field_frequency * q2 -
         mf.spin_length * std::sqrt(mf.spin_frequency * mf.spin_frequency + mf.coupling * mf.coupling * q2);
}

std::vector<double> adiabatic_surfaces(const ModelSpec& spec, double x, double p) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double q2 = field_radius_sq(spec, x, p);
  const double split = std::sqrt(mf.spin_frequency * mf.spin_frequency + mf.coupling * mf.coupling * q2);
  const int count = static_cast<int>(std::lround(2 * mf.spin_length)) + 1;
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(0.5 * mf.field_frequency * q2 + (i - mf.spin_length) * split);
  return v;
}

double gauge_potential(const ModelSpec& spec, double x) {
  if (spec.kind != ModelKind::Dicke) throw ValidationError("gauge_potential: Dicke model only");
  spec.validate(false);
  const double a = spec.Omega * spec.Omega * spec.N;
  return a / (a + 16.0 * spec.g * spec.g * x * x);
}

namespace {

// E(x, theta) on the p = 0 slice with Jz = -R cos(theta), Jx = R sin(theta).
struct SliceEnergy {
  double A, W, R, c;

  double value(double x, double t) const { return 0.5 * A * x * x - W * R * std::cos(t) + c * R * x * std::sin(t); }
  Eigen::Vector2d grad(double x, double t) const {
    return {A * x + c * R * std::sin(t), W * R * std::sin(t) + c * R * x * std::cos(t)};
  }
};

}  // namespace

OrderParameter mf_order_parameter(const ModelSpec& spec) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const SliceEnergy e{mf.field_frequency, mf.spin_frequency, mf.spin_length, mf.coupling};
  const double scale = 1.0 + e.W * e.R + e.c * e.R + e.A;
  // Eliminating x = -c R sin(theta) / A leaves
  //   f(theta) = -W R cos(theta) - (c^2 R^2 / 2A) sin^2(theta),
  // whose nontrivial stationary point solves q(theta) = W - k cos(theta) = 0
  // with k = c^2 R / A. q is increasing on [0, pi/2], so safeguarded Newton
  // on that bracket cannot miss the root.
  const double k = e.c * e.c * e.R / e.A;
  Eigen::Vector2d z(0.0, 0.0);
  if (k > e.W && spec.g > convention_ledger(spec).critical_coupling) {
    double lo = 0.0, hi = 0.5 * std::numbers::pi, t = 0.25 * std::numbers::pi;
    for (int it = 0; it < 200; ++it) {
      const double q = e.W - k * std::cos(t);
      (q > 0 ? hi : lo) = t;
      double next = t - q / (k * std::sin(t));
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-16 * std::max(1.0, t)) {
        t = next;
        break;
      }
      t = next;
    }
    z = {-e.c * e.R * std::sin(t) / e.A, t};
  }
  if (!(e.grad(z[0], z[1]).norm() <= 1e-12 * scale))
    throw NumericalError("mf_order_parameter: minimizer did not reach gradient tolerance 1e-12");

  OrderParameter out;
  out.x = std::abs(z[0]);
  out.p = 0.0;
  out.alpha = Complex(out.x / std::sqrt(2.0), 0.0);
  out.photon_number = 0.5 * out.x * out.x;
  out.inversion = -e.R * std::cos(z[1]);
  out.energy = e.value(z[0], z[1]);

  const double ledger = ledger_photon_number(spec);
  const double size = spec.scaled() ? spec.C : spec.N;
  if (ledger > 1e-6 * size && std::abs(out.photon_number - ledger) > 1e-8 * ledger) {
    std::ostringstream os;
    os << "mf_order_parameter: minimizer photon number " << out.photon_number
       << " disagrees with the ledger value " << ledger;
    throw NumericalError(os.str());
  }
  return out;
}

double surface_minimizer(const ModelSpec& spec) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double A = mf.field_frequency, W = mf.spin_frequency, R = mf.spin_length, c = mf.coupling;
  auto dv = [&](double x) { return A * x - R * c * c * x / std::sqrt(W * W + c * c * x * x); };
  auto d2v = [&](double x) {
    const double s = W * W + c * c * x * x;
    return A - R * c * c * W * W / (s * std::sqrt(s));
  };
  // V'(x)/x is increasing in x; a positive root exists iff V''(0) < 0.
  if (d2v(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = R * c / A + 1.0;
  while (dv(hi) <= 0.0) hi *= 2.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double f = dv(x);
    if (f > 0) hi = x; else lo = x;
    double next = x - f / d2v(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

std::optional<double> critical_coupling(const ModelSpec& spec, double kappa) {
  if (!(kappa >= 0.0)) throw ValidationError("kappa: must be >= 0");
  const ConventionLedger ledger = convention_ledger(spec);
  if (spec.rotating()) {
    if (kappa > 0.0) return std::nullopt;
    return ledger.critical_coupling;
  }
  // Linear stability of the trivial point: c^2 R A = W (A^2 + kappa^2).
  const MeanFieldCoefficients mf = ledger.surface;
  const double per_g = mean_field_coefficients(spec.with_coupling(1.0)).coupling;
  const double A = mf.field_frequency;
  const double cc = mf.spin_frequency * (A * A + kappa * kappa) / (A * mf.spin_length);
  return std::sqrt(cc) / per_g;
}

double mean_field_energy(const ModelSpec& spec, const SemiclassicalState& s) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double rho = mf.rotating ? 1.0 : 0.0;
  return 0.5 * mf.field_frequency * (s.x * s.x + s.p * s.p) + mf.spin_frequency * s.jz +
         mf.coupling * (s.x * s.jx - rho * s.p * s.jy);
}

namespace {

Vector5 rhs(const MeanFieldCoefficients& mf, const Vector5& v, double kappa) {
  const double A = mf.field_frequency, W = mf.spin_frequency, c = mf.coupling;
  const double rho = mf.rotating ? 1.0 : 0.0;
  const double x = v[0], p = v[1], jx = v[2], jy = v[3], jz = v[4];
  const double hx = c * x, hy = -c * rho * p, hz = W;
  Vector5 d;
  d << A * p - c * rho * jy - kappa * x, -A * x - c * jx - kappa * p, hy * jz - hz * jy, hz * jx - hx * jz,
      hx * jy - hy * jx;
  return d;
}

void check_spin_length(const MeanFieldCoefficients& mf, const SemiclassicalState& s) {
  if (std::abs(s.spin_length() - mf.spin_length) > 1e-6 * std::max(1.0, mf.spin_length)) {
    std::ostringstream os;
    os << "spin length " << s.spin_length() << " differs from " << mf.spin_length;
    throw ValidationError(os.str());
  }
}

}  // namespace

Vector5 eom_rhs(const ModelSpec& spec, const SemiclassicalState& s, double kappa) {
  if (spec.kind == ModelKind::LMG) throw ValidationError("kind: LMG has no field equations");
  if (!(kappa >= 0.0)) throw ValidationError("kappa: must be >= 0");
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  check_spin_length(mf, s);
  return rhs(mf, s.vec(), kappa);
}

Matrix5 eom_jacobian(const ModelSpec& spec, const SemiclassicalState& s, double kappa) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double A = mf.field_frequency, W = mf.spin_frequency, c = mf.coupling;
  const double r = mf.rotating ? 1.0 : 0.0;
  Matrix5 j;
  // clang-format off
  j << -kappa,      A,           0,           -c * r,  0,
       -A,          -kappa,      -c,          0,       0,
       0,           -c * r * s.jz, 0,         -W,      -c * r * s.p,
       -c * s.jz,   0,           W,           0,       -c * s.x,
       c * s.jy,    c * r * s.jx, c * r * s.p, c * s.x, 0;
  // clang-format on
  return j;
}

double default_time_step(const ModelSpec& spec, double kappa) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double A = mf.field_frequency;
  return 1e-3 * std::min({1.0 / A, 1.0 / mf.spin_frequency, 1.0 / std::max(kappa, A)});
}

SemiclassicalState integrate(const ModelSpec& spec, SemiclassicalState s, double kappa, double t_end, double dt) {
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  check_spin_length(mf, s);
  if (dt <= 0.0) dt = default_time_step(spec, kappa);
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  if (steps <= 0) return s;
  const double h = t_end / static_cast<double>(steps);
  Vector5 v = s.vec();
  for (long i = 0; i < steps; ++i) {
    const Vector5 k1 = rhs(mf, v, kappa);
    const Vector5 k2 = rhs(mf, v + 0.5 * h * k1, kappa);
    const Vector5 k3 = rhs(mf, v + 0.5 * h * k2, kappa);
    const Vector5 k4 = rhs(mf, v + h * k3, kappa);
    v += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return SemiclassicalState::from(v);
}

namespace {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix65 = Eigen::Matrix<double, 6, 5>;

Vector6 residual(const MeanFieldCoefficients& mf, const Vector5& v, double kappa) {
  Vector6 r;
  r.head<5>() = rhs(mf, v, kappa);
  r[5] = (v.tail<3>().squaredNorm() - mf.spin_length * mf.spin_length) / (2 * mf.spin_length);
  return r;
}

// Gauss-Newton on the five flow equations plus the spin-length constraint.
// Stops at `tol`, or at `loose` when rounding prevents further progress.
std::optional<Vector5> newton(const MeanFieldCoefficients& mf, Vector5 v, double kappa, double tol, double loose) {
  constexpr double step = 1e-7;
  Vector6 r = residual(mf, v, kappa);
  for (int it = 0; it < 200; ++it) {
    if (r.norm() <= tol) return v;
    Matrix65 jac;
    for (int k = 0; k < 5; ++k) {
      Vector5 a = v, b = v;
      a[k] += step;
      b[k] -= step;
      jac.col(k) = (residual(mf, a, kappa) - residual(mf, b, kappa)) / (2 * step);
    }
    const Vector5 delta = jac.colPivHouseholderQr().solve(-r);
    double t = 1.0;
    Vector6 trial_r;
    Vector5 trial;
    do {
      trial = v + t * delta;
      trial_r = residual(mf, trial, kappa);
      if (trial_r.norm() < r.norm()) break;
      t *= 0.5;
    } while (t > 1e-6);
    if (!(trial_r.norm() < r.norm())) return r.norm() <= loose ? std::optional<Vector5>(v) : std::nullopt;
    v = trial;
    r = trial_r;
  }
  return r.norm() <= loose ? std::optional<Vector5>(v) : std::nullopt;
}

FixedPoint classify(const ModelSpec& spec, const MeanFieldCoefficients& mf, const Vector5& v, double kappa) {
  FixedPoint fp;
  fp.state = SemiclassicalState::from(v);
  const Matrix5 jac = eom_jacobian(spec, fp.state, kappa);
  Eigen::EigenSolver<Matrix5> full(jac, false);
  for (int i = 0; i < 5; ++i) fp.jacobian_eigenvalues[static_cast<std::size_t>(i)] = full.eigenvalues()[i];
  std::sort(fp.jacobian_eigenvalues.begin(), fp.jacobian_eigenvalues.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  // The spin length is conserved, so one eigenvalue is identically zero.
  // Stability is judged on the four modes tangent to the spin sphere.
  const Eigen::Vector3d n = v.tail<3>() / mf.spin_length;
  Eigen::Vector3d e1 = n.unitOrthogonal();
  Eigen::Vector3d e2 = n.cross(e1);
  Eigen::Matrix<double, 5, 4> basis = Eigen::Matrix<double, 5, 4>::Zero();
  basis(0, 0) = 1;
  basis(1, 1) = 1;
  basis.block<3, 1>(2, 2) = e1;
  basis.block<3, 1>(2, 3) = e2;
  const Eigen::Matrix4d reduced = basis.transpose() * jac * basis;
  Eigen::EigenSolver<Eigen::Matrix4d> tangent(reduced, false);
  const double max_re = tangent.eigenvalues().real().maxCoeff();
  if (max_re > 1e-10)
    fp.kind = Stability::Unstable;
  else if (max_re < -1e-10)
    fp.kind = Stability::Stable;
  else
    fp.kind = Stability::Center;
  fp.stable = fp.kind == Stability::Stable;
  return fp;
}

}  // namespace

std::vector<FixedPoint> fixed_points(const ModelSpec& spec, double kappa) {
  if (spec.kind == ModelKind::LMG) throw ValidationError("kind: LMG has no field equations");
  if (!(kappa >= 0.0)) throw ValidationError("kappa: must be >= 0");
  const MeanFieldCoefficients mf = mean_field_coefficients(spec);
  const double R = mf.spin_length, A = mf.field_frequency;
  const double scale = 1.0 + R * (A + mf.spin_frequency + mf.coupling) + kappa;
  const double tol = 1e-13 * scale;

  std::vector<Vector5> starts;
  starts.push_back((Vector5() << 0, 0, 0, 0, -R).finished());
  const double reach = R * mf.coupling / A;
  if (reach > 0) {
    for (double f : {0.03125, 0.125, 0.5, 1.0, 2.0})
      for (double sign : {1.0, -1.0}) {
        const double x = sign * f * reach;
        const double p = mf.rotating ? 0.0 : kappa * x / A;
        Eigen::Vector3d h(mf.coupling * x, mf.rotating ? -mf.coupling * p : 0.0, mf.spin_frequency);
        Vector5 s;
        s << x, p, -R * h.normalized();
        starts.push_back(s);
      }
  }

  std::vector<Vector5> found;
  for (const Vector5& s : starts) {
    auto v = newton(mf, s, kappa, tol, 1e-10 * scale);
    if (!v) continue;
    bool duplicate = false;
    for (const Vector5& f : found)
      if ((f - *v).norm() <= 1e-6 * (1.0 + R)) duplicate = true;
    if (!duplicate) found.push_back(*v);
  }
  std::sort(found.begin(), found.end(), [](const Vector5& a, const Vector5& b) {
    for (int i = 0; i < 5; ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  std::vector<FixedPoint> out;
  for (const Vector5& v : found) out.push_back(classify(spec, mf, v, kappa));
  return out;
}

namespace {

bool is_trivial(const SemiclassicalState& s, double R) {
  return std::abs(s.x) + std::abs(s.p) + std::abs(s.jx) + std::abs(s.jy) <= 1e-7 * (1.0 + R) && s.jz < 0;
}

}  // namespace

std::vector<BranchRow> bifurcation_scan(const ModelSpec& spec, std::span<const double> g_grid, double kappa,
                                        unsigned threads) {
  if (g_grid.empty()) throw ValidationError("grid: must be nonempty");
  std::vector<std::vector<FixedPoint>> per_g(g_grid.size());
  parallel_for(static_cast<Index>(g_grid.size()), threads, [&](Index i) {
    per_g[static_cast<std::size_t>(i)] = fixed_points(spec.with_coupling(g_grid[static_cast<std::size_t>(i)]), kappa);
  });
  const double R = mean_field_coefficients(spec).spin_length;
  std::vector<BranchRow> rows;
  for (std::size_t i = 0; i < g_grid.size(); ++i) {
    int next_id = 1;
    for (const FixedPoint& fp : per_g[i]) {
      const int id = is_trivial(fp.state, R) ? 0 : next_id++;
      rows.push_back({g_grid[i], id, fp.state, fp.stable});
    }
  }
  return rows;
}

std::optional<double> first_nontrivial_coupling(const std::vector<BranchRow>& rows) {
  std::optional<double> best;
  for (const BranchRow& r : rows)
    if (r.branch_id != 0 && (!best || r.g < *best)) best = r.g;
  return best;
}

void write_branch_csv(std::ostream& os, const std::vector<BranchRow>& rows) {
  CsvWriter w(os);
  for (const char* h : {"g", "branch_id", "x", "p", "Jx", "Jy", "Jz", "stable"}) w.cell(std::string(h));
  w.end_row();
  for (const BranchRow& r : rows) {
    w.cell(r.g).cell(r.branch_id).cell(r.state.x).cell(r.state.p).cell(r.state.jx).cell(r.state.jy);
    w.cell(r.state.jz).cell(r.stable ? 1 : 0);
    w.end_row();
  }
}

}  // namespace srad

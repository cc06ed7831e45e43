#include <algorithm>
#include <cmath>
#include <sstream>

#include "lindblad_internal.hpp"

namespace srad {

namespace detail {

void check_jumps(const QuantumOperator& h, std::span<const JumpOperator> jumps) {
  if (h.dim() == 0) throw ValidationError("H: empty operator");
  if (!h.is_hermitian(1e-10)) throw ValidationError("H: not Hermitian");
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (jumps[i].op.dim() != h.dim()) {
      std::ostringstream os;
      os << "jumps[" << i << "]: dimension " << jumps[i].op.dim() << " does not match H (" << h.dim() << ")";
      throw ValidationError(os.str());
    }
    if (!(jumps[i].rate >= 0) || !std::isfinite(jumps[i].rate)) {
      std::ostringstream os;
      os << "jumps[" << i << "]: rate must be finite and >= 0";
      throw ValidationError(os.str());
    }
  }
}

Generator::Generator(const QuantumOperator& h, std::span<const JumpOperator> jumps) {
  check_jumps(h, jumps);
  m_ = Complex(0, -1) * h.matrix();
  double jump_bound = 0.0;
  for (const JumpOperator& j : jumps) {
    if (j.rate == 0.0) continue;
    const SparseMatrixC& l = j.op.matrix();
    SparseMatrixC ldl = SparseMatrixC(l.adjoint()) * l;
    m_ -= j.rate * ldl;
    l_.push_back(l);
    rates_.push_back(j.rate);
    const double ln = j.op.norm_inf() * j.op.adjoint().norm_inf();
    jump_bound += 2.0 * j.rate * ln;
  }
  m_.makeCompressed();
  // max(||M||_1, ||M||_inf) bounds the spectral radius of M.
  double mn = 0.0;
  for (Index r = 0; r < m_.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrixC::InnerIterator it(m_, r); it; ++it) s += std::abs(it.value());
    mn = std::max(mn, s);
  }
  const QuantumOperator mop(m_, h.boson_dim(), h.spin_dim());
  mn = std::max(mn, mop.norm_inf());
  bound_ = 2.0 * mn + jump_bound;
}

Eigen::MatrixXcd Generator::apply(const Eigen::MatrixXcd& rho) const {
  Eigen::MatrixXcd out = m_ * rho;
  out += out.adjoint().eval();
  for (std::size_t i = 0; i < l_.size(); ++i) {
    const Eigen::MatrixXcd lr = l_[i] * rho;
    const Eigen::MatrixXcd lrl = l_[i] * lr.adjoint();  // L (L rho)^dagger = L rho L^dagger
    out += (2.0 * rates_[i]) * lrl;
  }
  return out;
}

}  // namespace detail

Eigen::MatrixXcd liouvillian_apply(const QuantumOperator& h, std::span<const JumpOperator> jumps,
                                   const Eigen::MatrixXcd& rho) {
  if (rho.rows() != h.dim() || rho.cols() != h.dim()) throw ValidationError("rho: dimension mismatch with H");
  return detail::Generator(h, jumps).apply(rho);
}

namespace {

void add_kron(std::vector<Eigen::Triplet<Complex>>& out, const SparseMatrixC& a, const SparseMatrixC& b,
              Complex scale) {
  const Index rb = b.rows(), cb = b.cols();
  for (Index ca = 0; ca < a.outerSize(); ++ca)
    for (SparseMatrixC::InnerIterator ia(a, ca); ia; ++ia)
      for (Index cbi = 0; cbi < b.outerSize(); ++cbi)
        for (SparseMatrixC::InnerIterator ib(b, cbi); ib; ++ib)
          out.emplace_back(ia.row() * rb + ib.row(), ia.col() * cb + ib.col(), scale * ia.value() * ib.value());
}

}  // namespace

SparseMatrixC vectorized_liouvillian(const QuantumOperator& h, std::span<const JumpOperator> jumps) {
  detail::check_jumps(h, jumps);
  const Index d = h.dim();
  SparseMatrixC m = Complex(0, -1) * h.matrix();
  for (const JumpOperator& j : jumps)
    if (j.rate != 0.0) m -= j.rate * SparseMatrixC(SparseMatrixC(j.op.matrix().adjoint()) * j.op.matrix());
  SparseMatrixC id(d, d);
  id.setIdentity();
  // vec(A rho B) = (B^T kron A) vec(rho)
  std::vector<Eigen::Triplet<Complex>> trip;
  add_kron(trip, id, m, 1.0);
  add_kron(trip, SparseMatrixC(m.conjugate()), id, 1.0);
  for (const JumpOperator& j : jumps)
    if (j.rate != 0.0) add_kron(trip, SparseMatrixC(j.op.matrix().conjugate()), j.op.matrix(), 2.0 * j.rate);
  SparseMatrixC out(d * d, d * d);
  out.setFromTriplets(trip.begin(), trip.end());
  out.prune(Complex(0.0));
  return out;
}

namespace {

constexpr int kMaxHalvings = 4;

struct MasterRun {
  TrajectorySeries series;
  bool ok = true;
  std::string failure;
};

MasterRun run_master(const detail::Generator& gen, const DensityMatrix& rho0, std::span<const double> t_grid,
                     std::span<const Observable> observables, double dt_max,
                     const std::function<void(double, const DensityMatrix&)>& observer) {
  MasterRun run;
  TrajectorySeries& s = run.series;
  s.times.assign(t_grid.begin(), t_grid.end());
  for (const Observable& o : observables) s.names.push_back(o.name);
  s.mean.assign(observables.size(), std::vector<double>(t_grid.size(), 0.0));
  s.standard_error.assign(observables.size(), std::vector<double>(t_grid.size(), 0.0));
  s.n_traj = 1;
  s.dt = dt_max;

  Eigen::MatrixXcd rho = rho0.matrix();
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    if (ti > 0) {
      const double span = t_grid[ti] - t_grid[ti - 1];
      const auto steps = static_cast<Index>(std::max(1.0, std::ceil(span / dt_max - 1e-9)));
      const double h = span / static_cast<double>(steps);
      for (Index st = 0; st < steps; ++st) {
        const Eigen::MatrixXcd k1 = gen.apply(rho);
        const Eigen::MatrixXcd k2 = gen.apply(rho + (0.5 * h) * k1);
        const Eigen::MatrixXcd k3 = gen.apply(rho + (0.5 * h) * k2);
        const Eigen::MatrixXcd k4 = gen.apply(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint()).eval();
      }
    }
    try {
      DensityMatrix dm(rho);
      for (std::size_t o = 0; o < observables.size(); ++o) s.mean[o][ti] = dm.expectation(observables[o].op);
      if (observer) observer(t_grid[ti], dm);
    } catch (const ValidationError& e) {
      run.ok = false;
      std::ostringstream os;
      os << "t=" << t_grid[ti] << ": " << e.what();
      run.failure = os.str();
      return run;
    }
  }
  return run;
}

}  // namespace

TrajectorySeries evolve_master(const QuantumOperator& h, std::span<const JumpOperator> jumps,
                               const DensityMatrix& rho0, std::span<const double> t_grid,
                               std::span<const Observable> observables, const MasterOptions& opts) {
  const detail::Generator gen(h, jumps);
  if (rho0.dim() != h.dim()) throw ValidationError("rho0: dimension mismatch with H");
  if (t_grid.empty()) throw ValidationError("t_grid: empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw ValidationError("t_grid: must be strictly ascending");
  for (const Observable& o : observables)
    if (o.op.dim() != h.dim()) throw ValidationError("observable '" + o.name + "': dimension mismatch");
  if (opts.dt < 0) throw ValidationError("dt: must be >= 0");

  double dt = opts.dt > 0 ? opts.dt : 0.1 / std::max(gen.norm_bound(), 1e-12);
  std::string last;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, dt *= 0.5) {
    MasterRun run = run_master(gen, rho0, t_grid, observables, dt, opts.observer);
    if (run.ok) return std::move(run.series);
    last = run.failure;
  }
  throw NumericalError("evolve_master: state left the physical set after " + std::to_string(kMaxHalvings) +
                       " step halvings (" + last + ")");
}

}  // namespace srad

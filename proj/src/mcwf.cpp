#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lindblad_internal.hpp"
#include "srad/eigensolver.hpp"
#include "srad/parallel.hpp"

namespace srad {

namespace {

constexpr double kMaxJumpProbability = 0.1;
constexpr int kMaxRefinement = 40;

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Draw n of stream k is splitmix(key(seed, k) + n * golden): a pure function
// of (seed, trajectory, draw), independent of scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix(seed ^ splitmix(stream))) {}

  double uniform() {
    const std::uint64_t z = splitmix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Connected components of the sparsity graph of the drift operator. The
// no-jump evolution never mixes components, so only those carrying amplitude
// need to be propagated.
std::vector<std::vector<Index>> components(const SparseMatrixC& m) {
  const Index n = m.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(m, c); it; ++it) {
      const Index a = find(it.row()), b = find(it.col());
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  std::vector<Index> root_slot(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> out;
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    Index& slot = root_slot[static_cast<std::size_t>(r)];
    if (slot < 0) {
      slot = static_cast<Index>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot)].push_back(i);
  }
  return out;
}

using RowSparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using RowSparseR = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Pair = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// With H and every L^dagger L real, psi = u + i v obeys
//   u' = H v - G u,  v' = -H u - G v,   G = sum rate L^dagger L,
// which costs half the flops of the complex product.
struct Block {
  std::vector<Index> index;
  bool real = false;
  RowSparse drift;  // complex path: -i (H_eff - shift)
  RowSparseR h;     // real path: H - shift
  RowSparseR gamma;
  Eigen::VectorXd gamma_diag;
  bool gamma_diagonal = false;
};

struct Jump {
  SparseMatrixC op;
  SparseMatrixC ldl;  // L^dagger L
  Eigen::VectorXd ldl_diag;
  bool diagonal;
  double rate;
};

// Extreme eigenvalues of H, used to size the RK4 step.
std::pair<double, double> spectral_interval(const QuantumOperator& h) {
  EigenOptions opts;
  opts.vectors = false;
  const double lo = eig_hermitian(h, 1, opts).eigenvalues(0);
  const double hi = -eig_hermitian(-1.0 * h, 1, opts).eigenvalues(0);
  return {lo, hi};
}

class Unraveling {
 public:
  Unraveling(const QuantumOperator& h, std::span<const JumpOperator> jumps, const Eigen::VectorXcd& psi0,
             double dt_request) {
    const Index d = h.dim();
    SparseMatrixC gamma(d, d);
    double gamma_bound = 0.0;
    for (const JumpOperator& j : jumps) {
      if (j.rate == 0.0) continue;
      Jump jp;
      jp.op = j.op.matrix();
      jp.ldl = SparseMatrixC(jp.op.adjoint()) * jp.op;
      jp.ldl.makeCompressed();
      const QuantumOperator ldl_op(jp.ldl, h.boson_dim(), h.spin_dim());
      jp.diagonal = ldl_op.is_diagonal();
      if (jp.diagonal) jp.ldl_diag = jp.ldl.diagonal().real();
      jp.rate = j.rate;
      gamma += j.rate * jp.ldl;
      gamma_bound += j.rate * ldl_op.norm_inf();
      jumps_.push_back(std::move(jp));
    }
    gamma.makeCompressed();
    const QuantumOperator gamma_op(gamma, h.boson_dim(), h.spin_dim());
    const bool real = h.is_real() && gamma_op.is_real();
    const SparseMatrixC heff = h.matrix() - Complex(0, 1) * gamma;

    const auto [lo, hi] = spectral_interval(h);
    const double e0 = expectation(h, psi0).real();
    shift_ = std::clamp(e0, lo, hi);
    const double width = std::max({hi - shift_, shift_ - lo, 1e-12}) + gamma_bound;
    dt_ = dt_request > 0 ? dt_request : 1.0 / width;

    for (std::vector<Index>& idx : components(heff)) {
      const auto n = static_cast<Index>(idx.size());
      std::vector<Index> local(static_cast<std::size_t>(d), -1);
      for (Index k = 0; k < n; ++k) local[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = k;
      auto restrict_to = [&](const SparseMatrixC& m, double diag_shift) {
        std::vector<Eigen::Triplet<Complex>> trip;
        // The shift goes in as separate triplets: zero diagonal entries need
        // not be stored in m.
        if (diag_shift != 0.0)
          for (Index k = 0; k < n; ++k) trip.emplace_back(k, k, -diag_shift);
        for (Index gi : idx)
          for (SparseMatrixC::InnerIterator it(m, gi); it; ++it)
            trip.emplace_back(local[static_cast<std::size_t>(it.row())], local[static_cast<std::size_t>(it.col())],
                              it.value());
        RowSparse out(n, n);
        out.setFromTriplets(trip.begin(), trip.end());
        out.makeCompressed();
        return out;
      };
      Block b;
      b.real = real;
      if (real) {
        b.h = restrict_to(h.matrix(), shift_).real();
        b.gamma = restrict_to(gamma, 0.0).real();
        b.gamma_diagonal = true;
        for (Index r = 0; r < n && b.gamma_diagonal; ++r)
          for (RowSparseR::InnerIterator it(b.gamma, r); it; ++it)
            if (it.col() != r && it.value() != 0.0) b.gamma_diagonal = false;
        if (b.gamma_diagonal) b.gamma_diag = Eigen::VectorXd(b.gamma.diagonal());
      } else {
        b.drift = Complex(0, -1) * restrict_to(heff, shift_);
      }
      b.index = std::move(idx);
      blocks_.push_back(std::move(b));
    }
    block_of_.assign(static_cast<std::size_t>(d), 0);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi)
      for (Index gi : blocks_[bi].index) block_of_[static_cast<std::size_t>(gi)] = static_cast<Index>(bi);
  }

  double dt() const noexcept { return dt_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const Block& block(std::size_t i) const { return blocks_[i]; }
  Index block_of(Index basis) const { return block_of_[static_cast<std::size_t>(basis)]; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }

 private:
  std::vector<Block> blocks_;
  std::vector<Index> block_of_;
  std::vector<Jump> jumps_;
  double shift_ = 0.0;
  double dt_ = 0.0;
};

// Waiting-time unraveling: a jump fires once the integrated rate
// sum 2 rate <L^dagger L> (trapezoid rule over each RK4 step) reaches an
// exponential variate. The state is renormalized every step, so RK4's own
// slight norm loss never masquerades as a jump.
class Trajectory {
 public:
  Trajectory(const Unraveling& u, Eigen::VectorXcd psi, CounterRng rng, bool record)
      : u_(u), psi_(std::move(psi)), rng_(rng), record_(record) {
    psi_ /= psi_.norm();
    target_ = draw_target();
    refresh_active();
  }

  const Eigen::VectorXcd& state() const noexcept { return psi_; }
  std::vector<double>& jump_times() noexcept { return jump_times_; }

  void advance(double t, double h, int depth = 0) {
    const double g0 = total_rate();
    start_ = psi_;
    drift(h);
    const double g1 = total_rate();
    // Step acceptance: at most 0.1 jump probability per step.
    if (h * std::max(g0, g1) > kMaxJumpProbability) {
      if (depth >= kMaxRefinement) throw NumericalError("mcwf: jump probability per step stays above 0.1");
      psi_ = start_;
      advance(t, 0.5 * h, depth + 1);
      advance(t + 0.5 * h, 0.5 * h, depth + 1);
      return;
    }
    const double step_integral = 0.5 * h * (g0 + g1);
    if (integrated_ + step_integral < target_) {
      integrated_ += step_integral;
      return;
    }
    // The rate is linear across the step; solve g0 tau + (g1 - g0) tau^2 / 2h = need.
    const double need = target_ - integrated_;
    const double a = 0.5 * (g1 - g0) / h;
    double tau = 2.0 * need / (g0 + std::sqrt(std::max(g0 * g0 + 4.0 * a * need, 0.0)));
    if (!std::isfinite(tau)) tau = h;
    tau = std::clamp(tau, 0.0, h);
    psi_ = start_;
    if (tau > 0) drift(tau);
    jump(t + tau);
    if (h - tau > 0) advance(t + tau, h - tau, depth);
  }

 private:
  double draw_target() {
    double r;
    do r = rng_.uniform();
    while (r <= 0.0);
    integrated_ = 0.0;
    return -std::log(r);
  }

  double total_rate() {
    rates_.resize(u_.jumps().size());
    double total = 0.0;
    for (std::size_t i = 0; i < u_.jumps().size(); ++i) {
      const Jump& j = u_.jumps()[i];
      const double ev = j.diagonal ? psi_.cwiseAbs2().cwiseProduct(j.ldl_diag).sum() : psi_.dot(j.ldl * psi_).real();
      rates_[i] = 2.0 * j.rate * std::max(ev, 0.0);
      total += rates_[i];
    }
    return total;
  }

  void jump(double when) {
    const double total = total_rate();
    if (!(total > 0)) throw NumericalError("mcwf: jump time reached with no active channel");
    const double r = rng_.uniform() * total;
    double acc = 0.0;
    std::size_t pick = rates_.size() - 1;
    for (std::size_t i = 0; i < rates_.size(); ++i) {
      acc += rates_[i];
      if (r < acc) {
        pick = i;
        break;
      }
    }
    psi_ = u_.jumps()[pick].op * psi_;
    const double n = psi_.norm();
    if (!(n > 0)) throw NumericalError("mcwf: jump annihilated the state");
    psi_ /= n;
    target_ = draw_target();
    refresh_active();
    if (record_) jump_times_.push_back(when);
  }

  void refresh_active() {
    active_.clear();
    std::vector<char> seen(u_.block_count(), 0);
    for (Index i = 0; i < psi_.size(); ++i)
      if (psi_(i) != Complex(0.0)) {
        const auto b = static_cast<std::size_t>(u_.block_of(i));
        if (!seen[b]) {
          seen[b] = 1;
          active_.push_back(b);
        }
      }
    std::sort(active_.begin(), active_.end());
  }

  void real_rhs(const Block& b, const Pair& y, Pair& out) {
    hy_.noalias() = b.h * y;
    out.resize(y.rows(), 2);
    if (b.gamma_diagonal) {
      out.col(0) = hy_.col(1) - b.gamma_diag.cwiseProduct(y.col(0));
      out.col(1) = -hy_.col(0) - b.gamma_diag.cwiseProduct(y.col(1));
    } else {
      gy_.noalias() = b.gamma * y;
      out.col(0) = hy_.col(1) - gy_.col(0);
      out.col(1) = -hy_.col(0) - gy_.col(1);
    }
  }

  void drift_real(const Block& blk, double h) {
    const auto n = static_cast<Index>(blk.index.size());
    p_.resize(n, 2);
    for (Index k = 0; k < n; ++k) {
      const Complex z = psi_(blk.index[static_cast<std::size_t>(k)]);
      p_(k, 0) = z.real();
      p_(k, 1) = z.imag();
    }
    real_rhs(blk, p_, q1_);
    pt_ = p_ + (0.5 * h) * q1_;
    real_rhs(blk, pt_, q2_);
    pt_ = p_ + (0.5 * h) * q2_;
    real_rhs(blk, pt_, q3_);
    pt_ = p_ + h * q3_;
    real_rhs(blk, pt_, q4_);
    p_ += (h / 6.0) * (q1_ + 2.0 * q2_ + 2.0 * q3_ + q4_);
    for (Index k = 0; k < n; ++k) psi_(blk.index[static_cast<std::size_t>(k)]) = Complex(p_(k, 0), p_(k, 1));
  }

  void drift_complex(const Block& blk, double h) {
    const auto n = static_cast<Index>(blk.index.size());
    y_.resize(n);
    for (Index k = 0; k < n; ++k) y_(k) = psi_(blk.index[static_cast<std::size_t>(k)]);
    k1_.noalias() = blk.drift * y_;
    tmp_ = y_ + (0.5 * h) * k1_;
    k2_.noalias() = blk.drift * tmp_;
    tmp_ = y_ + (0.5 * h) * k2_;
    k3_.noalias() = blk.drift * tmp_;
    tmp_ = y_ + h * k3_;
    k4_.noalias() = blk.drift * tmp_;
    y_ += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    for (Index k = 0; k < n; ++k) psi_(blk.index[static_cast<std::size_t>(k)]) = y_(k);
  }

  void drift(double h) {
    for (std::size_t b : active_) {
      const Block& blk = u_.block(b);
      if (blk.real)
        drift_real(blk, h);
      else
        drift_complex(blk, h);
    }
    const double n = psi_.norm();
    if (!(n > 0) || !std::isfinite(n)) throw NumericalError("mcwf: state norm collapsed during drift");
    psi_ /= n;
  }

  const Unraveling& u_;
  Eigen::VectorXcd psi_;
  CounterRng rng_;
  bool record_;
  std::vector<std::size_t> active_;
  std::vector<double> rates_;
  std::vector<double> jump_times_;
  double target_ = 0.0;
  double integrated_ = 0.0;
  Eigen::VectorXcd start_;
  Eigen::VectorXcd y_, k1_, k2_, k3_, k4_, tmp_;
  Pair p_, pt_, q1_, q2_, q3_, q4_, hy_, gy_;
};

}  // namespace

TrajectorySeries mcwf_ensemble(const QuantumOperator& h, std::span<const JumpOperator> jumps,
                               const Eigen::VectorXcd& psi0, std::span<const double> t_grid, Index n_traj,
                               std::uint64_t seed, std::span<const Observable> observables,
                               const McwfOptions& opts) {
  detail::check_jumps(h, jumps);
  if (psi0.size() != h.dim()) throw ValidationError("psi0: dimension mismatch with H");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ValidationError("psi0: must be normalized");
  if (n_traj < 1) throw ValidationError("n_traj: must be >= 1");
  if (t_grid.empty()) throw ValidationError("t_grid: empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw ValidationError("t_grid: must be strictly ascending");
  for (const Observable& o : observables)
    if (o.op.dim() != h.dim()) throw ValidationError("observable '" + o.name + "': dimension mismatch");
  if (opts.dt < 0) throw ValidationError("dt: must be >= 0");

  const Unraveling u(h, jumps, psi0, opts.dt);
  const std::size_t nt = t_grid.size(), no = observables.size();
  // values[traj][obs * nt + t]
  std::vector<std::vector<double>> values(static_cast<std::size_t>(n_traj));
  std::vector<std::vector<double>> jump_log(opts.record_jumps ? static_cast<std::size_t>(n_traj) : 0);

  parallel_for(n_traj, opts.threads, [&](Index traj) {
    Trajectory tr(u, psi0, CounterRng(seed, static_cast<std::uint64_t>(traj)), opts.record_jumps);
    std::vector<double>& out = values[static_cast<std::size_t>(traj)];
    out.assign(no * nt, 0.0);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      if (ti > 0) {
        const double span = t_grid[ti] - t_grid[ti - 1];
        const auto steps = static_cast<Index>(std::max(1.0, std::ceil(span / u.dt() - 1e-9)));
        const double step = span / static_cast<double>(steps);
        for (Index s = 0; s < steps; ++s) tr.advance(t_grid[ti - 1] + static_cast<double>(s) * step, step);
      }
      for (std::size_t o = 0; o < no; ++o) out[o * nt + ti] = expectation(observables[o].op, tr.state()).real();
    }
    if (opts.record_jumps) jump_log[static_cast<std::size_t>(traj)] = std::move(tr.jump_times());
  });

  TrajectorySeries s;
  s.times.assign(t_grid.begin(), t_grid.end());
  for (const Observable& o : observables) s.names.push_back(o.name);
  s.mean.assign(no, std::vector<double>(nt, 0.0));
  s.standard_error.assign(no, std::vector<double>(nt, 0.0));
  s.n_traj = n_traj;
  s.seed = seed;
  s.dt = u.dt();
  s.jump_log = std::move(jump_log);
  const auto n = static_cast<double>(n_traj);
  for (std::size_t o = 0; o < no; ++o)
    for (std::size_t ti = 0; ti < nt; ++ti) {
      NeumaierSum sum;
      for (const auto& v : values) sum.add(v[o * nt + ti]);
      const double mean = sum.value() / n;
      s.mean[o][ti] = mean;
      if (n_traj > 1) {
        NeumaierSum sq;
        for (const auto& v : values) {
          const double dv = v[o * nt + ti] - mean;
          sq.add(dv * dv);
        }
        s.standard_error[o][ti] = std::sqrt(sq.value() / (n - 1.0) / n);
      }
    }
  return s;
}

}  // namespace srad

#include "srad/spin_chains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "srad/csv.hpp"

namespace srad {

using std::numbers::pi;

std::string_view to_string(ChainKind kind) {
  return kind == ChainKind::Ising ? "Ising" : "XX";
}

ChainKind chain_kind_from_string(std::string_view name) {
  if (name == "Ising") return ChainKind::Ising;
  if (name == "XX") return ChainKind::XX;
  throw ValidationError("chain.kind: unknown chain '" + std::string(name) + "' (expected Ising or XX)");
}

void ChainSpec::validate() const {
  if (!std::isfinite(g)) throw ValidationError("chain.g: must be finite");
  if (sites == 1 || sites < 0) throw ValidationError("chain.N: must be >= 2");
}

nlohmann::json chain_to_json(const ChainSpec& spec) {
  nlohmann::json j = {{"kind", std::string(to_string(spec.kind))}, {"g", spec.g}};
  if (spec.infinite())
    j["infinite"] = true;
  else
    j["N"] = spec.sites;
  return j;
}

ChainSpec chain_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("chain: expected an object");
  static const std::set<std::string> known = {"kind", "g", "N", "infinite"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ValidationError("chain." + it.key() + ": unknown field");
  ChainSpec spec;
  auto kind = j.find("kind");
  if (kind == j.end()) throw ValidationError("chain.kind: missing");
  if (!kind->is_string()) throw ValidationError("chain.kind: expected a string");
  spec.kind = chain_kind_from_string(kind->get<std::string>());
  if (auto g = j.find("g"); g != j.end()) {
    if (!g->is_number()) throw ValidationError("chain.g: expected a number");
    spec.g = g->get<double>();
  }
  const bool infinite = j.contains("infinite") && j["infinite"].is_boolean() && j["infinite"].get<bool>();
  if (j.contains("infinite") && !j["infinite"].is_boolean())
    throw ValidationError("chain.infinite: expected a boolean");
  if (auto n = j.find("N"); n != j.end()) {
    if (infinite) throw ValidationError("chain.N: conflicts with infinite = true");
    if (!n->is_number_integer()) throw ValidationError("chain.N: expected an integer");
    spec.sites = n->get<Index>();
    if (spec.sites < 2) throw ValidationError("chain.N: must be >= 2");
  } else if (!infinite) {
    throw ValidationError("chain.N: missing (or set infinite = true)");
  }
  spec.validate();
  return spec;
}

double ising_dispersion(double g, double k) {
  return 2.0 * std::sqrt(std::max(0.0, 1.0 + g * g - 2.0 * g * std::cos(k)));
}

double ising_dispersion_scaled(double g, double k) {
  if (g == 0.0) throw ValidationError("g: the scaled dispersion divides by g");
  return 2.0 * std::sqrt(std::max(0.0, 1.0 + 1.0 / (g * g) - 2.0 * std::cos(k) / g));
}

IsingGap ising_gap(double g) {
  return {2.0 * std::abs(1.0 - g), g == 0.0 ? std::numeric_limits<double>::quiet_NaN() : 2.0 * std::abs(1.0 - 1.0 / g)};
}

namespace {

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> kronrod15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7], g = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double s = f(c - x) + f(c + x);
    k += kWgk[i] * s;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  return {k * h, std::abs((k - g) * h)};
}

template <class F>
double adaptive_integral(F&& f, double a, double b, double tol, int depth = 0) {
  const auto [value, err] = kronrod15(f, a, b);
  if (err <= tol) return value;
  if (depth > 50) throw NumericalError("quadrature: no convergence");
  const double m = 0.5 * (a + b);
  return adaptive_integral(f, a, m, 0.5 * tol, depth + 1) + adaptive_integral(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

double ising_ground_energy(double g, Index sites) {
  if (!(g >= 0)) throw ValidationError("g: must be >= 0");
  if (sites == 1 || sites < 0) throw ValidationError("N: must be >= 2");
  if (sites == 0) {
    // The integrand is even in k; its only kink (g = 1) sits at k = 0.
    const auto f = [g](double k) { return ising_dispersion(g, k); };
    return -adaptive_integral(f, 0.0, pi, 1e-12) / (2.0 * pi);
  }
  double sum = 0.0;
  for (Index n = 0; n < sites; ++n)
    sum += ising_dispersion(g, pi * static_cast<double>(2 * n + 1) / static_cast<double>(sites));
  return -0.5 * sum / static_cast<double>(sites);
}

double xx_dispersion(double g, double k) { return -2.0 * g * std::cos(k) - 1.0; }

namespace {

std::vector<double> full_zone(Index sites) {
  std::vector<double> k;
  for (Index n = 1; n <= sites; ++n) k.push_back(-pi + 2.0 * pi * static_cast<double>(n) / static_cast<double>(sites));
  return k;
}

std::vector<double> antiperiodic_zone(Index sites) {
  std::vector<double> k;
  for (Index n = 0; n < sites; ++n) k.push_back(-pi + pi * static_cast<double>(2 * n + 1) / static_cast<double>(sites));
  return k;
}

}  // namespace

XXGround xx_ground(double g, Index sites) {
  if (sites == 1 || sites < 0) throw ValidationError("N: must be >= 2");
  XXGround out{};
  if (sites == 0) {
    // Occupied modes satisfy cos k > -1/(2g); the integral is elementary.
    double kf = pi;
    if (std::abs(g) > 0.5) kf = std::acos(-1.0 / (2.0 * std::abs(g)));
    out.fermion_energy = (-4.0 * std::abs(g) * std::sin(kf) - 2.0 * kf) / (2.0 * pi);
    out.spin_energy = std::numeric_limits<double>::quiet_NaN();
    out.particles = 0;
    return out;
  }
  for (double k : full_zone(sites)) {
    const double e = xx_dispersion(g, k);
    if (e < 0) {
      out.fermion_energy += e;
      ++out.particles;
    }
  }
  out.spin_energy = static_cast<double>(sites) + 2.0 * out.fermion_energy;
  return out;
}

CrossingList xx_crossings(Index sites) {
  if (sites < 2 || sites % 2 != 0) throw ValidationError("N: must be even and >= 2");
  CrossingList out;
  for (double k : full_zone(sites)) {
    const double c = std::cos(k);
    if (!(k > 0) || c >= -1e-15) continue;
    const double gs = -1.0 / (2.0 * c);
    Index mult = 0;
    for (double q : full_zone(sites))
      if (std::abs(std::cos(q) - c) < 1e-12) ++mult;
    out.push_back({gs, k, -mult});
  }
  std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.g_star < b.g_star; });
  return out;
}

CrossingList xx_parity_crossings(Index sites) {
  if (sites < 2) throw ValidationError("N: must be >= 2");
  // E_M(g) = N - 2M - 4 g C_M with C_M the sum of the M largest cos k in the
  // grid that matches the parity of M.
  const auto n = static_cast<std::size_t>(sites);
  std::vector<double> a(n + 1), b(n + 1);
  std::vector<double> last_k(n + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m <= n; ++m) {
    std::vector<double> ks = (m % 2 == 1) ? full_zone(sites) : antiperiodic_zone(sites);
    std::stable_sort(ks.begin(), ks.end(), [](double x, double y) { return std::cos(x) > std::cos(y); });
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c += std::cos(ks[i]);
    if (m > 0) last_k[m] = std::abs(ks[m - 1]);
    a[m] = static_cast<double>(sites) - 2.0 * static_cast<double>(m);
    b[m] = 4.0 * c;
  }
  CrossingList out;
  std::size_t cur = n;  // g -> 0+: all spins up
  for (std::size_t m = 0; m <= n; ++m)
    if (a[m] < a[cur] || (a[m] == a[cur] && b[m] > b[cur])) cur = m;
  double g = 0.0;
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t next = cur;
    for (std::size_t m = 0; m <= n; ++m) {
      if (b[m] <= b[cur] + 1e-12) continue;
      const double gx = (a[m] - a[cur]) / (b[m] - b[cur]);
      if (gx > g + 1e-12 && (gx < best - 1e-12 || (std::abs(gx - best) <= 1e-12 && b[m] > b[next]))) {
        best = gx;
        next = m;
      }
    }
    if (next == cur) break;
    out.push_back({best, last_k[cur], static_cast<Index>(next) - static_cast<Index>(cur)});
    g = best;
    cur = next;
  }
  return out;
}

std::vector<LmgLevel> lmg_spectrum(double Omega, double lambda, double S) {
  const double two_s = 2.0 * S;
  if (!(S > 0) || std::abs(two_s - std::round(two_s)) > 1e-12) throw ValidationError("S: must be a positive multiple of 1/2");
  const auto count = static_cast<Index>(std::round(two_s)) + 1;
  std::vector<LmgLevel> out;
  for (Index i = 0; i < count; ++i) {
    const double m = -S + static_cast<double>(i);
    out.push_back({m, 0.5 * Omega * m + (lambda / S) * (S * (S + 1.0) - m * m)});
  }
  return out;
}

LmgGround lmg_ground(double Omega, double lambda, double S) {
  const auto levels = lmg_spectrum(Omega, lambda, S);
  LmgGround best{levels.front().m, levels.front().energy, false};
  const double scale = std::abs(Omega) * S + std::abs(lambda) * (S + 1.0) + 1e-300;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double diff = levels[i].energy - best.energy;
    if (std::abs(diff) <= 1e-13 * scale)
      best.degenerate = true;
    else if (diff < 0)
      best = {levels[i].m, levels[i].energy, false};
  }
  return best;
}

void write_chain_scan_csv(std::ostream& os, const std::vector<double>& g,
                          const std::vector<std::pair<std::string, std::vector<double>>>& quantities) {
  CsvWriter w(os);
  w.cell("g").cell("quantity").cell("value");
  w.end_row();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const auto& [name, values] : quantities) {
      w.cell(g[i]).cell(name).cell(values.at(i));
      w.end_row();
    }
}

void write_crossings_csv(std::ostream& os, const CrossingList& crossings) {
  CsvWriter w(os);
  w.cell("g_star").cell("k").cell("delta_n");
  w.end_row();
  for (const Crossing& c : crossings) {
    w.cell(c.g_star).cell(c.k).cell(static_cast<long long>(c.delta_n));
    w.end_row();
  }
}

}  // namespace srad

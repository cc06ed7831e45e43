#include "srad/workbench.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "srad/csv.hpp"
#include "srad/model_json.hpp"
#include "srad/open_systems.hpp"
#include "srad/parallel.hpp"
#include "srad/semiclassics.hpp"
#include "srad/spectra.hpp"

namespace srad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 8> kCommands{{
    {Command::Spectrum, "spectrum"},
    {Command::Derivatives, "derivatives"},
    {Command::Meanfield, "meanfield"},
    {Command::Bifurcation, "bifurcation"},
    {Command::Trajectory, "trajectory"},
    {Command::Steadystate, "steadystate"},
    {Command::Chain, "chain"},
    {Command::Fit, "fit"},
}};

bool needs_grid(Command c) { return c != Command::Trajectory && c != Command::Steadystate; }

bool is_chain_kind(const json& model) {
  auto k = model.find("kind");
  return k != model.end() && k->is_string() && (k->get<std::string>() == "Ising" || k->get<std::string>() == "XX");
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ValidationError(where + it.key() + ": unknown field");
}

double read_number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + key + ": expected a number");
  return v.get<double>();
}

Index read_count(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + key + ": expected an integer");
  return v.get<Index>();
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

Command command_from_string(std::string_view name) {
  for (const auto& [cmd, n] : kCommands)
    if (n == name) return cmd;
  throw ValidationError("command: unknown command '" + std::string(name) + "'");
}

std::vector<double> Grid::values() const {
  std::vector<double> out;
  for (Index i = 0; i < points; ++i)
    out.push_back(points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  if (points > 1) out.back() = hi;
  return out;
}

json ExperimentConfig::to_json() const {
  json j;
  j["command"] = std::string(srad::to_string(command));
  if (model) j["model"] = model_to_json(*model);
  if (chain) j["model"] = chain_to_json(*chain);
  if (grid) j["grid"] = {{"lo", grid->lo}, {"hi", grid->hi}, {"points", grid->points}};
  json r = {{"n_traj", run.n_traj},       {"t_max", run.t_max},   {"dt", run.dt},
            {"time_points", run.time_points}, {"levels", run.levels}, {"dephasing", run.dephasing},
            {"control", run.control},     {"threads", run.threads}};
  if (run.seed) r["seed"] = *run.seed;
  if (run.window.first < run.window.second) r["window"] = {run.window.first, run.window.second};
  j["run"] = r;
  if (!output.empty()) j["output"] = output;
  return j;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
  reject_unknown(doc, "", {"command", "model", "grid", "run", "output"});
  ExperimentConfig cfg;
  if (!doc.contains("command")) throw ValidationError("command: missing");
  if (!doc["command"].is_string()) throw ValidationError("command: expected a string");
  cfg.command = command_from_string(doc["command"].get<std::string>());

  if (!doc.contains("model")) throw ValidationError("model: missing");
  const json& model = doc["model"];
  if (!model.is_object()) throw ValidationError("model: expected an object");
  if (is_chain_kind(model)) {
    if (cfg.command != Command::Chain) throw ValidationError("model.kind: spin chains are only valid for 'chain'");
    json chain = model;
    try {
      cfg.chain = chain_from_json(chain);
    } catch (const ValidationError& e) {
      std::string msg = e.what();
      if (msg.rfind("chain.", 0) == 0) msg = "model." + msg.substr(6);
      throw ValidationError(msg);
    }
  } else {
    if (cfg.command == Command::Chain) throw ValidationError("model.kind: 'chain' needs kind Ising or XX");
    cfg.model = model_from_json(model);
    cfg.model->validate(false);
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) throw ValidationError("grid: expected an object");
    reject_unknown(g, "grid.", {"lo", "hi", "points"});
    for (const char* key : {"lo", "hi", "points"})
      if (!g.contains(key)) throw ValidationError(std::string("grid.") + key + ": missing");
    Grid grid{read_number(g, "lo", "grid."), read_number(g, "hi", "grid."), read_count(g, "points", "grid.")};
    if (grid.points < 2) throw ValidationError("grid.points: must be >= 2");
    if (!(grid.lo < grid.hi)) throw ValidationError("grid.hi: must exceed grid.lo");
    cfg.grid = grid;
  } else if (needs_grid(cfg.command)) {
    throw ValidationError("grid: required for '" + std::string(srad::to_string(cfg.command)) + "'");
  }

  if (doc.contains("run")) {
    const json& r = doc["run"];
    if (!r.is_object()) throw ValidationError("run: expected an object");
    reject_unknown(r, "run.", {"seed", "n_traj", "t_max", "dt", "time_points", "levels", "dephasing", "window",
                               "control", "threads"});
    if (r.contains("seed")) {
      if (!r["seed"].is_number_unsigned() && !(r["seed"].is_number_integer() && r["seed"].get<long long>() >= 0))
        throw ValidationError("run.seed: expected a non-negative integer");
      cfg.run.seed = r["seed"].get<std::uint64_t>();
    }
    if (r.contains("n_traj")) cfg.run.n_traj = read_count(r, "n_traj", "run.");
    if (r.contains("t_max")) cfg.run.t_max = read_number(r, "t_max", "run.");
    if (r.contains("dt")) cfg.run.dt = read_number(r, "dt", "run.");
    if (r.contains("time_points")) cfg.run.time_points = read_count(r, "time_points", "run.");
    if (r.contains("levels")) cfg.run.levels = read_count(r, "levels", "run.");
    if (r.contains("dephasing")) cfg.run.dephasing = read_number(r, "dephasing", "run.");
    if (r.contains("threads")) {
      const Index t = read_count(r, "threads", "run.");
      if (t < 0) throw ValidationError("run.threads: must be >= 0");
      cfg.run.threads = static_cast<unsigned>(t);
    }
    if (r.contains("control")) {
      if (!r["control"].is_string()) throw ValidationError("run.control: expected a string");
      cfg.run.control = r["control"].get<std::string>();
    }
    if (r.contains("window")) {
      const json& w = r["window"];
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
        throw ValidationError("run.window: expected [lo, hi]");
      cfg.run.window = {w[0].get<double>(), w[1].get<double>()};
    }
  }
  if (cfg.run.n_traj < 1) throw ValidationError("run.n_traj: must be >= 1");
  if (!(cfg.run.t_max > 0)) throw ValidationError("run.t_max: must be > 0");
  if (cfg.run.dt < 0) throw ValidationError("run.dt: must be >= 0");
  if (cfg.run.time_points < 2) throw ValidationError("run.time_points: must be >= 2");
  if (cfg.run.levels < 1) throw ValidationError("run.levels: must be >= 1");
  if (cfg.run.dephasing < 0) throw ValidationError("run.dephasing: must be >= 0");
  if (cfg.run.control != "g" && cfg.run.control != "g4") throw ValidationError("run.control: expected \"g\" or \"g4\"");
  if (cfg.command == Command::Trajectory && !cfg.run.seed)
    throw ValidationError("run.seed: required for trajectory runs");
  if (cfg.command == Command::Fit && !(cfg.run.window.first < cfg.run.window.second))
    throw ValidationError("run.window: required for fit, with lo < hi");
  if ((cfg.command == Command::Trajectory || cfg.command == Command::Steadystate) && cfg.model &&
      !cfg.model->has_boson())
    throw ValidationError("model.kind: open dynamics needs a cavity mode");
  if ((cfg.command == Command::Trajectory) && cfg.model && !(cfg.model->kappa > 0))
    throw ValidationError("model.kappa: trajectory runs need kappa > 0");

  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ValidationError("output: expected a string");
    cfg.output = doc["output"].get<std::string>();
  }
  return cfg;
}

namespace {

double max_coupling(const ExperimentConfig& cfg) {
  return cfg.grid ? std::max(std::abs(cfg.grid->lo), std::abs(cfg.grid->hi)) : std::abs(cfg.model->coupling());
}

}  // namespace

ValidationReport validate_config(const json& doc) {
  const ExperimentConfig cfg = parse_config(doc);
  ValidationReport report;
  ExperimentConfig resolved = cfg;
  if (cfg.model && cfg.model->has_boson()) {
    const double gmax = max_coupling(cfg);
    const Index heuristic = heuristic_cutoff(*cfg.model, gmax);
    if (cfg.model->boson_cutoff != 0 && cfg.model->boson_cutoff < heuristic) {
      std::ostringstream os;
      os << "model.boson_cutoff: " << cfg.model->boson_cutoff << " is below the heuristic " << heuristic
         << " for couplings up to " << gmax;
      report.warnings.push_back(os.str());
    }
    resolved.model = resolve_cutoff(*cfg.model, gmax);
  }
  report.resolved = resolved.to_json();
  return report;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericalError("sha256: digest initialization failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  template <class F>
  void write(const std::string& name, F&& body) {
    const fs::path p = dir_ / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("output: cannot write " + p.string());
    body(os);
    os.close();
    if (!os) throw ValidationError("output: write failed for " + p.string());
    files_.push_back(p);
  }

  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

// Runs body with the cutoff resolved from the heuristic. A defaulted cutoff
// is raised by half on truncation failures, up to four times; a cutoff the
// user chose is kept and the failure propagates.
template <class F>
void with_cutoff(ModelSpec& spec, double g_max, F&& body) {
  const bool automatic = spec.has_boson() && spec.boson_cutoff == 0;
  spec = resolve_cutoff(spec, g_max);
  for (int attempt = 0;; ++attempt) {
    try {
      body(static_cast<const ModelSpec&>(spec));
      return;
    } catch (const TruncationError&) {
      if (!automatic || attempt >= 4) throw;
      spec.boson_cutoff = static_cast<Index>(std::ceil(1.5 * static_cast<double>(spec.boson_cutoff)));
    }
  }
}

void write_long_csv(std::ostream& os, const std::vector<double>& g,
                    const std::vector<std::pair<std::string, std::vector<double>>>& quantities) {
  write_chain_scan_csv(os, g, quantities);
}

QuantumOperator field_operator(const ModelSpec& spec, const QuantumOperator& field_only) {
  return tensor(field_only, QuantumOperator::identity(1, spec.spin_dim()));
}

QuantumOperator spin_operator(const ModelSpec& spec, const QuantumOperator& spin_only) {
  return tensor(QuantumOperator::identity(spec.boson_dim(), 1), spin_only);
}

QuantumOperator spin_z(const ModelSpec& spec) {
  return spin_operator(spec, collective_spin(static_cast<int>(spec.spin_dim() - 1)).jz);
}

Eigen::VectorXcd ground_vector(const ModelSpec& spec) {
  const LabelledSpectrum ls = solve_sectors(spec, 1, true);
  Eigen::VectorXcd v = ls.vectors.col(0);
  check_truncation(spec, ls.vectors);
  return v;
}

json run_spectrum(const ExperimentConfig& cfg, ArtifactWriter& out, ModelSpec& spec) {
  const std::vector<double> grid = cfg.grid->values();
  SpectrumScan scan;
  with_cutoff(spec, max_coupling(cfg), [&](const ModelSpec& s) {
    scan = spectrum_scan(s, grid, cfg.run.levels, true, cfg.run.threads);
  });
  out.write("spectrum.csv", [&](std::ostream& os) { write_scan_csv(os, scan); });
  return {{"levels", scan.k_levels()}, {"points", grid.size()}};
}

json run_derivatives(const ExperimentConfig& cfg, ArtifactWriter& out, ModelSpec& spec) {
  const std::vector<double> grid = cfg.grid->values();
  SpectrumScan scan;
  with_cutoff(spec, max_coupling(cfg), [&](const ModelSpec& s) {
    scan = spectrum_scan(s, grid, 1, false, cfg.run.threads);
  });
  const DerivativeTable d = ground_derivatives(scan);
  std::vector<double> e0;
  for (const auto& l : scan.levels) e0.push_back(l.front());
  out.write("derivatives.csv", [&](std::ostream& os) {
    write_long_csv(os, d.g, {{"E0", e0}, {"dE0", d.first}, {"d2E0", d.second}});
  });
  return {{"points", grid.size()}};
}

json run_meanfield(const ExperimentConfig& cfg, ArtifactWriter& out, const ModelSpec& spec) {
  const std::vector<double> grid = cfg.grid->values();
  std::vector<OrderParameter> ops(grid.size());
  parallel_for(static_cast<Index>(grid.size()), cfg.run.threads, [&](Index i) {
    ops[static_cast<std::size_t>(i)] = mf_order_parameter(spec.with_coupling(grid[static_cast<std::size_t>(i)]));
  });
  std::vector<std::pair<std::string, std::vector<double>>> q = {
      {"x", {}}, {"p", {}}, {"alpha_re", {}}, {"alpha_im", {}}, {"photon_number", {}}, {"inversion", {}}, {"energy", {}}};
  for (const OrderParameter& o : ops) {
    q[0].second.push_back(o.x);
    q[1].second.push_back(o.p);
    q[2].second.push_back(o.alpha.real());
    q[3].second.push_back(o.alpha.imag());
    q[4].second.push_back(o.photon_number);
    q[5].second.push_back(o.inversion);
    q[6].second.push_back(o.energy);
  }
  out.write("meanfield.csv", [&](std::ostream& os) { write_long_csv(os, grid, q); });
  return {{"critical_coupling", convention_ledger(spec).critical_coupling}};
}

json run_bifurcation(const ExperimentConfig& cfg, ArtifactWriter& out, const ModelSpec& spec) {
  const std::vector<double> grid = cfg.grid->values();
  const auto rows = bifurcation_scan(spec, grid, spec.kappa, cfg.run.threads);
  out.write("branches.csv", [&](std::ostream& os) { write_branch_csv(os, rows); });
  json r;
  const auto first = first_nontrivial_coupling(rows);
  r["first_nontrivial_coupling"] = first ? json(*first) : json(nullptr);
  const auto gc = critical_coupling(spec, spec.kappa);
  r["predicted_critical_coupling"] = gc ? json(*gc) : json(nullptr);
  return r;
}

json run_trajectory(const ExperimentConfig& cfg, ArtifactWriter& out, ModelSpec& spec) {
  TrajectorySeries series;
  with_cutoff(spec, std::abs(spec.g), [&](const ModelSpec& s) {
    const QuantumOperator h = build_hamiltonian(s);
    const Eigen::VectorXcd psi0 = ground_vector(s);
    const LadderOperators lad = ladder_operators(s.boson_dim());
    const std::vector<JumpOperator> jumps = {{field_operator(s, lad.annihilator), s.kappa}};
    const std::vector<Observable> obs = {{"n", field_operator(s, lad.number)}, {"Jz", spin_z(s)}};
    std::vector<double> times;
    for (Index i = 0; i < cfg.run.time_points; ++i)
      times.push_back(cfg.run.t_max * static_cast<double>(i) / static_cast<double>(cfg.run.time_points - 1));
    McwfOptions opts;
    opts.dt = cfg.run.dt;
    opts.threads = cfg.run.threads;
    series = mcwf_ensemble(h, jumps, psi0, times, cfg.run.n_traj, *cfg.run.seed, obs, opts);
  });
  out.write("trajectory.csv", [&](std::ostream& os) { write_series_csv(os, series); });
  return {{"seed", series.seed}, {"n_traj", series.n_traj}, {"dt", series.dt}};
}

json run_steadystate(const ExperimentConfig& cfg, ArtifactWriter& out, ModelSpec& spec) {
  json r;
  std::vector<std::pair<std::string, std::vector<double>>> q;
  with_cutoff(spec, std::abs(spec.g), [&](const ModelSpec& s) {
    const QuantumOperator h = build_hamiltonian(s);
    const LadderOperators lad = ladder_operators(s.boson_dim());
    std::vector<JumpOperator> jumps;
    if (s.kappa > 0) jumps.push_back({field_operator(s, lad.annihilator), s.kappa});
    if (cfg.run.dephasing > 0) jumps.push_back({2.0 * spin_z(s), cfg.run.dephasing});
    if (jumps.empty()) throw ValidationError("model.kappa: steadystate needs kappa > 0 or run.dephasing > 0");
    const SteadyState ss = steady_state(h, jumps);
    r = json::object();
    q.clear();
    r["kernel_dimension"] = ss.kernel_dimension ? json(*ss.kernel_dimension) : json(nullptr);
    q.push_back({"kernel_dimension", {ss.kernel_dimension ? static_cast<double>(*ss.kernel_dimension)
                                                           : std::numeric_limits<double>::quiet_NaN()}});
    if (ss.state) {
      const Index ns = s.spin_dim();
      double top = 0.0;
      for (Index sp = 0; sp < ns; ++sp) top += ss.state->matrix()((s.boson_dim() - 1) * ns + sp, (s.boson_dim() - 1) * ns + sp).real();
      if (top > kTruncationThreshold)
        throw TruncationError("steady state populates the top Fock level", s.g, top);
      Eigen::VectorXcd vacuum = Eigen::VectorXcd::Zero(s.dim());
      vacuum(0) = 1.0;
      const double fid = ss.state->fidelity(vacuum);
      const double n = ss.state->expectation(field_operator(s, lad.number));
      r["fidelity_with_vacuum"] = fid;
      r["photon_number"] = n;
      q.push_back({"fidelity_with_vacuum", {fid}});
      q.push_back({"photon_number", {n}});
    }
  });
  out.write("steadystate.csv", [&](std::ostream& os) { write_long_csv(os, {spec.g}, q); });
  return r;
}

json run_chain(const ExperimentConfig& cfg, ArtifactWriter& out) {
  const ChainSpec& chain = *cfg.chain;
  const std::vector<double> grid = cfg.grid->values();
  std::vector<std::pair<std::string, std::vector<double>>> q;
  if (chain.kind == ChainKind::Ising) {
    q = {{"ground_energy", {}}, {"gap", {}}, {"gap_scaled", {}}};
    for (double g : grid) {
      q[0].second.push_back(ising_ground_energy(g, chain.sites));
      const IsingGap gap = ising_gap(g);
      q[1].second.push_back(gap.hamiltonian);
      q[2].second.push_back(gap.scaled);
    }
  } else {
    q = {{"fermion_energy", {}}, {"spin_energy", {}}, {"particles", {}}};
    for (double g : grid) {
      const XXGround xg = xx_ground(g, chain.sites);
      q[0].second.push_back(xg.fermion_energy);
      q[1].second.push_back(xg.spin_energy);
      q[2].second.push_back(chain.infinite() ? std::numeric_limits<double>::quiet_NaN()
                                             : static_cast<double>(xg.particles));
    }
  }
  out.write("chain.csv", [&](std::ostream& os) { write_chain_scan_csv(os, grid, q); });
  json r = json::object();
  if (chain.kind == ChainKind::XX && !chain.infinite() && chain.sites % 2 == 0) {
    const CrossingList grid_crossings = xx_crossings(chain.sites);
    const CrossingList parity = xx_parity_crossings(chain.sites);
    out.write("crossings.csv", [&](std::ostream& os) { write_crossings_csv(os, grid_crossings); });
    out.write("parity_crossings.csv", [&](std::ostream& os) { write_crossings_csv(os, parity); });
    r["crossings"] = grid_crossings.size();
  }
  return r;
}

json run_fit(const ExperimentConfig& cfg, ArtifactWriter& out, ModelSpec& spec) {
  const double gc = convention_ledger(spec).critical_coupling;
  std::vector<double> grid;
  for (double g : cfg.grid->values())
    if (g > gc) grid.push_back(g);
  if (grid.empty()) throw ValidationError("grid: no coupling above the critical value " + format_number(gc));
  std::vector<double> photons(grid.size());
  with_cutoff(spec, max_coupling(cfg), [&](const ModelSpec& s) {
    const QuantumOperator number = field_operator(s, ladder_operators(s.boson_dim()).number);
    parallel_for(static_cast<Index>(grid.size()), cfg.run.threads, [&](Index i) {
      const ModelSpec at = s.with_coupling(grid[static_cast<std::size_t>(i)]);
      photons[static_cast<std::size_t>(i)] = expectation(number, ground_vector(at)).real();
    });
  });
  std::vector<double> control;
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = cfg.run.control == "g4" ? std::pow(grid[i], 4) - std::pow(gc, 4) : grid[i] - gc;
    control.push_back(x);
    samples.emplace_back(x, photons[i]);
  }
  const FitResult fit = fit_power_law(samples, cfg.run.window);
  out.write("fit_samples.csv", [&](std::ostream& os) {
    write_long_csv(os, grid, {{"control", control}, {"photon_number", photons}});
  });
  const json fj = fit_to_json(fit);
  out.write("fit.json", [&](std::ostream& os) { os << fj.dump(2) << '\n'; });
  return fj;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const fs::path& output_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw ValidationError("output: cannot create " + output_dir.string() + ": " + ec.message());
  ArtifactWriter out(output_dir);

  ExperimentConfig resolved = config;
  json results;
  switch (config.command) {
    case Command::Spectrum: results = run_spectrum(config, out, *resolved.model); break;
    case Command::Derivatives: results = run_derivatives(config, out, *resolved.model); break;
    case Command::Meanfield: results = run_meanfield(config, out, *resolved.model); break;
    case Command::Bifurcation: results = run_bifurcation(config, out, *resolved.model); break;
    case Command::Trajectory: results = run_trajectory(config, out, *resolved.model); break;
    case Command::Steadystate: results = run_steadystate(config, out, *resolved.model); break;
    case Command::Chain: results = run_chain(config, out); break;
    case Command::Fit: results = run_fit(config, out, *resolved.model); break;
  }

  RunResult rr;
  rr.output_dir = output_dir;
  rr.artifacts = out.files();
  json artifacts = json::array();
  for (const fs::path& p : out.files())
    artifacts.push_back({{"file", p.filename().string()}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rr.manifest = {{"tool", "sradbench"},         {"version", std::string(kToolVersion)},
                 {"command", std::string(to_string(config.command))},
                 {"config", resolved.to_json()}, {"artifacts", artifacts},
                 {"results", results},           {"wall_clock_seconds", wall}};
  const fs::path mpath = output_dir / "manifest.json";
  std::ofstream ms(mpath, std::ios::binary | std::ios::trunc);
  if (!ms) throw ValidationError("output: cannot write " + mpath.string());
  ms << rr.manifest.dump(2) << '\n';
  return rr;
}

}  // namespace srad

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srad/models.hpp"
#include "srad/spin_chains.hpp"

namespace srad {

enum class Command { Spectrum, Derivatives, Meanfield, Bifurcation, Trajectory, Steadystate, Chain, Fit };

std::string_view to_string(Command c);
Command command_from_string(std::string_view name);

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  Index points = 0;

  std::vector<double> values() const;
};

struct RunSettings {
  std::optional<std::uint64_t> seed;
  Index n_traj = 100;
  double t_max = 10.0;
  double dt = 0.0;           // 0: solver default
  Index time_points = 101;   // output times on [0, t_max]
  Index levels = 20;         // levels per coupling for spectrum scans
  double dephasing = 0.0;    // rate of an extra 2 Jz jump for steadystate
  std::pair<double, double> window{0.0, 0.0};  // fit window on the control variable
  std::string control = "g";  // fit control: "g" (g - g_c) or "g4" (g^4 - g_c^4)
  unsigned threads = 0;
};

/// A parsed experiment. Exactly one of model / chain is set; which one is
/// decided by model.kind.
struct ExperimentConfig {
  Command command = Command::Spectrum;
  std::optional<ModelSpec> model;
  std::optional<ChainSpec> chain;
  std::optional<Grid> grid;
  RunSettings run;
  std::string output;

  nlohmann::json to_json() const;
};

/// Schema validation; throws ValidationError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);

struct ValidationReport {
  std::vector<std::string> warnings;
  nlohmann::json resolved;
};

/// Parses and applies physics checks (cutoff against the heuristic over the
/// requested coupling range) without running anything.
ValidationReport validate_config(const nlohmann::json& doc);

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> artifacts;
  nlohmann::json manifest;
};

/// Dispatches the command, writes CSV/JSON artifacts and manifest.json into
/// output_dir. Exceptions propagate: ValidationError for configuration
/// problems, NumericalError for solver failures.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace srad

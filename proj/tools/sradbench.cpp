#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "srad/workbench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

json load_config(const Flags& flags, const std::string& command) {
  std::ifstream in(flags.config);
  if (!in) throw srad::ValidationError("config: cannot read " + flags.config);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw srad::ValidationError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw srad::ValidationError("config: expected a JSON object");
  if (!command.empty()) {
    if (doc.contains("command") && doc["command"].is_string() && doc["command"].get<std::string>() != command)
      throw srad::ValidationError("command: config says '" + doc["command"].get<std::string>() +
                                  "' but the subcommand is '" + command + "'");
    doc["command"] = command;
  }
  if (flags.seed) doc["run"]["seed"] = *flags.seed;
  if (flags.threads) doc["run"]["threads"] = *flags.threads;
  return doc;
}

fs::path output_dir(const Flags& flags, const srad::ExperimentConfig& cfg) {
  if (!flags.output.empty()) return flags.output;
  if (!cfg.output.empty()) return cfg.output;
  if (const char* env = std::getenv("SRAD_OUTPUT_DIR"); env && *env) return env;
  return "srad-output";
}

int run_command(const Flags& flags, const std::string& command) {
  try {
    const srad::ExperimentConfig cfg = srad::parse_config(load_config(flags, command));
    const fs::path dir = output_dir(flags, cfg);
    const srad::RunResult rr = srad::run_experiment(cfg, dir);
    for (const fs::path& p : rr.artifacts) std::cout << "wrote " << p.string() << '\n';
    std::cout << "wrote " << (dir / "manifest.json").string() << '\n';
    return srad::kExitOk;
  } catch (const srad::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return srad::kExitConfig;
  } catch (const srad::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return srad::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return srad::kExitNumerical;
  }
}

int run_validate(const Flags& flags) {
  try {
    const srad::ValidationReport report = srad::validate_config(load_config(flags, ""));
    for (const std::string& w : report.warnings) std::cout << "warning: " << w << '\n';
    std::cout << "ok\n" << report.resolved.dump(2) << '\n';
    return srad::kExitOk;
  } catch (const srad::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return srad::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return srad::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-matter phase transition workbench"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;

  auto add_common = [&](CLI::App* sub, bool run_flags) {
    sub->add_option("--config", flags.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    if (!run_flags) return;
    sub->add_option("--output", flags.output, "Output directory (default: $SRAD_OUTPUT_DIR or ./srad-output)");
    sub->add_option("--seed", flags.seed, "Override run.seed");
    sub->add_option("--threads", flags.threads, "Cap on worker threads (0 = all cores)");
  };
  for (const char* name :
       {"spectrum", "derivatives", "meanfield", "bifurcation", "trajectory", "steadystate", "chain", "fit"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    add_common(sub, true);
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI::App* val = app.add_subcommand("validate", "Check a config without running it");
  add_common(val, false);
  val->callback([&chosen] { chosen = "validate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : srad::kExitConfig;
  }
  if (chosen == "validate") return run_validate(flags);
  return run_command(flags, chosen);
}

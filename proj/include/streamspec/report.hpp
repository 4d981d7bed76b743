#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamspec/phase.hpp"

namespace streamspec {

/// Everything a run needs. A fixed seed makes every output deterministic.
struct RunConfig {
  nlohmann::json problem = {{"builtin", "rotation"}};
  std::uint64_t seed = 1;
  int samples = 200;
  double horizon = 40.0;
  double t_max = 10.0;
  int t_steps = 20;
  long k_max = 5;
  /// Time at which semigroup spectra are reported.
  double t_eval = 1.0;
  /// Draw growth samples with probability ∝ τ₋ instead of uniformly.
  bool deep_sampling = false;
  std::filesystem::path out_dir = "out";
  ClassificationConfig classification{};
  FlowOptions flow{};

  /// Canonical JSON form (without out_dir), used for hashing.
  nlohmann::json to_json() const;
};

/// Parse a config object. Unknown keys and ill-typed values raise
/// ConfigError naming the key.
RunConfig parse_run_config(const nlohmann::json& j);
/// Read and parse a JSON file. Syntax errors are reported with line and
/// column.
RunConfig load_run_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical config dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Outputs of one subcommand: named text files plus the main JSON body.
struct CommandOutput {
  nlohmann::json report;
  std::map<std::string, std::string> files;
  /// Process exit status (0 ok, 1 verification failure).
  int status = 0;
};

CommandOutput cmd_classify(const RunConfig& cfg);
CommandOutput cmd_gamma(const RunConfig& cfg);
CommandOutput cmd_periodic(const RunConfig& cfg);
CommandOutput cmd_spectrum(const RunConfig& cfg);
/// Invariant suites on the configured problem; with `all_builtins` the
/// suites run on every built-in with default parameters instead.
CommandOutput cmd_verify(const RunConfig& cfg, bool all_builtins);
CommandOutput cmd_smt_demo(double t, long k_max);

/// Write report.json-style outputs into cfg.out_dir (created if needed),
/// plus run_info.json holding the timestamp. `stem` names the main JSON.
void write_outputs(const CommandOutput& out, const std::filesystem::path& dir,
                   const std::string& stem, bool with_run_info = true);

}  // namespace streamspec

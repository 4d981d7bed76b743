#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "streamspec/report.hpp"

using namespace streamspec;

namespace {

struct Overrides {
  std::string config;
  std::string builtin;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples, t_steps;
  std::optional<double> horizon, t_max;
  std::optional<long> k_max;
  std::string out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--builtin", o.builtin, "built-in problem name (ignored with --config)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--samples", o.samples, "number of sample points");
  cmd->add_option("--horizon", o.horizon, "exit-time and classification horizon");
  cmd->add_option("--t-max", o.t_max, "largest time on the growth grid");
  cmd->add_option("--t-steps", o.t_steps, "number of growth grid times");
  cmd->add_option("--k-max", o.k_max, "truncation |k| <= K of the periodic spectrum");
  cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve(const Overrides& o) {
  nlohmann::json j;
  std::string out_dir = "out";
  if (!o.config.empty()) {
    RunConfig base = load_run_config(o.config);
    j = base.to_json();
    out_dir = base.out_dir.string();
  } else {
    j = RunConfig{}.to_json();
    if (!o.builtin.empty()) j["problem"] = {{"builtin", o.builtin}};
  }
  if (o.seed) j["seed"] = *o.seed;
  if (o.samples) j["samples"] = *o.samples;
  if (o.t_steps) j["t_steps"] = *o.t_steps;
  if (o.horizon) j["horizon"] = *o.horizon;
  if (o.t_max) j["t_max"] = *o.t_max;
  if (o.k_max) j["k_max"] = *o.k_max;
  j["out_dir"] = o.out.empty() ? out_dir : o.out;
  return parse_run_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of weighted shift semigroups generated by transport flows"};
  app.require_subcommand(1);

  Overrides o;
  double smt_t = 2 * 3.14159265358979323846;
  long smt_k = 5;
  std::string smt_out = "out";

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"classify", "classify sample points into phase classes"},
                      {"spectrum", "composed spectrum of the generator and U(t)"},
                      {"gamma", "growth constants and type estimate"},
                      {"periodic", "candidate spectrum on periodic and rest points"},
                      {"verify", "run invariant suites (all built-ins without --config)"}};
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.help), o);
  auto* demo = app.add_subcommand("demo-smt-failure",
                                  "show exp(t*sigma(A)) missing part of sigma(U(t)) for rotation");
  demo->add_option("--t", smt_t, "time t > 0");
  demo->add_option("--k-max", smt_k, "truncation |k| <= K");
  demo->add_option("--out", smt_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (demo->parsed()) {
      CommandOutput out = cmd_smt_demo(smt_t, smt_k);
      write_outputs(out, smt_out, "smt_demo");
      std::cout << out.report.dump(2) << '\n';
      return out.status;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    RunConfig cfg = resolve(o);
    CommandOutput out;
    if (name == "classify") out = cmd_classify(cfg);
    else if (name == "spectrum") out = cmd_spectrum(cfg);
    else if (name == "gamma") out = cmd_gamma(cfg);
    else if (name == "periodic") out = cmd_periodic(cfg);
    else out = cmd_verify(cfg, o.config.empty() && o.builtin.empty());
    write_outputs(out, cfg.out_dir, name);
    std::cout << out.report.dump(2) << '\n';
    return out.status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

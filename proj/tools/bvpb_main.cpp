// bvpb: deterministic 1D3V kinetic simulator for the bipolar
// Vlasov-Poisson-Boltzmann system.
//
// Subcommands:
//   run             -- run an experiment from a config file
//   validate        -- parse and validate a config, print the resolved setup
//   describe-preset -- print a preset's resolved physics and default config
//
// Exit codes: 0 pass, 1 run error, 2 config error, 3 invariant-suite failure.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "bvpb/experiment.hpp"

using namespace bvpb;

int main(int argc, char** argv) {
  CLI::App app{"1D3V bipolar Vlasov-Poisson-Boltzmann simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "bvpb_out", preset_name;
  int threads = -1, snapshot_every = -1;

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--out-dir", out_dir, "output directory (env BVPB_OUT_DIR overrides)");
  run->add_option("--threads", threads, "worker threads (0 = runtime default)");
  run->add_option("--snapshot-every", snapshot_every, "diagnostics cadence in steps");

  auto* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("--config", config_path, "config file path")->required();

  auto* describe = app.add_subcommand("describe-preset", "show a preset's resolved physics");
  describe->add_option("preset", preset_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  // Environment override applies to the output directory only.
  if (const char* env = std::getenv("BVPB_OUT_DIR")) out_dir = env;

  try {
    if (describe->parsed()) {
      const ExperimentConfig cfg = default_config(preset_from_string(preset_name));
      const MaterializedExperiment mx = materialize(cfg);
      std::cout << describe_experiment(mx) << "\n# default config\n" << cfg.emit();
      return 0;
    }
    if (validate->parsed()) {
      const ExperimentConfig cfg = parse_config(config_path);
      const MaterializedExperiment mx = materialize(cfg);
      std::cout << "config OK\n" << describe_experiment(mx);
      if (!cfg.defaults_applied.empty()) {
        std::cout << "defaults applied:\n";
        for (const auto& d : cfg.defaults_applied) std::cout << "  " << d << "\n";
      }
      return 0;
    }
    // run
    const ExperimentConfig cfg = parse_config(config_path);
    const MaterializedExperiment mx = materialize(cfg);
    const RunResult rr = run_experiment(mx, out_dir, threads, snapshot_every);
    std::cout << "wrote " << rr.summary_json << "\n";
    for (const auto& m : rr.invariant_messages) std::cout << "invariant: " << m << "\n";
    std::cout << (rr.invariants_pass && rr.status == RunStatus::ok ? "status: pass"
                                                                   : "status: fail")
              << "\n";
    return int(rr.status);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

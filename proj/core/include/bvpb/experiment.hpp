#pragma once

#include <string>

#include "bvpb/config.hpp"
#include "bvpb/diagnostics.hpp"

namespace bvpb {

enum class RunStatus : int { ok = 0, run_error = 1, config_error = 2, invariant_failure = 3 };

struct RunResult {
  RunStatus status = RunStatus::ok;
  std::string out_dir;
  std::string summary_json;  // path
  std::vector<DiagnosticsRecord> rows;
  std::array<double, 3> alphas{};       // two-shock mass decomposition
  double zero_mass_residual = 0.0;      // two-shock shifted-ansatz check
  AuditReport final_audit;
  DecayFit n2_fit, pix_fit, pert_fit;
  bool invariants_pass = true;
  std::vector<std::string> invariant_messages;
};

// Runs one experiment end to end: writes config echo, diagnostics CSV,
// final-state checkpoint and a JSON summary into out_dir; evaluates the
// preset's invariant suite. Partial outputs are preserved on solver abort.
RunResult run_experiment(const MaterializedExperiment& mx, const std::string& out_dir,
                         int threads_override = -1, int snapshot_override = -1);

// Human-readable resolved-physics description (states, speeds, Lax checks,
// grids) for the describe-preset subcommand.
std::string describe_experiment(const MaterializedExperiment& mx);

}  // namespace bvpb

#pragma once

// Batch orchestration behind the command-line tool: continuation solve,
// verification suite, plot-data emission and parameter sweeps.

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pobs/config.hpp"
#include "pobs/solver.hpp"

namespace pobs {

enum ExitCode : int { kExitPass = 0, kExitCriterion = 1, kExitConfig = 2, kExitRuntime = 3 };

struct SolveOutcome {
  ContinuationResult continuation;
  nlohmann::json log;
  std::string field_path;
  bool ok = false;  // every step converged and the final solution is nontrivial
};

/// Runs the ε-continuation and writes into cfg.output.dir:
///   config.ini, u.pobs (final field), u_step_<k>.pobs (save_steps), solve_log.json
SolveOutcome run_solve(const RunConfig& cfg);

struct VerifyOutcome {
  nlohmann::json report;
  std::string report_path;
  bool pass = false;
};

/// Runs every enabled analysis section on the field at `field_path` and writes
/// report.json into cfg.output.dir. Throws LoadError when the field is
/// unreadable or lives on a grid different from the configured one.
VerifyOutcome run_verify(const RunConfig& cfg, const std::string& field_path);

/// Same, on an in-memory field (no file is read).
VerifyOutcome verify_field(const RunConfig& cfg, const GridField& u);

/// Writes one CSV per figure family present in the report plus manifest.json;
/// returns the paths written (manifest last). Throws IoError when outdir is
/// not writable.
std::vector<std::string> emit_plot_data(const nlohmann::json& report, const std::string& outdir);

struct SweepRun {
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string dir;
  int exit_code = kExitPass;
  std::string error;
};

/// Cartesian product over the alternatives given per key; each run gets its
/// own directory under cfg.output.dir and runs solve then verify. At most
/// `workers` runs execute concurrently. Writes sweep.json.
std::vector<SweepRun> run_sweep(const RunConfig& cfg,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& axes,
                                int workers);

/// Writes JSON with two-space indentation and a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

/// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);

}  // namespace pobs

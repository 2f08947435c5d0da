#pragma once

#include "sbtrans/analysis.hpp"
#include "sbtrans/config.hpp"

namespace sbtrans {

struct GridResult {
  int n = 0;
  double h = 0.0;
  int dofs = 0;
  bool ok = false;
  std::string message;
  ErrorReport errors;
  double eta_first = 0.0;            // estimator of the first step pair
  double eta_time_integrated = 0.0;  // sqrt(sum_n dt eta_n^2)
  std::vector<StepDiagnostics> diagnostics;
  std::vector<std::array<double, 5>> probe;  // t, u1, u2, p, c
  State final_state;
};

struct StudyReport {
  std::vector<GridResult> grids;
  /// EOC of the headline (interpolant-based combined) error between
  /// consecutive grids; entry i sits between grids i and i+1.
  std::vector<double> eoc_combined;
  std::vector<double> eoc_eta;
  bool all_ok = true;
};

/// Problem preset selected by the config, with coefficient overrides applied.
ProblemCase make_configured_case(const RunConfig& cfg);

/// Runs one grid to completion (mesh, spaces, stabilization, time loop,
/// error norms, estimator). Exceptions propagate.
GridResult run_one_grid(const RunConfig& cfg, int n, bool keep_final_state = false);

/// Full refinement study; per-grid failures are recorded and remaining grids
/// still run. Writes study/components/estimator/probe CSVs under cfg.out_dir.
StudyReport run_convergence_study(const RunConfig& cfg);

/// Single-grid run (cfg.grids.front()) writing probe trace, per-step
/// estimator values, a checkpoint and nodal field dumps.
GridResult run_single(const RunConfig& cfg);

}  // namespace sbtrans

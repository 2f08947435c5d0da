#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sbtrans/linalg.hpp"
#include "sbtrans/stabilization.hpp"

namespace sbtrans {

/// Batch-run configuration; file keys use the same names as the CLI flags
/// (case, method, grids, theta, t_final, dt, stab_mode, out, probe,
/// pin_pressure, picard, plus the stabilization.* and coefficient overrides).
struct RunConfig {
  std::string case_name = "stokes";  // stokes | brinkman | interface
  std::string method = "asgs";       // asgs | galerkin | inject
  std::vector<int> grids = {10, 20, 40, 80};
  double theta = 1.0;
  double T = 1.0;
  double dt_override = 0.0;  // 0: dt = T / n per grid
  std::string out_dir = "out";
  double probe_x = 0.5, probe_y = 0.5;
  bool pin_pressure = true;
  bool picard = false;
  double picard_tol = 1e-10;
  int picard_max_iterations = 25;
  double interface_split = 0.5;
  int velocity_order = 1;
  int concentration_order = 1;
  int quadrature_degree = 4;
  int threads = 0;  // 0: use ASGS_THREADS or hardware
  bool parallel_grids = false;
  bool dump_mesh = false;
  bool dump_matrix = false;
  StabilizationMode stab_mode = StabilizationMode::Section5;
  StabilizationConstants stab_constants;
  int series_terms = -1;  // closed form
  SolverOptions solver;

  // constant-coefficient overrides (NaN = keep the preset laws)
  double const_D1 = std::nan(""), const_D2 = std::nan("");
  double override_sigma = std::nan(""), override_alpha = std::nan(""),
         override_phi = std::nan("");

  int effective_threads() const;
};

/// Parses a "key = value" file ('#' comments, blank lines allowed).
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

/// Applies parsed keys onto a config; unknown keys throw.
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

std::vector<int> parse_grid_list(const std::string& csv);

}  // namespace sbtrans

// Batch driver for the stabilized Stokes-Brinkman/transport solver:
// convergence studies over grid sequences and single runs with probe,
// estimator and checkpoint output.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "sbtrans/io.hpp"
#include "sbtrans/study.hpp"

namespace {

void add_common_flags(CLI::App* cmd, sbtrans::RunConfig& cfg, std::string& config_file,
                      std::string& grids_arg, std::string& probe_arg) {
  cmd->add_option("--config", config_file, "key = value configuration file");
  cmd->add_option("--case", cfg.case_name, "stokes | brinkman | interface");
  cmd->add_option("--method", cfg.method, "asgs | galerkin | inject");
  cmd->add_option("--grids", grids_arg, "comma separated n for n x n meshes");
  cmd->add_option("--theta", cfg.theta, "time scheme parameter (1 = backward Euler)");
  cmd->add_option("--t-final", cfg.T, "final time");
  cmd->add_option("--dt", cfg.dt_override, "time step (default T/n per grid)");
  cmd->add_option("--stab-mode", [&cfg](const std::vector<std::string>& v) {
        if (v.back() == "section5") cfg.stab_mode = sbtrans::StabilizationMode::Section5;
        else if (v.back() == "eq9") cfg.stab_mode = sbtrans::StabilizationMode::Eq9;
        else return false;
        return true;
      }, "section5 | eq9");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--probe", probe_arg, "probe point as x,y (default 0.5,0.5)");
  cmd->add_flag("--pin-pressure,!--no-pin-pressure", cfg.pin_pressure,
                "pin one pressure dof to the exact value");
  cmd->add_flag("--picard", cfg.picard, "fixed-point update of viscosity/advection per step");
  cmd->add_option("--threads", cfg.threads, "assembly worker count (ASGS_THREADS caps it)");
  cmd->add_flag("--parallel-grids", cfg.parallel_grids, "run study grids concurrently");
  cmd->add_option("--velocity-order", cfg.velocity_order, "1 or 2");
  cmd->add_option("--concentration-order", cfg.concentration_order, "1 or 2");
  cmd->add_option("--interface-split", cfg.interface_split, "interface x coordinate");
  cmd->add_option("--series-terms", cfg.series_terms,
                  "subscale series terms (negative = closed form)");
}

void finalize_config(sbtrans::RunConfig& cfg, const std::string& config_file,
                     const std::string& grids_arg, const std::string& probe_arg) {
  if (!config_file.empty())
    sbtrans::apply_config(cfg, sbtrans::parse_key_value_file(config_file));
  if (!grids_arg.empty()) cfg.grids = sbtrans::parse_grid_list(grids_arg);
  if (!probe_arg.empty()) {
    const auto comma = probe_arg.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--probe expects x,y");
    cfg.probe_x = std::stod(probe_arg.substr(0, comma));
    cfg.probe_y = std::stod(probe_arg.substr(comma + 1));
  }
}

int do_study(const sbtrans::RunConfig& cfg) {
  const sbtrans::StudyReport report = sbtrans::run_convergence_study(cfg);
  std::printf("%-10s %-14s %-10s\n", "grid", "error", "eoc");
  size_t prev_ok = SIZE_MAX;
  for (size_t i = 0; i < report.grids.size(); ++i) {
    const auto& g = report.grids[i];
    if (!g.ok) {
      std::printf("%-10d failed: %s\n", g.n, g.message.c_str());
      continue;
    }
    std::string eoc_cell;
    if (prev_ok != SIZE_MAX)
      eoc_cell = sbtrans::format_number(sbtrans::eoc(
          report.grids[prev_ok].errors.vs_interpolant.combined,
          g.errors.vs_interpolant.combined));
    std::printf("%-10d %-14s %-10s\n", g.n,
                sbtrans::format_number(g.errors.vs_interpolant.combined).c_str(),
                eoc_cell.c_str());
    prev_ok = i;
  }
  if (!report.all_ok) {
    std::fprintf(stderr, "study incomplete: at least one grid failed\n");
    return 1;
  }
  return 0;
}

int do_run(const sbtrans::RunConfig& cfg) {
  const sbtrans::GridResult g = sbtrans::run_single(cfg);
  std::printf("grid %dx%d  dofs %d  error %s  eta %s\n", g.n, g.n, g.dofs,
              sbtrans::format_number(g.errors.vs_interpolant.combined).c_str(),
              sbtrans::format_number(g.eta_first).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized coupled Stokes-Brinkman/transport solver"};
  app.require_subcommand(1);

  sbtrans::RunConfig cfg;
  std::string config_file, grids_arg, probe_arg;
  bool study_selected = false;

  CLI::App* study = app.add_subcommand("study", "convergence study over a grid sequence");
  add_common_flags(study, cfg, config_file, grids_arg, probe_arg);
  study->callback([&] { study_selected = true; });

  CLI::App* runone = app.add_subcommand("run", "single run with probe/estimator/checkpoint output");
  add_common_flags(runone, cfg, config_file, grids_arg, probe_arg);
  runone->add_flag("--dump-mesh", cfg.dump_mesh, "write the mesh as a text node/element file");
  runone->add_flag("--dump-matrix", cfg.dump_matrix, "write the first-step system matrix");

  CLI11_PARSE(app, argc, argv);

  try {
    finalize_config(cfg, config_file, grids_arg, probe_arg);
    return study_selected ? do_study(cfg) : do_run(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

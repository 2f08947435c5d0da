#include "sbtrans/study.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "sbtrans/io.hpp"

namespace sbtrans {

namespace {

void apply_overrides(CoefficientSet& co, const RunConfig& cfg) {
  if (!std::isnan(cfg.const_D1)) {
    const double v = cfg.const_D1;
    co.D1 = [v](double, double, double) { return v; };
    co.dD1_dx = [](double, double, double) { return 0.0; };
  }
  if (!std::isnan(cfg.const_D2)) {
    const double v = cfg.const_D2;
    co.D2 = [v](double, double, double) { return v; };
    co.dD2_dy = [](double, double, double) { return 0.0; };
  }
  if (!std::isnan(cfg.override_sigma)) co.sigma = cfg.override_sigma;
  if (!std::isnan(cfg.override_alpha)) co.alpha = cfg.override_alpha;
  if (!std::isnan(cfg.override_phi)) co.phi = cfg.override_phi;
}

}  // namespace

ProblemCase make_configured_case(const RunConfig& cfg) {
  ProblemCase pc = make_case_by_name(cfg.case_name, cfg.interface_split);
  pc.T = cfg.T;
  apply_overrides(pc.coeff_stokes, cfg);
  if (pc.has_interface) apply_overrides(pc.coeff_brinkman, cfg);
  validate(pc.coeff_stokes);
  if (pc.has_interface) validate(pc.coeff_brinkman);
  return pc;
}

GridResult run_one_grid(const RunConfig& cfg, int n, bool keep_final_state) {
  GridResult res;
  res.n = n;

  ProblemCase pc = make_configured_case(cfg);
  Mesh mesh = build_structured_mesh(n, n);
  if (pc.has_interface) mesh = partition_interface(mesh, pc.split_axis, pc.split_coord);
  res.h = mesh.h;

  const CoupledLayout layout = build_layout(mesh, cfg.velocity_order, cfg.concentration_order);
  res.dofs = layout.total;

  const double dt = cfg.dt_override > 0.0 ? cfg.dt_override : cfg.T / n;
  const int steps = std::max(1, static_cast<int>(std::llround(cfg.T / dt)));

  TimeLoopConfig tl;
  tl.T = cfg.T;
  tl.steps = steps;
  tl.theta = cfg.theta;
  tl.picard = cfg.picard;
  tl.picard_tol = cfg.picard_tol;
  tl.picard_max_iterations = cfg.picard_max_iterations;
  tl.solver = cfg.solver;
  tl.assembly.quadrature_degree = cfg.quadrature_degree;
  tl.assembly.num_threads = cfg.parallel_grids ? 1 : cfg.effective_threads();
  tl.assembly.pin_pressure = cfg.pin_pressure;

  const StabilizationSet stab =
      make_stabilization_set(pc, mesh.h_min, tl.dt(), cfg.stab_mode, cfg.stab_constants,
                             cfg.series_terms);
  const StabilizationSet* stab_ptr = cfg.method == "asgs" ? &stab : nullptr;
  if (cfg.method != "asgs" && cfg.method != "galerkin" && cfg.method != "inject")
    throw std::invalid_argument("unknown method '" + cfg.method + "'");

  ErrorAccumulator acc(layout, pc, cfg.theta, cfg.quadrature_degree);
  const State initial = initial_state(layout, pc);
  acc.start(initial);

  auto probe_row = [&](const State& s) {
    const auto v = probe_state(layout, s, cfg.probe_x, cfg.probe_y);
    res.probe.push_back({s.time, v[0], v[1], v[2], v[3]});
  };
  probe_row(initial);

  double eta_sq_sum = 0.0;
  auto observe = [&](int step_index, const State& prev, const State& next) {
    acc.add_step(prev, next);
    probe_row(next);
    const ResidualField rf =
        aposteriori_estimate(layout, pc, prev, next, cfg.theta, cfg.quadrature_degree);
    if (step_index == 0) res.eta_first = rf.eta;
    eta_sq_sum += (next.time - prev.time) * rf.eta * rf.eta;
  };

  State final_state = State::zero(layout);
  if (cfg.method == "inject") {
    State prev = initial;
    for (int s = 0; s < steps; ++s) {
      State next = exact_interpolant(layout, pc, (s + 1) * tl.dt());
      observe(s, prev, next);
      prev = std::move(next);
    }
    final_state = std::move(prev);
  } else {
    Trajectory traj = run(initial, tl, pc, stab_ptr, observe, /*store_states=*/false);
    res.diagnostics = std::move(traj.diagnostics);
    final_state = std::move(traj.final_state);
  }

  res.errors = acc.finish();
  res.errors.grid_label = std::to_string(n) + "x" + std::to_string(n);
  res.eta_time_integrated = std::sqrt(eta_sq_sum);
  if (keep_final_state) {
    res.final_state = std::move(final_state);
    res.final_state.layout = nullptr;  // the layout is local to this call
  }
  res.ok = true;
  return res;
}

namespace {

void write_study_outputs(const RunConfig& cfg, const StudyReport& report) {
  namespace fs = std::filesystem;
  ensure_directory(cfg.out_dir);
  const std::string tag = cfg.case_name + "_" + cfg.method;

  std::vector<std::vector<std::string>> rows, comp_rows, eta_rows;
  size_t prev_ok = SIZE_MAX;
  for (size_t i = 0; i < report.grids.size(); ++i) {
    const GridResult& g = report.grids[i];
    if (!g.ok) {
      rows.push_back({std::to_string(g.n), "failed", ""});
      continue;
    }
    std::string eoc_cell, eoc_eta_cell;
    if (prev_ok != SIZE_MAX) {
      const GridResult& p = report.grids[prev_ok];
      eoc_cell = format_number(eoc(p.errors.vs_interpolant.combined,
                                   g.errors.vs_interpolant.combined));
      if (p.eta_first > 0.0 && g.eta_first > 0.0)
        eoc_eta_cell = format_number(eoc(p.eta_first, g.eta_first));
    }
    rows.push_back({std::to_string(g.n), format_number(g.errors.vs_interpolant.combined),
                    eoc_cell});
    eta_rows.push_back({std::to_string(g.n), format_number(g.eta_first), eoc_eta_cell});
    comp_rows.push_back({std::to_string(g.n), std::to_string(g.dofs), format_number(g.h),
                         format_number(g.errors.vs_interpolant.u1_l2h1),
                         format_number(g.errors.vs_interpolant.u2_l2h1),
                         format_number(g.errors.vs_interpolant.p_l2l2),
                         format_number(g.errors.vs_interpolant.c_vtilde),
                         format_number(g.errors.vs_interpolant.combined),
                         format_number(g.errors.vs_exact.u1_l2h1),
                         format_number(g.errors.vs_exact.u2_l2h1),
                         format_number(g.errors.vs_exact.p_l2l2),
                         format_number(g.errors.vs_exact.c_vtilde),
                         format_number(g.errors.vs_exact.combined),
                         format_number(g.eta_first), format_number(g.eta_time_integrated)});
    prev_ok = i;
  }
  write_csv(fs::path(cfg.out_dir) / ("study_" + tag + ".csv"), "grid,error,eoc", rows);
  write_csv(fs::path(cfg.out_dir) / ("estimator_" + tag + ".csv"), "grid,eta,eoc_eta", eta_rows);
  write_csv(fs::path(cfg.out_dir) / ("components_" + tag + ".csv"),
            "grid,dofs,h,u1_l2h1,u2_l2h1,p_l2l2,c_vtilde,combined,"
            "exact_u1_l2h1,exact_u2_l2h1,exact_p_l2l2,exact_c_vtilde,exact_combined,"
            "eta_first,eta_l2t",
            comp_rows);

  for (const GridResult& g : report.grids) {
    if (!g.ok) continue;
    std::vector<std::vector<std::string>> prows;
    for (const auto& row : g.probe)
      prows.push_back({format_number(row[0]), format_number(row[1]), format_number(row[2]),
                       format_number(row[3]), format_number(row[4])});
    write_csv(fs::path(cfg.out_dir) / ("probe_" + tag + "_n" + std::to_string(g.n) + ".csv"),
              "t,u1,u2,p,c", prows);
  }
}

}  // namespace

StudyReport run_convergence_study(const RunConfig& cfg) {
  if (cfg.grids.empty()) throw std::invalid_argument("run_convergence_study: no grids");
  StudyReport report;
  report.grids.resize(cfg.grids.size());

  auto run_slot = [&](size_t i) {
    try {
      report.grids[i] = run_one_grid(cfg, cfg.grids[i]);
    } catch (const std::exception& e) {
      report.grids[i].n = cfg.grids[i];
      report.grids[i].ok = false;
      report.grids[i].message = e.what();
    }
  };

  if (cfg.parallel_grids && cfg.grids.size() > 1) {
    std::vector<std::thread> pool;
    const size_t workers = std::min<size_t>(cfg.effective_threads(), cfg.grids.size());
    std::atomic<size_t> cursor{0};
    for (size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = cursor.fetch_add(1); i < cfg.grids.size(); i = cursor.fetch_add(1))
          run_slot(i);
      });
    for (auto& t : pool) t.join();
  } else {
    for (size_t i = 0; i < cfg.grids.size(); ++i) run_slot(i);
  }

  for (size_t i = 0; i + 1 < report.grids.size(); ++i) {
    const GridResult& a = report.grids[i];
    const GridResult& b = report.grids[i + 1];
    if (a.ok && b.ok) {
      report.eoc_combined.push_back(
          eoc(a.errors.vs_interpolant.combined, b.errors.vs_interpolant.combined));
      report.eoc_eta.push_back(a.eta_first > 0 && b.eta_first > 0
                                   ? eoc(a.eta_first, b.eta_first)
                                   : 0.0);
    } else {
      report.eoc_combined.push_back(std::nan(""));
      report.eoc_eta.push_back(std::nan(""));
    }
  }
  report.all_ok = true;
  for (const auto& g : report.grids) report.all_ok = report.all_ok && g.ok;

  write_study_outputs(cfg, report);
  return report;
}

GridResult run_single(const RunConfig& cfg) {
  if (cfg.grids.empty()) throw std::invalid_argument("run_single: no grid");
  namespace fs = std::filesystem;
  ensure_directory(cfg.out_dir);
  const int n = cfg.grids.front();

  // per-step estimator values are recomputed from the probe run below
  GridResult g = run_one_grid(cfg, n, /*keep_final_state=*/true);

  const std::string tag = cfg.case_name + "_" + cfg.method + "_n" + std::to_string(n);
  std::vector<std::vector<std::string>> prows;
  for (const auto& row : g.probe)
    prows.push_back({format_number(row[0]), format_number(row[1]), format_number(row[2]),
                     format_number(row[3]), format_number(row[4])});
  write_csv(fs::path(cfg.out_dir) / ("probe_" + tag + ".csv"), "t,u1,u2,p,c", prows);

  write_csv(fs::path(cfg.out_dir) / ("estimator_" + tag + ".csv"), "grid,eta,eoc_eta",
            {{std::to_string(n), format_number(g.eta_first), ""}});

  ProblemCase pc = make_configured_case(cfg);
  Mesh mesh = build_structured_mesh(n, n);
  if (pc.has_interface) mesh = partition_interface(mesh, pc.split_axis, pc.split_coord);
  const CoupledLayout layout = build_layout(mesh, cfg.velocity_order, cfg.concentration_order);

  save_state(fs::path(cfg.out_dir) / ("checkpoint_" + tag + ".bin"), g.final_state);
  write_fields_text(fs::path(cfg.out_dir) / ("fields_" + tag + ".txt"), layout, g.final_state);

  if (cfg.dump_mesh) {
    std::ofstream out(fs::path(cfg.out_dir) / ("mesh_n" + std::to_string(n) + ".txt"));
    write_mesh_text(mesh, out);
  }
  if (cfg.dump_matrix) {
    const double dt = cfg.dt_override > 0.0 ? cfg.dt_override : cfg.T / n;
    const StabilizationSet stab = make_stabilization_set(pc, mesh.h_min, dt, cfg.stab_mode,
                                                         cfg.stab_constants, cfg.series_terms);
    AssemblyOptions opt;
    opt.quadrature_degree = cfg.quadrature_degree;
    opt.pin_pressure = cfg.pin_pressure;
    const State init = initial_state(layout, pc);
    AssembledSystem sys =
        assemble_system(layout, pc, init, dt, dt, cfg.theta,
                        cfg.method == "asgs" ? &stab : nullptr, opt);
    apply_dirichlet(sys);
    write_matrix_text(fs::path(cfg.out_dir) / ("matrix_" + tag + ".txt"), sys.matrix);
  }
  return g;
}

}  // namespace sbtrans

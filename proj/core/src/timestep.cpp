#include "sbtrans/timestep.hpp"

#include <cmath>
#include <stdexcept>

namespace sbtrans {

State initial_state(const CoupledLayout& layout, const ProblemCase& pc) {
  return exact_interpolant(layout, pc, 0.0);
}

State exact_interpolant(const CoupledLayout& layout, const ProblemCase& pc, double t) {
  State s = State::zero(layout, t);
  const auto& vs = layout.velocity;
  for (int i = 0; i < vs.num_dofs; ++i) {
    const ExactValues v = pc.exact.at(vs.dof_coords[i][0], vs.dof_coords[i][1], t);
    s.u1[i] = v.u1;
    s.u2[i] = v.u2;
  }
  const auto& ps = layout.pressure;
  for (int i = 0; i < ps.num_dofs; ++i)
    s.p[i] = pc.exact.at(ps.dof_coords[i][0], ps.dof_coords[i][1], t).p;
  const auto& cs = layout.concentration;
  for (int i = 0; i < cs.num_dofs; ++i)
    s.c[i] = pc.exact.at(cs.dof_coords[i][0], cs.dof_coords[i][1], t).c;
  return s;
}

State step(const State& prev, const TimeLoopConfig& cfg, const ProblemCase& pc,
           const StabilizationSet* stab, double t_target, StepDiagnostics* diag,
           LinearSolver* solver) {
  const double dt = cfg.dt();
  if (t_target < 0.0) t_target = prev.time + dt;

  LinearSolver local(cfg.solver);
  if (!solver) solver = &local;

  State lin = prev;
  State next = State::zero(*prev.layout, t_target);
  Eigen::VectorXd x_last;
  int picard_iters = 0;

  const int sweeps = cfg.picard ? cfg.picard_max_iterations : 1;
  for (int it = 0; it < sweeps; ++it) {
    AssembledSystem sys =
        assemble_system(*prev.layout, pc, prev, t_target, dt, cfg.theta, stab, cfg.assembly,
                        it == 0 ? nullptr : &lin);
    apply_dirichlet(sys);

    SolveReport report;
    Eigen::VectorXd x;
    try {
      x = solver->solve(sys.matrix, sys.rhs, &report);
    } catch (const SolveFailure& e) {
      throw SolveFailure("step to t=" + std::to_string(t_target) + ": " + e.what(),
                         e.achieved_residual, e.iterations);
    }
    if (diag) {
      diag->t = t_target;
      diag->solver_iterations = report.iterations;
      diag->solver_residual = report.residual;
    }

    next = State::unpack(*prev.layout, x, t_target);
    picard_iters = it + 1;
    if (!cfg.picard) break;
    if (x_last.size() == x.size()) {
      const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
      if ((x - x_last).lpNorm<Eigen::Infinity>() / scale <= cfg.picard_tol) break;
    }
    x_last = x;
    lin = next;
  }
  if (diag) diag->picard_iterations = picard_iters;
  return next;
}

Trajectory run(const State& initial, const TimeLoopConfig& cfg, const ProblemCase& pc,
               const StabilizationSet* stab, const StepObserver& observer, bool store_states) {
  if (cfg.steps < 1) throw std::invalid_argument("run: step count must be at least 1");
  Trajectory traj;
  if (store_states) traj.states.push_back(initial);

  State prev = initial;
  const double dt = cfg.dt();
  LinearSolver solver(cfg.solver);
  for (int n = 0; n < cfg.steps; ++n) {
    StepDiagnostics diag;
    diag.step = n;
    State next = step(prev, cfg, pc, stab, (n + 1) * dt, &diag, &solver);
    traj.diagnostics.push_back(diag);
    if (observer) observer(n, prev, next);
    if (store_states) traj.states.push_back(next);
    prev = std::move(next);
  }
  traj.final_state = std::move(prev);
  return traj;
}

}  // namespace sbtrans

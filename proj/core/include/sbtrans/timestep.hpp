#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbtrans/assembly.hpp"

namespace sbtrans {

struct TimeLoopConfig {
  double T = 1.0;
  int steps = 10;       // N; dt = T/N
  double theta = 1.0;   // 1 = backward Euler, 0 = Crank-Nicolson
  bool picard = false;  // fixed-point update of viscosity/advection per step
  double picard_tol = 1e-10;
  int picard_max_iterations = 25;
  SolverOptions solver;
  AssemblyOptions assembly;

  double dt() const { return T / steps; }
};

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  int solver_iterations = 0;
  double solver_residual = 0.0;
  int picard_iterations = 0;
};

struct Trajectory {
  std::vector<State> states;  // filled when store_states is on; states[0] = initial
  State final_state;
  std::vector<StepDiagnostics> diagnostics;
};

/// Nodal interpolation of the initial data (u0, p at t=0, c0).
State initial_state(const CoupledLayout& layout, const ProblemCase& pc);

/// Interpolant of the exact solution at time t, for injection runs and the
/// superclose error measure.
State exact_interpolant(const CoupledLayout& layout, const ProblemCase& pc, double t);

/// One theta step to t_target (defaults to prev.time + dt). stab == nullptr
/// selects the Galerkin method. Solver failures are rethrown with the step
/// identified. A caller-owned LinearSolver lets consecutive steps share the
/// preconditioner.
State step(const State& prev, const TimeLoopConfig& cfg, const ProblemCase& pc,
           const StabilizationSet* stab, double t_target = -1.0,
           StepDiagnostics* diag = nullptr, LinearSolver* solver = nullptr);

using StepObserver = std::function<void(int, const State&, const State&)>;

/// Advances N steps from the initial state. The observer (if any) sees every
/// consecutive state pair; with store_states the full history is kept.
Trajectory run(const State& initial, const TimeLoopConfig& cfg, const ProblemCase& pc,
               const StabilizationSet* stab, const StepObserver& observer = nullptr,
               bool store_states = true);

}  // namespace sbtrans

#pragma once

#include <vector>

#include "sbtrans/fe_space.hpp"
#include "sbtrans/linalg.hpp"
#include "sbtrans/problem.hpp"
#include "sbtrans/stabilization.hpp"

namespace sbtrans {

/// Monolithic linear system for one time step, before Dirichlet elimination.
/// `constraints` lists the Dirichlet dofs (velocity on the outer boundary and
/// the optional pressure pin) together with their values.
struct AssembledSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<std::pair<int, double>> constraints;
};

struct AssemblyOptions {
  int quadrature_degree = 4;
  int num_threads = 1;
  bool pin_pressure = true;
  int pressure_pin_dof = 0;
  /// Keep the basis second-derivative terms of the strong operators even when
  /// they are identically zero (order 1). Exercised by tests; the default
  /// skips them.
  bool retain_zero_second_derivative_terms = false;
  bool include_convection = true;        // test knob
  bool include_pressure_coupling = true; // test knob
  std::vector<int> element_order;        // test knob; empty = natural order
};

/// One theta-step system: find U at t_target = t_prev + dt given the previous
/// state. Viscosity and the advection velocity are evaluated at the previous
/// state (semi-implicit linearization); the transport row carries the
/// (phi/dt)(c^{n+1} - c^n) mass term while the flow rows are quasi-static.
/// Passing stab = nullptr yields the plain Galerkin system, otherwise the
/// element-wise subgrid terms are added. A dt of +infinity produces the
/// stationary system linearized at `prev`. A Picard iteration may supply a
/// separate linearization state; the time-level data always come from `prev`.
AssembledSystem assemble_system(const CoupledLayout& layout, const ProblemCase& pc,
                                const State& prev, double t_target, double dt, double theta,
                                const StabilizationSet* stab, const AssemblyOptions& opt = {},
                                const State* linearize = nullptr);

AssembledSystem assemble_galerkin(const CoupledLayout& layout, const ProblemCase& pc,
                                  const State& prev, double t_target, double dt, double theta,
                                  const AssemblyOptions& opt = {});

AssembledSystem assemble_asgs(const CoupledLayout& layout, const ProblemCase& pc,
                              const State& prev, double t_target, double dt, double theta,
                              const StabilizationSet& stab, const AssemblyOptions& opt = {});

/// Adds the Beavers-Joseph-Saffman slip penalty
/// (alpha_bjs / sqrt(sigma_B)) int_Gamma (u.t)(v.t) dGamma to the system.
void assemble_interface_bjs(AssembledSystem& system, const CoupledLayout& layout,
                            const std::vector<InterfaceEdge>& edges, double alpha_bjs,
                            double sigma_B);

/// Symmetric row/column elimination of the given Dirichlet values, with the
/// known contributions moved to the right-hand side. Throws on conflicting
/// duplicate constraints.
void apply_dirichlet(AssembledSystem& system,
                     const std::vector<std::pair<int, double>>& constraints);
void apply_dirichlet(AssembledSystem& system);

}  // namespace sbtrans

#pragma once

#include <string>
#include <vector>

#include "sbtrans/stabilization.hpp"
#include "sbtrans/timestep.hpp"

namespace sbtrans {

/// Error norms of one run: L2-in-time H1 for the velocity components,
/// L2-in-time L2 for pressure, and for concentration the max-in-time L2 plus
/// L2-in-time H1 combination. `combined` is the square-root sum of the four.
struct FieldErrorNorms {
  double u1_l2h1 = 0.0;
  double u2_l2h1 = 0.0;
  double p_l2l2 = 0.0;
  double c_vtilde = 0.0;
  double combined = 0.0;
};

struct ErrorReport {
  /// Quadrature errors against the analytic solution and its gradients.
  FieldErrorNorms vs_exact;
  /// Errors against the nodal interpolant of the analytic solution; this is
  /// the superclose quantity the convergence tables track.
  FieldErrorNorms vs_interpolant;
  std::string grid_label;
  int dof_count = 0;
};

/// Streaming accumulator so long runs need not store their whole history.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const CoupledLayout& layout, const ProblemCase& pc, double theta,
                   int quadrature_degree = 4);

  void start(const State& initial);
  void add_step(const State& prev, const State& next);
  ErrorReport finish() const;

 private:
  void level_c_l2(const State& s, const State& interp, double& vs_exact, double& vs_interp) const;

  const CoupledLayout* layout_;
  const ProblemCase* pc_;
  double theta_;
  int quad_degree_;
  State interp_prev_;  // interpolant at the last seen time level
  bool started_ = false;

  double sum_u1_ex_ = 0, sum_u2_ex_ = 0, sum_p_ex_ = 0, sum_ch1_ex_ = 0, max_c_ex_ = 0;
  double sum_u1_in_ = 0, sum_u2_in_ = 0, sum_p_in_ = 0, sum_ch1_in_ = 0, max_c_in_ = 0;
};

/// Error norms of a stored trajectory (states must be present).
ErrorReport error_norms(const Trajectory& traj, const CoupledLayout& layout, const ProblemCase& pc,
                        double theta, int quadrature_degree = 4);

/// log2 of the error ratio under mesh halving. Throws for non-positive input.
double eoc(double e_coarse, double e_fine);

/// Per-element L2 norms of the four strong residuals of one theta interval,
/// and the residual estimator eta = h * sqrt(sum_k sum_i ||R_i||_k^2).
struct ResidualField {
  std::vector<double> r1, r2, r3, r4;
  double eta = 0.0;
};

ResidualField aposteriori_estimate(const CoupledLayout& layout, const ProblemCase& pc,
                                   const State& prev, const State& next, double theta,
                                   int quadrature_degree = 4);

/// int_Omega phi c dx of the transport field.
double transport_mass(const CoupledLayout& layout, const ProblemCase& pc, const State& s,
                      int quadrature_degree = 4);

/// (u1, u2, p, c) of a discrete state at an arbitrary point.
std::array<double, 4> probe_state(const CoupledLayout& layout, const State& s, double x, double y);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sbtrans

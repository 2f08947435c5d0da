#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <stdexcept>
#include <string>

namespace sbtrans {

/// Row-major storage, i.e. compressed sparse row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SolverOptions {
  double tol = 1e-10;
  int restart = 100;
  int max_iterations = 10000;
  double ilut_drop_tol = 1e-5;
  int ilut_fill_factor = 15;
  /// A reused factorization is rebuilt once a solve needs more iterations.
  int refresh_iteration_limit = 120;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
};

class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), achieved_residual(residual), iterations(iterations) {}
  double achieved_residual;
  int iterations;
};

/// Restarted GMRES with incomplete-LU preconditioning. Throws SolveFailure
/// (carrying the achieved residual) if the relative residual target is not
/// met within the iteration budget.
Eigen::VectorXd solve_iterative(const SparseMatrix& A, const Eigen::VectorXd& b,
                                const SolverOptions& opt = {}, SolveReport* report = nullptr);

/// Same GMRES/ILU solve, but the incomplete factorization is kept between
/// calls and only recomputed when the previous solve needed many iterations
/// or stalled. Time loops solve a slowly drifting sequence of systems, where
/// this removes most of the factorization cost. The refresh policy is
/// deterministic, so repeated runs stay bit-identical.
class LinearSolver {
 public:
  explicit LinearSolver(const SolverOptions& opt = {}) : opt_(opt) {}

  Eigen::VectorXd solve(const SparseMatrix& A, const Eigen::VectorXd& b,
                        SolveReport* report = nullptr);

  const SolverOptions& options() const { return opt_; }

 private:
  SolverOptions opt_;
  struct Cache;
  std::shared_ptr<Cache> cache_;  // pimpl; holds the current factorization
};

/// Partial-pivoting LU on a dense copy; for tests and tiny systems only
/// (dimension capped at 5000). Throws on numerically singular pivots.
Eigen::VectorXd solve_dense_oracle(Eigen::MatrixXd A, Eigen::VectorXd b);

}  // namespace sbtrans

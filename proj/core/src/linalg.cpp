#include "sbtrans/linalg.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <cstdio>
#include <limits>

namespace sbtrans {

namespace {

// Preconditioner adapter that lets a GMRES object use an externally owned and
// externally refreshed incomplete factorization.
class AttachedILUT {
 public:
  AttachedILUT() = default;
  void attach(const Eigen::IncompleteLUT<double>* f) { f_ = f; }
  template <typename MatType>
  AttachedILUT& analyzePattern(const MatType&) { return *this; }
  template <typename MatType>
  AttachedILUT& factorize(const MatType&) { return *this; }
  template <typename MatType>
  AttachedILUT& compute(const MatType&) { return *this; }
  template <typename Rhs>
  auto solve(const Rhs& b) const { return f_->solve(b); }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  const Eigen::IncompleteLUT<double>* f_ = nullptr;
};

}  // namespace

struct LinearSolver::Cache {
  Eigen::IncompleteLUT<double> ilut;
  bool valid = false;
  bool stale = false;  // converged last time but took too long; rebuild next call
  Eigen::Index dim = -1;
};

Eigen::VectorXd LinearSolver::solve(const SparseMatrix& A, const Eigen::VectorXd& b,
                                    SolveReport* report) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("solve: dimension mismatch");
  const Eigen::Index n = A.rows();
  if (!cache_) cache_ = std::make_shared<Cache>();

  // Row and column equilibration: the monolithic blocks carry very different
  // scales (stabilized pressure rows ~ h^2, transport mass rows ~ 1/dt),
  // which starves the incomplete factorization without it.
  Eigen::VectorXd rscale = Eigen::VectorXd::Ones(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    double m = 0.0;
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) m = std::max(m, std::abs(it.value()));
    if (m > 0.0) rscale[r] = 1.0 / m;
  }
  SparseMatrix As = A;
  for (Eigen::Index r = 0; r < n; ++r)
    for (SparseMatrix::InnerIterator it(As, r); it; ++it) it.valueRef() *= rscale[r];
  Eigen::VectorXd cscale = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (SparseMatrix::InnerIterator it(As, r); it; ++it)
      cscale[it.col()] = std::max(cscale[it.col()], std::abs(it.value()));
  for (Eigen::Index c = 0; c < n; ++c) cscale[c] = cscale[c] > 0.0 ? 1.0 / cscale[c] : 1.0;
  for (Eigen::Index r = 0; r < n; ++r)
    for (SparseMatrix::InnerIterator it(As, r); it; ++it) it.valueRef() *= cscale[it.col()];
  const Eigen::VectorXd bs = rscale.cwiseProduct(b);

  const Eigen::SparseMatrix<double> Acol = As;  // solver operates on column storage
  const double bnorm = b.norm();

  if (cache_->dim != n) cache_->valid = false;
  if (cache_->stale) cache_->valid = false;

  Eigen::VectorXd x;
  double res = std::numeric_limits<double>::infinity();
  int total_iters = 0;
  double droptol = opt_.ilut_drop_tol;
  int fill = opt_.ilut_fill_factor;

  auto attempt = [&](int restart) -> bool {
    Eigen::GMRES<Eigen::SparseMatrix<double>, AttachedILUT> gmres;
    gmres.preconditioner().attach(&cache_->ilut);
    gmres.set_restart(restart);
    gmres.setMaxIterations(opt_.max_iterations);
    gmres.setTolerance(opt_.tol * 1e-2);  // headroom: the target is the unscaled residual
    gmres.compute(Acol);
    x = cscale.cwiseProduct(gmres.solve(bs));
    const int iters = static_cast<int>(gmres.iterations());
    total_iters += iters;
    res = bnorm > 0.0 ? (b - A * x).norm() / bnorm : (A * x).norm();
    const bool ok = x.allFinite() && res <= opt_.tol * 10.0;
    cache_->stale = ok && iters > opt_.refresh_iteration_limit;
    return ok;
  };

  bool done = cache_->valid && attempt(opt_.restart);
  for (int rebuild = 0; !done && rebuild < 3; ++rebuild) {
    cache_->ilut.setDroptol(droptol);
    cache_->ilut.setFillfactor(fill);
    cache_->ilut.compute(Acol);
    cache_->valid = true;
    cache_->stale = false;
    cache_->dim = n;
    done = attempt(rebuild < 2 ? opt_.restart : 3 * opt_.restart);
    droptol *= 1e-2;  // stagnation: refactor more aggressively
    fill *= 2;
  }

  if (report) {
    report->iterations = total_iters;
    report->residual = res;
  }
  if (!done) {
    cache_->valid = false;
    char msg[96];
    std::snprintf(msg, sizeof msg, "GMRES stagnated (relative residual %.3e)", res);
    throw SolveFailure(msg, res, total_iters);
  }
  return x;
}

Eigen::VectorXd solve_iterative(const SparseMatrix& A, const Eigen::VectorXd& b,
                                const SolverOptions& opt, SolveReport* report) {
  LinearSolver solver(opt);
  return solver.solve(A, b, report);
}

Eigen::VectorXd solve_dense_oracle(Eigen::MatrixXd A, Eigen::VectorXd b) {
  const Eigen::Index n = A.rows();
  if (n != A.cols() || n != b.size())
    throw std::invalid_argument("solve_dense_oracle: dimension mismatch");
  if (n > 5000) throw std::invalid_argument("solve_dense_oracle: dimension guard (5000) exceeded");

  // Plain LU with partial pivoting, kept independent of the iterative path.
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    double best = std::abs(A(k, k));
    for (Eigen::Index r = k + 1; r < n; ++r) {
      if (std::abs(A(r, k)) > best) {
        best = std::abs(A(r, k));
        piv = r;
      }
    }
    if (best < 1e-14)
      throw std::runtime_error("solve_dense_oracle: numerically singular (pivot " +
                               std::to_string(best) + " at column " + std::to_string(k) + ")");
    if (piv != k) {
      A.row(k).swap(A.row(piv));
      std::swap(b[k], b[piv]);
    }
    for (Eigen::Index r = k + 1; r < n; ++r) {
      const double m = A(r, k) / A(k, k);
      A(r, k) = 0.0;
      if (m != 0.0) {
        A.row(r).tail(n - k - 1) -= m * A.row(k).tail(n - k - 1);
        b[r] -= m * b[k];
      }
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (Eigen::Index c = r + 1; c < n; ++c) s -= A(r, c) * x[c];
    x[r] = s / A(r, r);
  }
  return x;
}

}  // namespace sbtrans

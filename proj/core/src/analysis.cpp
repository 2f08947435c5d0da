#include "sbtrans/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "sbtrans/quadrature.hpp"

namespace sbtrans {

namespace {

struct FieldSample {
  double v = 0.0, gx = 0.0, gy = 0.0, lap = 0.0;
};

FieldSample sample(const ScalarSpace& space, const Eigen::VectorXd& coeffs, int tri,
                   const BasisEval& b) {
  FieldSample s;
  for (int i = 0; i < b.n; ++i) {
    const double ci = coeffs[space.cell_dofs[tri][i]];
    s.v += ci * b.value[i];
    s.gx += ci * b.grad[i][0];
    s.gy += ci * b.grad[i][1];
    s.lap += ci * (b.hess[i][0] + b.hess[i][1]);
  }
  return s;
}

ExactValues combine(const ExactValues& a, const ExactValues& b, double wa, double wb) {
  ExactValues r;
  r.u1 = wa * a.u1 + wb * b.u1;
  r.u1_x = wa * a.u1_x + wb * b.u1_x;
  r.u1_y = wa * a.u1_y + wb * b.u1_y;
  r.u2 = wa * a.u2 + wb * b.u2;
  r.u2_x = wa * a.u2_x + wb * b.u2_x;
  r.u2_y = wa * a.u2_y + wb * b.u2_y;
  r.p = wa * a.p + wb * b.p;
  r.c = wa * a.c + wb * b.c;
  r.c_x = wa * a.c_x + wb * b.c_x;
  r.c_y = wa * a.c_y + wb * b.c_y;
  return r;
}

}  // namespace

ErrorAccumulator::ErrorAccumulator(const CoupledLayout& layout, const ProblemCase& pc,
                                   double theta, int quadrature_degree)
    : layout_(&layout), pc_(&pc), theta_(theta), quad_degree_(quadrature_degree) {}

void ErrorAccumulator::level_c_l2(const State& s, const State& interp, double& vs_exact,
                                  double& vs_interp) const {
  const Mesh& mesh = *layout_->mesh;
  const ScalarSpace& cs = layout_->concentration;
  const QuadratureRule rule = triangle_rule(quad_degree_);
  double ex2 = 0.0, in2 = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const double area2 = 2.0 * mesh.signed_area(k);
    const auto& tri = mesh.triangles[k];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bary = rule.points[q];
      const double w = rule.weights[q] * area2;
      const double x = bary[0] * mesh.vertices[tri[0]][0] + bary[1] * mesh.vertices[tri[1]][0] +
                       bary[2] * mesh.vertices[tri[2]][0];
      const double y = bary[0] * mesh.vertices[tri[0]][1] + bary[1] * mesh.vertices[tri[1]][1] +
                       bary[2] * mesh.vertices[tri[2]][1];
      const BasisEval bc = evaluate_basis(cs, k, bary);
      const FieldSample ch = sample(cs, s.c, k, bc);
      const FieldSample ci = sample(cs, interp.c, k, bc);
      const double cex = pc_->exact.at(x, y, s.time).c;
      ex2 += w * (ch.v - cex) * (ch.v - cex);
      in2 += w * (ch.v - ci.v) * (ch.v - ci.v);
    }
  }
  vs_exact = ex2;
  vs_interp = in2;
}

void ErrorAccumulator::start(const State& initial) {
  interp_prev_ = exact_interpolant(*layout_, *pc_, initial.time);
  double ex2, in2;
  level_c_l2(initial, interp_prev_, ex2, in2);
  max_c_ex_ = std::max(max_c_ex_, ex2);
  max_c_in_ = std::max(max_c_in_, in2);
  started_ = true;
}

void ErrorAccumulator::add_step(const State& prev, const State& next) {
  if (!started_) throw std::logic_error("ErrorAccumulator: start() not called");
  const Mesh& mesh = *layout_->mesh;
  const double dt = next.time - prev.time;
  const double bp = 0.5 * (1.0 + theta_);
  const double bm = 0.5 * (1.0 - theta_);

  const State interp_next = exact_interpolant(*layout_, *pc_, next.time);
  const QuadratureRule rule = triangle_rule(quad_degree_);

  const ScalarSpace& vs = layout_->velocity;
  const ScalarSpace& ps = layout_->pressure;
  const ScalarSpace& cs = layout_->concentration;

  // theta-combined coefficient vectors; the norms sample e^{n,theta}
  State mid = State::zero(*layout_, 0.0);
  State mid_i = State::zero(*layout_, 0.0);
  for (int f = 0; f < 4; ++f) {
    const FieldId id = static_cast<FieldId>(f);
    mid.field(id) = bp * next.field(id) + bm * prev.field(id);
    mid_i.field(id) = bp * interp_next.field(id) + bm * interp_prev_.field(id);
  }

  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const double area2 = 2.0 * mesh.signed_area(k);
    const auto& tri = mesh.triangles[k];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bary = rule.points[q];
      const double w = rule.weights[q] * area2 * dt;
      const double x = bary[0] * mesh.vertices[tri[0]][0] + bary[1] * mesh.vertices[tri[1]][0] +
                       bary[2] * mesh.vertices[tri[2]][0];
      const double y = bary[0] * mesh.vertices[tri[0]][1] + bary[1] * mesh.vertices[tri[1]][1] +
                       bary[2] * mesh.vertices[tri[2]][1];

      const BasisEval bv = evaluate_basis(vs, k, bary);
      const BasisEval bpr = ps.order == vs.order ? bv : evaluate_basis(ps, k, bary);
      const BasisEval bc = cs.order == vs.order ? bv : evaluate_basis(cs, k, bary);

      const FieldSample u1h = sample(vs, mid.u1, k, bv);
      const FieldSample u2h = sample(vs, mid.u2, k, bv);
      const FieldSample ph = sample(ps, mid.p, k, bpr);
      const FieldSample ch = sample(cs, mid.c, k, bc);

      ExactValues ex = pc_->exact.at(x, y, next.time);
      if (bm != 0.0) ex = combine(ex, pc_->exact.at(x, y, prev.time), bp, bm);

      auto h1 = [](double e, double ex_, double ey_) { return e * e + ex_ * ex_ + ey_ * ey_; };

      sum_u1_ex_ += w * h1(u1h.v - ex.u1, u1h.gx - ex.u1_x, u1h.gy - ex.u1_y);
      sum_u2_ex_ += w * h1(u2h.v - ex.u2, u2h.gx - ex.u2_x, u2h.gy - ex.u2_y);
      sum_p_ex_ += w * (ph.v - ex.p) * (ph.v - ex.p);
      sum_ch1_ex_ += w * h1(ch.v - ex.c, ch.gx - ex.c_x, ch.gy - ex.c_y);

      const FieldSample iu1 = sample(vs, mid_i.u1, k, bv);
      const FieldSample iu2 = sample(vs, mid_i.u2, k, bv);
      const FieldSample ip = sample(ps, mid_i.p, k, bpr);
      const FieldSample ic = sample(cs, mid_i.c, k, bc);

      sum_u1_in_ += w * h1(u1h.v - iu1.v, u1h.gx - iu1.gx, u1h.gy - iu1.gy);
      sum_u2_in_ += w * h1(u2h.v - iu2.v, u2h.gx - iu2.gx, u2h.gy - iu2.gy);
      sum_p_in_ += w * (ph.v - ip.v) * (ph.v - ip.v);
      sum_ch1_in_ += w * h1(ch.v - ic.v, ch.gx - ic.gx, ch.gy - ic.gy);
    }
  }

  double ex2, in2;
  level_c_l2(next, interp_next, ex2, in2);
  max_c_ex_ = std::max(max_c_ex_, ex2);
  max_c_in_ = std::max(max_c_in_, in2);
  interp_prev_ = interp_next;
}

ErrorReport ErrorAccumulator::finish() const {
  ErrorReport r;
  r.vs_exact.u1_l2h1 = std::sqrt(sum_u1_ex_);
  r.vs_exact.u2_l2h1 = std::sqrt(sum_u2_ex_);
  r.vs_exact.p_l2l2 = std::sqrt(sum_p_ex_);
  r.vs_exact.c_vtilde = std::sqrt(max_c_ex_ + sum_ch1_ex_);
  r.vs_exact.combined = std::sqrt(sum_u1_ex_ + sum_u2_ex_ + sum_p_ex_ + max_c_ex_ + sum_ch1_ex_);
  r.vs_interpolant.u1_l2h1 = std::sqrt(sum_u1_in_);
  r.vs_interpolant.u2_l2h1 = std::sqrt(sum_u2_in_);
  r.vs_interpolant.p_l2l2 = std::sqrt(sum_p_in_);
  r.vs_interpolant.c_vtilde = std::sqrt(max_c_in_ + sum_ch1_in_);
  r.vs_interpolant.combined =
      std::sqrt(sum_u1_in_ + sum_u2_in_ + sum_p_in_ + max_c_in_ + sum_ch1_in_);
  r.dof_count = layout_->total;
  return r;
}

ErrorReport error_norms(const Trajectory& traj, const CoupledLayout& layout, const ProblemCase& pc,
                        double theta, int quadrature_degree) {
  if (traj.states.size() < 2)
    throw std::invalid_argument("error_norms: trajectory must store at least two states");
  ErrorAccumulator acc(layout, pc, theta, quadrature_degree);
  acc.start(traj.states.front());
  for (size_t n = 0; n + 1 < traj.states.size(); ++n) acc.add_step(traj.states[n], traj.states[n + 1]);
  return acc.finish();
}

double eoc(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0))
    throw std::invalid_argument("eoc: errors must be positive");
  return std::log(e_coarse / e_fine) / std::log(2.0);
}

ResidualField aposteriori_estimate(const CoupledLayout& layout, const ProblemCase& pc,
                                   const State& prev, const State& next, double theta,
                                   int quadrature_degree) {
  const Mesh& mesh = *layout.mesh;
  const double dt = next.time - prev.time;
  const double bp = 0.5 * (1.0 + theta);
  const double bm = 0.5 * (1.0 - theta);
  const double t_theta = bp * next.time + bm * prev.time;
  const QuadratureRule rule = triangle_rule(quadrature_degree);

  const ScalarSpace& vs = layout.velocity;
  const ScalarSpace& ps = layout.pressure;
  const ScalarSpace& cs = layout.concentration;

  State mid = State::zero(layout, t_theta);
  for (int f = 0; f < 4; ++f) {
    const FieldId id = static_cast<FieldId>(f);
    mid.field(id) = bp * next.field(id) + bm * prev.field(id);
  }

  ResidualField rf;
  const int nel = mesh.num_triangles();
  rf.r1.assign(nel, 0.0);
  rf.r2.assign(nel, 0.0);
  rf.r3.assign(nel, 0.0);
  rf.r4.assign(nel, 0.0);

  double total = 0.0;
  for (int k = 0; k < nel; ++k) {
    const Subdomain sub = mesh.subdomain_of[k];
    const CoefficientSet& co = pc.coeffs(sub);
    const double area2 = 2.0 * mesh.signed_area(k);
    const auto& tri = mesh.triangles[k];
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bary = rule.points[q];
      const double w = rule.weights[q] * area2;
      const double x = bary[0] * mesh.vertices[tri[0]][0] + bary[1] * mesh.vertices[tri[1]][0] +
                       bary[2] * mesh.vertices[tri[2]][0];
      const double y = bary[0] * mesh.vertices[tri[0]][1] + bary[1] * mesh.vertices[tri[1]][1] +
                       bary[2] * mesh.vertices[tri[2]][1];

      const BasisEval bv = evaluate_basis(vs, k, bary);
      const BasisEval bpr = ps.order == vs.order ? bv : evaluate_basis(ps, k, bary);
      const BasisEval bc = cs.order == vs.order ? bv : evaluate_basis(cs, k, bary);

      const FieldSample u1h = sample(vs, mid.u1, k, bv);
      const FieldSample u2h = sample(vs, mid.u2, k, bv);
      const FieldSample ph = sample(ps, mid.p, k, bpr);
      const FieldSample ch = sample(cs, mid.c, k, bc);
      const FieldSample cprev = sample(cs, prev.c, k, bc);
      const FieldSample cnext = sample(cs, next.c, k, bc);
      const FieldSample u1p = sample(vs, prev.u1, k, bv);
      const FieldSample u2p = sample(vs, prev.u2, k, bv);

      const double mu = viscosity(co, cprev.v);
      const double D1 = co.D1(x, y, t_theta);
      const double D2 = co.D2(x, y, t_theta);

      Forcing f = mms_forcing(pc, x, y, next.time, sub);
      if (bm != 0.0) {
        const Forcing fp = mms_forcing(pc, x, y, prev.time, sub);
        f.f1x = bp * f.f1x + bm * fp.f1x;
        f.f1y = bp * f.f1y + bm * fp.f1y;
        f.f2 = bp * f.f2 + bm * fp.f2;
        f.g = bp * f.g + bm * fp.g;
      }

      // second derivatives of the discrete fields (zero for order 1)
      const double lap_u1 = u1h.lap, lap_u2 = u2h.lap;
      double diff_c = 0.0;
      for (int i = 0; i < bc.n; ++i)
        diff_c += mid.c[cs.cell_dofs[k][i]] * (D1 * bc.hess[i][0] + D2 * bc.hess[i][1]);

      const double R1 = f.f1x - (-mu * lap_u1 + co.sigma * u1h.v + ph.gx);
      const double R2 = f.f1y - (-mu * lap_u2 + co.sigma * u2h.v + ph.gy);
      const double R3 = f.f2 - (u1h.gx + u2h.gy);
      const double R4 = f.g - (co.phi * (cnext.v - cprev.v) / dt - diff_c +
                               u1p.v * ch.gx + u2p.v * ch.gy + co.alpha * ch.v);

      s1 += w * R1 * R1;
      s2 += w * R2 * R2;
      s3 += w * R3 * R3;
      s4 += w * R4 * R4;
    }
    rf.r1[k] = std::sqrt(s1);
    rf.r2[k] = std::sqrt(s2);
    rf.r3[k] = std::sqrt(s3);
    rf.r4[k] = std::sqrt(s4);
    total += s1 + s2 + s3 + s4;
  }
  rf.eta = mesh.h * std::sqrt(total);
  return rf;
}

double transport_mass(const CoupledLayout& layout, const ProblemCase& pc, const State& s,
                      int quadrature_degree) {
  const Mesh& mesh = *layout.mesh;
  const ScalarSpace& cs = layout.concentration;
  const QuadratureRule rule = triangle_rule(quadrature_degree);
  double total = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const double area2 = 2.0 * mesh.signed_area(k);
    const double phi = pc.coeffs(mesh.subdomain_of[k]).phi;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const BasisEval bc = evaluate_basis(cs, k, rule.points[q]);
      total += rule.weights[q] * area2 * phi * sample(cs, s.c, k, bc).v;
    }
  }
  return total;
}

std::array<double, 4> probe_state(const CoupledLayout& layout, const State& s, double x,
                                  double y) {
  const Mesh& mesh = *layout.mesh;
  const int k = mesh.locate(x, y);
  const auto& tri = mesh.triangles[k];
  const auto& p0 = mesh.vertices[tri[0]];
  const auto& p1 = mesh.vertices[tri[1]];
  const auto& p2 = mesh.vertices[tri[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  const double l1 = ((x - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (y - p0[1])) / det;
  const double l2 = ((p1[0] - p0[0]) * (y - p0[1]) - (x - p0[0]) * (p1[1] - p0[1])) / det;
  const std::array<double, 3> bary = {1.0 - l1 - l2, l1, l2};
  return {eval_fe(layout.velocity, s.u1, k, bary), eval_fe(layout.velocity, s.u2, k, bary),
          eval_fe(layout.pressure, s.p, k, bary), eval_fe(layout.concentration, s.c, k, bary)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching samples");
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace sbtrans

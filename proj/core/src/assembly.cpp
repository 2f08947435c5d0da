#include "sbtrans/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "sbtrans/quadrature.hpp"

namespace sbtrans {

namespace {

using Triplet = Eigen::Triplet<double>;

struct SpaceTables {
  const ScalarSpace* space = nullptr;
  int n = 0;
  // one BasisEval per quadrature point
  std::vector<BasisEval> at;
};

struct WorkerOutput {
  std::vector<Triplet> k_triplets;  // theta-weighted operator part
  std::vector<Triplet> m_triplets;  // coefficient of (c^{n+1}-c^n)/dt
  Eigen::VectorXd rhs;
};

struct AssemblyContext {
  const CoupledLayout* layout;
  const ProblemCase* pc;
  const State* prev;
  const State* lin;  // linearization state for viscosity/advection
  double t_target, t_prev, t_theta;
  double beta_plus, beta_minus;
  const StabilizationSet* stab;
  const AssemblyOptions* opt;
  QuadratureRule rule;
  bool stationary;  // dt == infinity
};

void assemble_elements(const AssemblyContext& ctx, const std::vector<int>& elements, size_t begin,
                       size_t end, WorkerOutput& out) {
  const CoupledLayout& layout = *ctx.layout;
  const Mesh& mesh = *layout.mesh;
  const ProblemCase& pc = *ctx.pc;
  const AssemblyOptions& opt = *ctx.opt;
  const int nq = static_cast<int>(ctx.rule.points.size());

  const ScalarSpace& vs = layout.velocity;
  const ScalarSpace& ps = layout.pressure;
  const ScalarSpace& cs = layout.concentration;
  const int nv = vs.dofs_per_cell, np = ps.dofs_per_cell, nc = cs.dofs_per_cell;
  const int lu1 = 0, lu2 = nv, lp = 2 * nv, lc = 2 * nv + np;
  const int nt = 2 * nv + np + nc;

  out.rhs = Eigen::VectorXd::Zero(layout.total);
  out.k_triplets.reserve((end - begin) * static_cast<size_t>(nt) * nt / 2);

  std::vector<double> Kloc(nt * nt), Mloc(nc * nc), floc(nt);
  auto K = [&](int i, int j) -> double& { return Kloc[i * nt + j]; };
  auto Mc = [&](int i, int j) -> double& { return Mloc[i * nc + j]; };

  for (size_t idx = begin; idx < end; ++idx) {
    const int k = elements[idx];
    const Subdomain sub = mesh.subdomain_of[k];
    const CoefficientSet& co = pc.coeffs(sub);
    const StabilizationParams& st =
        ctx.stab ? ctx.stab->for_subdomain(sub) : StabilizationParams{};
    const bool with_stab = ctx.stab != nullptr;

    const double area = mesh.signed_area(k);
    const auto& tri = mesh.triangles[k];
    const auto& q0 = mesh.vertices[tri[0]];
    const auto& q1 = mesh.vertices[tri[1]];
    const auto& q2 = mesh.vertices[tri[2]];

    std::fill(Kloc.begin(), Kloc.end(), 0.0);
    std::fill(Mloc.begin(), Mloc.end(), 0.0);
    std::fill(floc.begin(), floc.end(), 0.0);

    const bool second_derivs_matter =
        (vs.order > 1 || cs.order > 1) || opt.retain_zero_second_derivative_terms;

    for (int q = 0; q < nq; ++q) {
      const auto& bary = ctx.rule.points[q];
      const double w = ctx.rule.weights[q] * 2.0 * area;
      const double x = bary[0] * q0[0] + bary[1] * q1[0] + bary[2] * q2[0];
      const double y = bary[0] * q0[1] + bary[1] * q1[1] + bary[2] * q2[1];

      const BasisEval bv = evaluate_basis(vs, k, bary);
      const BasisEval bp = ps.order == vs.order ? bv : evaluate_basis(ps, k, bary);
      const BasisEval bc = cs.order == vs.order ? bv : evaluate_basis(cs, k, bary);

      // lagged viscosity and advection velocity
      double u1n = 0.0, u2n = 0.0, cn = 0.0, cn_x = 0.0, cn_y = 0.0;
      for (int i = 0; i < nv; ++i) {
        u1n += ctx.lin->u1[vs.cell_dofs[k][i]] * bv.value[i];
        u2n += ctx.lin->u2[vs.cell_dofs[k][i]] * bv.value[i];
      }
      for (int i = 0; i < nc; ++i) {
        const double ci = ctx.lin->c[cs.cell_dofs[k][i]];
        cn += ci * bc.value[i];
        cn_x += ci * bc.grad[i][0];
        cn_y += ci * bc.grad[i][1];
      }
      if (!opt.include_convection) u1n = u2n = 0.0;

      const double mu = viscosity(co, cn);
      // gradient of mu(c^n); bridges the integrated-by-parts viscous term to
      // the non-conservative strong operator -mu Laplace(u)
      const double dmu_x = co.viscosity_b * mu * cn_x;
      const double dmu_y = co.viscosity_b * mu * cn_y;
      const double D1 = co.D1(x, y, ctx.t_theta);
      const double D2 = co.D2(x, y, ctx.t_theta);

      Forcing f = mms_forcing(pc, x, y, ctx.t_target, sub);
      if (ctx.beta_minus != 0.0) {
        const Forcing fp = mms_forcing(pc, x, y, ctx.t_prev, sub);
        f.f1x = ctx.beta_plus * f.f1x + ctx.beta_minus * fp.f1x;
        f.f1y = ctx.beta_plus * f.f1y + ctx.beta_minus * fp.f1y;
        f.f2 = ctx.beta_plus * f.f2 + ctx.beta_minus * fp.f2;
        f.g = ctx.beta_plus * f.g + ctx.beta_minus * fp.g;
      }

      // Galerkin blocks
      for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) {
          const double a = w * (mu * (bv.grad[i][0] * bv.grad[j][0] + bv.grad[i][1] * bv.grad[j][1]) +
                                (dmu_x * bv.grad[j][0] + dmu_y * bv.grad[j][1]) * bv.value[i] +
                                co.sigma * bv.value[i] * bv.value[j]);
          K(lu1 + i, lu1 + j) += a;
          K(lu2 + i, lu2 + j) += a;
        }
        if (opt.include_pressure_coupling) {
          for (int j = 0; j < np; ++j) {
            K(lu1 + i, lp + j) -= w * bv.grad[i][0] * bp.value[j];
            K(lu2 + i, lp + j) -= w * bv.grad[i][1] * bp.value[j];
          }
        }
        floc[lu1 + i] += w * f.f1x * bv.value[i];
        floc[lu2 + i] += w * f.f1y * bv.value[i];
      }
      if (opt.include_pressure_coupling) {
        for (int i = 0; i < np; ++i)
          for (int j = 0; j < nv; ++j) {
            K(lp + i, lu1 + j) += w * bp.value[i] * bv.grad[j][0];
            K(lp + i, lu2 + j) += w * bp.value[i] * bv.grad[j][1];
          }
      }
      for (int i = 0; i < np; ++i) floc[lp + i] += w * f.f2 * bp.value[i];
      for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nc; ++j) {
          K(lc + i, lc + j) +=
              w * (D1 * bc.grad[i][0] * bc.grad[j][0] + D2 * bc.grad[i][1] * bc.grad[j][1] +
                   bc.value[i] * (u1n * bc.grad[j][0] + u2n * bc.grad[j][1]) +
                   co.alpha * bc.value[i] * bc.value[j]);
          Mc(i, j) += w * co.phi * bc.value[i] * bc.value[j];
        }
        floc[lc + i] += w * f.g * bc.value[i];
      }

      if (!with_stab) continue;

      // Strong-operator tables. For order-1 fields the basis second
      // derivatives vanish, so the Laplacian pieces drop out.
      std::array<double, 6> lap_v{}, lap_c{};
      if (second_derivs_matter) {
        for (int i = 0; i < nv; ++i) lap_v[i] = bv.hess[i][0] + bv.hess[i][1];
        for (int i = 0; i < nc; ++i) lap_c[i] = D1 * bc.hess[i][0] + D2 * bc.hess[i][1];
      }

      // Momentum residuals against their adjoint weights.
      const double tau1 = st.tau1;
      if (tau1 != 0.0) {
        std::array<double, 6> A_row{}, S_col{};
        for (int i = 0; i < nv; ++i) {
          A_row[i] = mu * lap_v[i] - co.sigma * bv.value[i];  // test weight
          S_col[i] = -mu * lap_v[i] + co.sigma * bv.value[i];  // trial operator
        }
        for (int comp = 0; comp < 2; ++comp) {
          const int lrow = comp == 0 ? lu1 : lu2;
          const int gdir = comp;  // pressure derivative direction
          const double fcomp = comp == 0 ? f.f1x : f.f1y;
          for (int i = 0; i < nv; ++i) {
            const double wi = w * tau1 * A_row[i];
            for (int j = 0; j < nv; ++j) K(lrow + i, lrow + j) += wi * S_col[j];
            for (int j = 0; j < np; ++j) K(lrow + i, lp + j) += wi * bp.grad[j][gdir];
            floc[lrow + i] += wi * fcomp;
          }
          for (int i = 0; i < np; ++i) {
            const double wi = w * tau1 * bp.grad[i][gdir];
            for (int j = 0; j < nv; ++j) K(lp + i, lrow + j) += wi * S_col[j];
            for (int j = 0; j < np; ++j) K(lp + i, lp + j) += wi * bp.grad[j][gdir];
            floc[lp + i] += wi * fcomp;
          }
        }
      }

      // Continuity residual against the divergence of the velocity test pair.
      const double tau2 = st.tau2;
      if (tau2 != 0.0) {
        for (int i = 0; i < nv; ++i) {
          const double wx = w * tau2 * bv.grad[i][0];
          const double wy = w * tau2 * bv.grad[i][1];
          for (int j = 0; j < nv; ++j) {
            K(lu1 + i, lu1 + j) += wx * bv.grad[j][0];
            K(lu1 + i, lu2 + j) += wx * bv.grad[j][1];
            K(lu2 + i, lu1 + j) += wy * bv.grad[j][0];
            K(lu2 + i, lu2 + j) += wy * bv.grad[j][1];
          }
          floc[lu1 + i] += wx * f.f2;
          floc[lu2 + i] += wy * f.f2;
        }
      }

      // Transport residual; the subscale series is folded into the two
      // derived coefficients.
      const double ga = st.transport_adjoint_coef;
      const double gp = st.transport_plain_coef;
      if (ga != 0.0 || gp != 0.0) {
        std::array<double, 6> T_row{}, S_col{};
        for (int i = 0; i < nc; ++i) {
          const double conv = u1n * bc.grad[i][0] + u2n * bc.grad[i][1];
          T_row[i] = lap_c[i] + conv - co.alpha * bc.value[i];
          S_col[i] = -lap_c[i] + conv + co.alpha * bc.value[i];
        }
        for (int i = 0; i < nc; ++i) {
          const double wa = w * ga * T_row[i];
          const double wp = w * gp * bc.value[i];
          for (int j = 0; j < nc; ++j) {
            K(lc + i, lc + j) += (wa - wp) * S_col[j];
            Mc(i, j) += (wa - wp) * co.phi * bc.value[j];
          }
          floc[lc + i] += (wa - wp) * f.g;
        }
      }
    }

    // scatter
    auto gdof = [&](int local) -> int {
      if (local < lu2) return layout.global(FieldU1, vs.cell_dofs[k][local]);
      if (local < lp) return layout.global(FieldU2, vs.cell_dofs[k][local - lu2]);
      if (local < lc) return layout.global(FieldP, ps.cell_dofs[k][local - lp]);
      return layout.global(FieldC, cs.cell_dofs[k][local - lc]);
    };
    for (int i = 0; i < nt; ++i) {
      const int gi = gdof(i);
      const bool row_flow = i < lc;
      for (int j = 0; j < nt; ++j) {
        // flow and transport rows never couple across fields within a step
        // (viscosity and advection are lagged), skip those blocks
        if (row_flow != (j < lc)) continue;
        out.k_triplets.emplace_back(gi, gdof(j), K(i, j));
      }
      out.rhs[gi] += floc[i];
    }
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j)
        out.m_triplets.emplace_back(gdof(lc + i), gdof(lc + j), Mc(i, j));
  }
}

std::vector<Triplet> bjs_triplets(const CoupledLayout& layout,
                                  const std::vector<InterfaceEdge>& edges, double alpha_bjs,
                                  double sigma_B) {
  if (!(sigma_B > 0.0))
    throw std::invalid_argument("interface BJS term requires sigma_B > 0");
  const ScalarSpace& vs = layout.velocity;
  const Mesh& mesh = *layout.mesh;
  const double coef = alpha_bjs / std::sqrt(sigma_B);
  const LineRule lr = line_rule(3);

  std::vector<Triplet> trips;
  for (const auto& e : edges) {
    const auto& pa = mesh.vertices[e.a];
    const auto& pb = mesh.vertices[e.b];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    const double tx = -e.normal_y, ty = e.normal_x;

    std::vector<int> dofs = {e.a, e.b};
    if (vs.order == 2)
      dofs.push_back(vs.edge_dof.at({std::min(e.a, e.b), std::max(e.a, e.b)}));
    const int nd = static_cast<int>(dofs.size());

    for (size_t q = 0; q < lr.points.size(); ++q) {
      const double s = lr.points[q];
      const double w = lr.weights[q] * len * coef;
      std::array<double, 3> N{};
      if (vs.order == 1) {
        N = {1.0 - s, s, 0.0};
      } else {
        N = {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
      }
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          const double m = w * N[i] * N[j];
          trips.emplace_back(layout.global(FieldU1, dofs[i]), layout.global(FieldU1, dofs[j]),
                             m * tx * tx);
          trips.emplace_back(layout.global(FieldU1, dofs[i]), layout.global(FieldU2, dofs[j]),
                             m * tx * ty);
          trips.emplace_back(layout.global(FieldU2, dofs[i]), layout.global(FieldU1, dofs[j]),
                             m * ty * tx);
          trips.emplace_back(layout.global(FieldU2, dofs[i]), layout.global(FieldU2, dofs[j]),
                             m * ty * ty);
        }
      }
    }
  }
  return trips;
}

void add_boundary_flux(const AssemblyContext& ctx, Eigen::VectorXd& rhs) {
  const ProblemCase& pc = *ctx.pc;
  const CoupledLayout& layout = *ctx.layout;
  const ScalarSpace& cs = layout.concentration;
  const Mesh& mesh = *layout.mesh;
  const LineRule lr = line_rule(3);

  auto normal_of = [](BoundaryTag t) -> std::array<double, 2> {
    switch (t) {
      case BoundaryTag::Left: return {-1.0, 0.0};
      case BoundaryTag::Right: return {1.0, 0.0};
      case BoundaryTag::Bottom: return {0.0, -1.0};
      default: return {0.0, 1.0};
    }
  };

  for (const auto& be : mesh.boundary_edges) {
    const auto& pa = mesh.vertices[be.a];
    const auto& pb = mesh.vertices[be.b];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    const auto n = normal_of(be.tag);

    std::vector<int> dofs = {be.a, be.b};
    if (cs.order == 2)
      dofs.push_back(cs.edge_dof.at({std::min(be.a, be.b), std::max(be.a, be.b)}));

    for (size_t q = 0; q < lr.points.size(); ++q) {
      const double s = lr.points[q];
      const double x = pa[0] + s * (pb[0] - pa[0]);
      const double y = pa[1] + s * (pb[1] - pa[1]);
      double flux = ctx.beta_plus * pc.boundary_flux(x, y, ctx.t_target, n[0], n[1]);
      if (ctx.beta_minus != 0.0)
        flux += ctx.beta_minus * pc.boundary_flux(x, y, ctx.t_prev, n[0], n[1]);
      const double w = lr.weights[q] * len * flux;
      std::array<double, 3> N{};
      if (cs.order == 1) {
        N = {1.0 - s, s, 0.0};
      } else {
        N = {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
      }
      for (size_t i = 0; i < dofs.size(); ++i)
        rhs[layout.global(FieldC, dofs[i])] += w * N[i];
    }
  }
}

std::vector<std::pair<int, double>> dirichlet_constraints(const CoupledLayout& layout,
                                                          const ProblemCase& pc, double t_target,
                                                          const AssemblyOptions& opt) {
  std::vector<std::pair<int, double>> cons;
  const ScalarSpace& vs = layout.velocity;
  for (int d : vs.all_boundary_dofs) {
    const ExactValues v = pc.exact.at(vs.dof_coords[d][0], vs.dof_coords[d][1], t_target);
    cons.emplace_back(layout.global(FieldU1, d), v.u1);
    cons.emplace_back(layout.global(FieldU2, d), v.u2);
  }
  if (opt.pin_pressure) {
    const int d = opt.pressure_pin_dof;
    const ExactValues v =
        pc.exact.at(layout.pressure.dof_coords[d][0], layout.pressure.dof_coords[d][1], t_target);
    cons.emplace_back(layout.global(FieldP, d), v.p);
  }
  return cons;
}

}  // namespace

AssembledSystem assemble_system(const CoupledLayout& layout, const ProblemCase& pc,
                                const State& prev, double t_target, double dt, double theta,
                                const StabilizationSet* stab, const AssemblyOptions& opt,
                                const State* linearize) {
  if (!(dt > 0.0)) throw std::invalid_argument("assemble_system: dt must be positive");
  if (theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("assemble_system: theta must lie in [0,1]");
  const bool stationary = std::isinf(dt);
  if (stationary && theta != 1.0)
    throw std::invalid_argument("assemble_system: stationary solves require theta = 1");
  if (pc.has_interface && layout.mesh->interface_edges.empty())
    throw std::invalid_argument("assemble_system: interface case on a mesh without interface edges");

  AssemblyContext ctx;
  ctx.layout = &layout;
  ctx.pc = &pc;
  ctx.prev = &prev;
  ctx.lin = linearize ? linearize : &prev;
  ctx.t_target = t_target;
  ctx.t_prev = stationary ? t_target : t_target - dt;
  ctx.beta_plus = 0.5 * (1.0 + theta);
  ctx.beta_minus = 0.5 * (1.0 - theta);
  ctx.t_theta = ctx.beta_plus * t_target + ctx.beta_minus * ctx.t_prev;
  ctx.stab = stab;
  ctx.opt = &opt;
  ctx.rule = triangle_rule(opt.quadrature_degree);
  ctx.stationary = stationary;

  const int nel = layout.mesh->num_triangles();
  std::vector<int> order = opt.element_order;
  if (order.empty()) {
    order.resize(nel);
    std::iota(order.begin(), order.end(), 0);
  }

  int nthreads = std::max(1, opt.num_threads);
  nthreads = std::min<int>(nthreads, std::max(1, nel / 64));

  std::vector<WorkerOutput> parts(nthreads);
  if (nthreads == 1) {
    assemble_elements(ctx, order, 0, order.size(), parts[0]);
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (order.size() + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const size_t b = std::min(order.size(), t * chunk);
      const size_t e = std::min(order.size(), (t + 1) * chunk);
      pool.emplace_back(assemble_elements, std::cref(ctx), std::cref(order), b, e,
                        std::ref(parts[t]));
    }
    for (auto& th : pool) th.join();
  }

  // merge worker buffers in chunk order so any thread count reproduces the
  // serial accumulation order exactly
  std::vector<Triplet> k_trips, m_trips;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(layout.total);
  for (auto& p : parts) {
    k_trips.insert(k_trips.end(), p.k_triplets.begin(), p.k_triplets.end());
    m_trips.insert(m_trips.end(), p.m_triplets.begin(), p.m_triplets.end());
    if (p.rhs.size() == layout.total) f += p.rhs;
  }

  if (pc.has_interface) {
    const auto bt = bjs_triplets(layout, layout.mesh->interface_edges, pc.alpha_bjs,
                                 pc.coeff_brinkman.sigma);
    k_trips.insert(k_trips.end(), bt.begin(), bt.end());
  }

  // guaranteed diagonal slots
  for (int i = 0; i < layout.total; ++i) k_trips.emplace_back(i, i, 0.0);

  SparseMatrix K(layout.total, layout.total);
  K.setFromTriplets(k_trips.begin(), k_trips.end());
  SparseMatrix M(layout.total, layout.total);
  M.setFromTriplets(m_trips.begin(), m_trips.end());

  const double inv_dt = stationary ? 0.0 : 1.0 / dt;

  AssembledSystem sys;
  sys.matrix = ctx.beta_plus * K + inv_dt * M;
  sys.rhs = f;
  if (inv_dt != 0.0) sys.rhs += inv_dt * (M * prev.pack());
  if (ctx.beta_minus != 0.0) sys.rhs -= ctx.beta_minus * (K * prev.pack());
  if (pc.boundary_flux) add_boundary_flux(ctx, sys.rhs);
  sys.constraints = dirichlet_constraints(layout, pc, t_target, opt);
  return sys;
}

AssembledSystem assemble_galerkin(const CoupledLayout& layout, const ProblemCase& pc,
                                  const State& prev, double t_target, double dt, double theta,
                                  const AssemblyOptions& opt) {
  return assemble_system(layout, pc, prev, t_target, dt, theta, nullptr, opt);
}

AssembledSystem assemble_asgs(const CoupledLayout& layout, const ProblemCase& pc,
                              const State& prev, double t_target, double dt, double theta,
                              const StabilizationSet& stab, const AssemblyOptions& opt) {
  return assemble_system(layout, pc, prev, t_target, dt, theta, &stab, opt);
}

void assemble_interface_bjs(AssembledSystem& system, const CoupledLayout& layout,
                            const std::vector<InterfaceEdge>& edges, double alpha_bjs,
                            double sigma_B) {
  if (edges.empty())
    throw std::invalid_argument("assemble_interface_bjs: no interface edges");
  const auto trips = bjs_triplets(layout, edges, alpha_bjs, sigma_B);
  SparseMatrix B(system.matrix.rows(), system.matrix.cols());
  B.setFromTriplets(trips.begin(), trips.end());
  system.matrix = system.matrix + B;
}

void apply_dirichlet(AssembledSystem& system,
                     const std::vector<std::pair<int, double>>& constraints) {
  const Eigen::Index n = system.matrix.rows();
  std::vector<char> fixed(n, 0);
  std::vector<double> value(n, 0.0);
  for (const auto& [dof, g] : constraints) {
    if (dof < 0 || dof >= n) throw std::invalid_argument("apply_dirichlet: dof out of range");
    if (fixed[dof] && value[dof] != g)
      throw std::invalid_argument("apply_dirichlet: conflicting constraint values at dof " +
                                  std::to_string(dof));
    fixed[dof] = 1;
    value[dof] = g;
  }

  SparseMatrix& A = system.matrix;
  for (Eigen::Index r = 0; r < n; ++r) {
    const bool row_fixed = fixed[r];
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
      if (row_fixed) {
        it.valueRef() = it.col() == r ? 1.0 : 0.0;
      } else if (fixed[it.col()]) {
        system.rhs[r] -= it.value() * value[it.col()];
        it.valueRef() = 0.0;
      }
    }
    if (row_fixed) system.rhs[r] = value[r];
  }
}

void apply_dirichlet(AssembledSystem& system) { apply_dirichlet(system, system.constraints); }

}  // namespace sbtrans

#include "sbtrans/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sbtrans {

namespace {

// Gradients of the barycentric coordinates, constant on each triangle.
std::array<std::array<double, 2>, 3> barycentric_gradients(const Mesh& mesh, int tri) {
  const auto& t = mesh.triangles[tri];
  const auto& p0 = mesh.vertices[t[0]];
  const auto& p1 = mesh.vertices[t[1]];
  const auto& p2 = mesh.vertices[t[2]];
  const double det =
      (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  std::array<std::array<double, 2>, 3> g;
  g[0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det};
  g[1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det};
  g[2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det};
  return g;
}

constexpr std::array<std::array<int, 2>, 3> kLocalEdges = {{{0, 1}, {1, 2}, {2, 0}}};

}  // namespace

ScalarSpace build_space(const Mesh& mesh, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("build_space: order must be 1 or 2");

  ScalarSpace s;
  s.mesh = &mesh;
  s.order = order;
  s.dofs_per_cell = order == 1 ? 3 : 6;

  const int nv = mesh.num_vertices();
  s.cell_dofs.resize(mesh.num_triangles());
  s.dof_coords.assign(mesh.vertices.begin(), mesh.vertices.end());

  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangles[k];
    auto& cd = s.cell_dofs[k];
    cd = {t[0], t[1], t[2], -1, -1, -1};
    if (order == 2) {
      for (int e = 0; e < 3; ++e) {
        const int a = t[kLocalEdges[e][0]];
        const int b = t[kLocalEdges[e][1]];
        const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        auto [it, inserted] =
            s.edge_dof.try_emplace(key, nv + static_cast<int>(s.edge_dof.size()));
        if (inserted) {
          s.dof_coords.push_back({0.5 * (mesh.vertices[a][0] + mesh.vertices[b][0]),
                                  0.5 * (mesh.vertices[a][1] + mesh.vertices[b][1])});
        }
        cd[3 + e] = it->second;
      }
    }
  }
  s.num_dofs = static_cast<int>(s.dof_coords.size());

  auto tag_index = [](BoundaryTag t) { return static_cast<int>(t); };
  for (const auto& be : mesh.boundary_edges) {
    auto& dofs = s.boundary_dofs[tag_index(be.tag)];
    dofs.push_back(be.a);
    dofs.push_back(be.b);
    if (order == 2) {
      const std::pair<int, int> key{std::min(be.a, be.b), std::max(be.a, be.b)};
      dofs.push_back(s.edge_dof.at(key));
    }
  }
  for (auto& dofs : s.boundary_dofs) {
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    s.all_boundary_dofs.insert(s.all_boundary_dofs.end(), dofs.begin(), dofs.end());
  }
  std::sort(s.all_boundary_dofs.begin(), s.all_boundary_dofs.end());
  s.all_boundary_dofs.erase(std::unique(s.all_boundary_dofs.begin(), s.all_boundary_dofs.end()),
                            s.all_boundary_dofs.end());
  return s;
}

BasisEval evaluate_basis(const ScalarSpace& space, int tri, const std::array<double, 3>& bary) {
  const double sum = bary[0] + bary[1] + bary[2];
  constexpr double eps = 1e-12;
  if (std::abs(sum - 1.0) > 1e-10 || bary[0] < -eps || bary[1] < -eps || bary[2] < -eps)
    throw std::invalid_argument("evaluate_basis: point outside element");

  const auto g = barycentric_gradients(*space.mesh, tri);
  BasisEval r;
  r.n = space.dofs_per_cell;
  if (space.order == 1) {
    for (int i = 0; i < 3; ++i) {
      r.value[i] = bary[i];
      r.grad[i] = g[i];
      r.hess[i] = {0.0, 0.0, 0.0};
    }
    return r;
  }
  for (int i = 0; i < 3; ++i) {
    r.value[i] = bary[i] * (2.0 * bary[i] - 1.0);
    r.grad[i] = {(4.0 * bary[i] - 1.0) * g[i][0], (4.0 * bary[i] - 1.0) * g[i][1]};
    r.hess[i] = {4.0 * g[i][0] * g[i][0], 4.0 * g[i][1] * g[i][1], 4.0 * g[i][0] * g[i][1]};
  }
  for (int e = 0; e < 3; ++e) {
    const int a = kLocalEdges[e][0];
    const int b = kLocalEdges[e][1];
    r.value[3 + e] = 4.0 * bary[a] * bary[b];
    r.grad[3 + e] = {4.0 * (bary[b] * g[a][0] + bary[a] * g[b][0]),
                     4.0 * (bary[b] * g[a][1] + bary[a] * g[b][1])};
    r.hess[3 + e] = {8.0 * g[a][0] * g[b][0], 8.0 * g[a][1] * g[b][1],
                     4.0 * (g[a][0] * g[b][1] + g[a][1] * g[b][0])};
  }
  return r;
}

Eigen::VectorXd interpolate(const ScalarSpace& space,
                            const std::function<double(double, double, double)>& f, double t) {
  Eigen::VectorXd v(space.num_dofs);
  for (int i = 0; i < space.num_dofs; ++i)
    v[i] = f(space.dof_coords[i][0], space.dof_coords[i][1], t);
  return v;
}

double eval_fe(const ScalarSpace& space, const Eigen::VectorXd& coeffs, int tri,
               const std::array<double, 3>& bary) {
  const BasisEval b = evaluate_basis(space, tri, bary);
  double v = 0.0;
  for (int i = 0; i < b.n; ++i) v += coeffs[space.cell_dofs[tri][i]] * b.value[i];
  return v;
}

std::array<double, 2> eval_fe_grad(const ScalarSpace& space, const Eigen::VectorXd& coeffs,
                                   int tri, const std::array<double, 3>& bary) {
  const BasisEval b = evaluate_basis(space, tri, bary);
  std::array<double, 2> gval = {0.0, 0.0};
  for (int i = 0; i < b.n; ++i) {
    gval[0] += coeffs[space.cell_dofs[tri][i]] * b.grad[i][0];
    gval[1] += coeffs[space.cell_dofs[tri][i]] * b.grad[i][1];
  }
  return gval;
}

CoupledLayout build_layout(const Mesh& mesh, int velocity_order, int concentration_order,
                           const std::array<int, 4>& block_order) {
  CoupledLayout l;
  l.mesh = &mesh;
  l.velocity = build_space(mesh, velocity_order);
  l.pressure = build_space(mesh, 1);
  l.concentration = build_space(mesh, concentration_order);
  l.block_order = block_order;
  int at = 0;
  for (int slot = 0; slot < 4; ++slot) {
    const FieldId f = static_cast<FieldId>(block_order[slot]);
    l.offset[f] = at;
    at += l.space(f).num_dofs;
  }
  l.total = at;
  return l;
}

State State::zero(const CoupledLayout& layout, double t) {
  State s;
  s.layout = &layout;
  s.u1 = Eigen::VectorXd::Zero(layout.velocity.num_dofs);
  s.u2 = Eigen::VectorXd::Zero(layout.velocity.num_dofs);
  s.p = Eigen::VectorXd::Zero(layout.pressure.num_dofs);
  s.c = Eigen::VectorXd::Zero(layout.concentration.num_dofs);
  s.time = t;
  return s;
}

Eigen::VectorXd& State::field(FieldId f) {
  switch (f) {
    case FieldU1: return u1;
    case FieldU2: return u2;
    case FieldP: return p;
    default: return c;
  }
}

const Eigen::VectorXd& State::field(FieldId f) const {
  return const_cast<State*>(this)->field(f);
}

Eigen::VectorXd State::pack() const {
  Eigen::VectorXd x(layout->total);
  for (int f = 0; f < 4; ++f) {
    const FieldId id = static_cast<FieldId>(f);
    x.segment(layout->offset[id], field(id).size()) = field(id);
  }
  return x;
}

State State::unpack(const CoupledLayout& layout, const Eigen::VectorXd& x, double t) {
  State s = zero(layout, t);
  for (int f = 0; f < 4; ++f) {
    const FieldId id = static_cast<FieldId>(f);
    s.field(id) = x.segment(layout.offset[id], s.field(id).size());
  }
  return s;
}

bool State::all_finite() const {
  return u1.allFinite() && u2.allFinite() && p.allFinite() && c.allFinite();
}

}  // namespace sbtrans

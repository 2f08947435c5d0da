#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "sbtrans/mesh.hpp"

namespace sbtrans {

/// Continuous Lagrange space of order 1 or 2 on a triangulation. Order 1 puts
/// dofs at vertices, order 2 adds one dof per edge midpoint. Immutable.
struct ScalarSpace {
  const Mesh* mesh = nullptr;
  int order = 1;
  int dofs_per_cell = 3;
  int num_dofs = 0;
  std::vector<std::array<int, 6>> cell_dofs;       // first dofs_per_cell used
  std::vector<std::array<double, 2>> dof_coords;
  std::array<std::vector<int>, 4> boundary_dofs;   // indexed by BoundaryTag
  std::vector<int> all_boundary_dofs;              // sorted union
  std::map<std::pair<int, int>, int> edge_dof;     // order 2 only, key sorted
};

ScalarSpace build_space(const Mesh& mesh, int order);

/// Shape function values, physical gradients and (for order 2) constant
/// physical second derivatives at one barycentric point of one triangle.
struct BasisEval {
  int n = 0;
  std::array<double, 6> value{};
  std::array<std::array<double, 2>, 6> grad{};   // (d/dx, d/dy)
  std::array<std::array<double, 3>, 6> hess{};   // (dxx, dyy, dxy)
};

/// Throws if the barycentric point lies outside the element.
BasisEval evaluate_basis(const ScalarSpace& space, int tri, const std::array<double, 3>& bary);

/// Nodal interpolation of f(x, y, t) at the dof coordinates.
Eigen::VectorXd interpolate(const ScalarSpace& space,
                            const std::function<double(double, double, double)>& f, double t);

double eval_fe(const ScalarSpace& space, const Eigen::VectorXd& coeffs, int tri,
               const std::array<double, 3>& bary);
std::array<double, 2> eval_fe_grad(const ScalarSpace& space, const Eigen::VectorXd& coeffs,
                                   int tri, const std::array<double, 3>& bary);

enum FieldId : int { FieldU1 = 0, FieldU2 = 1, FieldP = 2, FieldC = 3 };

/// Block layout of the monolithic unknown (u1, u2, p, c). Velocity components
/// share one scalar space; pressure is always order 1. The block order is
/// (u1, u2, p, c) unless an explicit permutation is supplied.
struct CoupledLayout {
  const Mesh* mesh = nullptr;
  ScalarSpace velocity;
  ScalarSpace pressure;
  ScalarSpace concentration;
  std::array<int, 4> offset{};        // by FieldId
  std::array<int, 4> block_order{};   // FieldId occupying each block slot
  int total = 0;

  const ScalarSpace& space(FieldId f) const {
    return f == FieldP ? pressure : (f == FieldC ? concentration : velocity);
  }
  int global(FieldId f, int local) const { return offset[f] + local; }
};

CoupledLayout build_layout(const Mesh& mesh, int velocity_order = 1, int concentration_order = 1,
                           const std::array<int, 4>& block_order = {0, 1, 2, 3});

/// Nodal coefficients of all four fields at one time level.
struct State {
  const CoupledLayout* layout = nullptr;
  Eigen::VectorXd u1, u2, p, c;
  double time = 0.0;

  static State zero(const CoupledLayout& layout, double t = 0.0);
  Eigen::VectorXd& field(FieldId f);
  const Eigen::VectorXd& field(FieldId f) const;
  Eigen::VectorXd pack() const;
  static State unpack(const CoupledLayout& layout, const Eigen::VectorXd& x, double t);
  bool all_finite() const;
};

}  // namespace sbtrans

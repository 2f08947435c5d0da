#include "sbtrans/mesh.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sbtrans {

double Mesh::signed_area(int tri) const {
  const auto& t = triangles[tri];
  const auto& p0 = vertices[t[0]];
  const auto& p1 = vertices[t[1]];
  const auto& p2 = vertices[t[2]];
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

double Mesh::longest_edge(int tri) const {
  const auto& t = triangles[tri];
  double best = 0.0;
  for (int e = 0; e < 3; ++e) {
    const auto& pa = vertices[t[e]];
    const auto& pb = vertices[t[(e + 1) % 3]];
    best = std::max(best, std::hypot(pb[0] - pa[0], pb[1] - pa[1]));
  }
  return best;
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (int k = 0; k < num_triangles(); ++k) sum += signed_area(k);
  return sum;
}

int Mesh::locate(double x, double y) const {
  const double hx = rect.width() / nx;
  const double hy = rect.height() / ny;
  int i = static_cast<int>(std::floor((x - rect.x0) / hx));
  int j = static_cast<int>(std::floor((y - rect.y0) / hy));
  i = std::clamp(i, 0, nx - 1);
  j = std::clamp(j, 0, ny - 1);
  const double s = (x - (rect.x0 + i * hx)) / hx;
  const double t = (y - (rect.y0 + j * hy)) / hy;
  // Cells are cut along the (0,0)-(1,1) diagonal: lower triangle covers s >= t.
  return 2 * (j * nx + i) + (t > s ? 1 : 0);
}

Mesh build_structured_mesh(int nx, int ny, const Rect& rect) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_structured_mesh: resolution must be positive");
  if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0))
    throw std::invalid_argument("build_structured_mesh: degenerate rectangle");

  Mesh m;
  m.nx = nx;
  m.ny = ny;
  m.rect = rect;

  const double hx = rect.width() / nx;
  const double hy = rect.height() / ny;

  m.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({rect.x0 + i * hx, rect.y0 + j * hy});

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

  m.triangles.reserve(static_cast<size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j);
      const int v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1);
      const int v11 = vid(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});  // lower
      m.triangles.push_back({v00, v11, v01});  // upper
    }
  }
  m.subdomain_of.assign(m.triangles.size(), Subdomain::Unified);

  // Boundary edges, oriented counterclockwise around the rectangle. Lower
  // triangles own the bottom and right edges of their cell, upper ones the
  // top and left.
  for (int i = 0; i < nx; ++i)
    m.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), BoundaryTag::Bottom, 2 * i});
  for (int j = 0; j < ny; ++j)
    m.boundary_edges.push_back(
        {vid(nx, j), vid(nx, j + 1), BoundaryTag::Right, 2 * (j * nx + nx - 1)});
  for (int i = nx; i > 0; --i)
    m.boundary_edges.push_back(
        {vid(i, ny), vid(i - 1, ny), BoundaryTag::Top, 2 * ((ny - 1) * nx + i - 1) + 1});
  for (int j = ny; j > 0; --j)
    m.boundary_edges.push_back({vid(0, j), vid(0, j - 1), BoundaryTag::Left, 2 * ((j - 1) * nx) + 1});

  double hmax = 0.0;
  double amin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m.num_triangles(); ++k) {
    const double d = m.longest_edge(k);
    hmax = std::max(hmax, d);
    amin = std::min(amin, 2.0 * m.signed_area(k) / d);  // altitude on the longest edge
  }
  m.h = hmax;
  m.h_min = amin;
  return m;
}

Mesh partition_interface(Mesh mesh, Axis axis, double coord) {
  const int n = axis == Axis::X ? mesh.nx : mesh.ny;
  const double lo = axis == Axis::X ? mesh.rect.x0 : mesh.rect.y0;
  const double len = axis == Axis::X ? mesh.rect.width() : mesh.rect.height();
  const double step = len / n;

  const double tol = 1e-12 * std::max(1.0, len);
  int line = -1;
  for (int i = 1; i < n; ++i) {
    if (std::abs(coord - (lo + i * step)) <= tol) {
      line = i;
      break;
    }
  }
  if (line < 0)
    throw std::invalid_argument("partition_interface: split must lie on an interior grid line");

  auto vid = [&mesh](int i, int j) { return j * (mesh.nx + 1) + i; };
  auto lower_tri = [&mesh](int i, int j) { return 2 * (j * mesh.nx + i); };
  auto upper_tri = [&mesh](int i, int j) { return 2 * (j * mesh.nx + i) + 1; };

  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      const int cell_index = axis == Axis::X ? i : j;
      const Subdomain s = cell_index < line ? Subdomain::Stokes : Subdomain::Brinkman;
      mesh.subdomain_of[lower_tri(i, j)] = s;
      mesh.subdomain_of[upper_tri(i, j)] = s;
    }
  }

  mesh.interface_edges.clear();
  if (axis == Axis::X) {
    for (int j = 0; j < mesh.ny; ++j) {
      InterfaceEdge e;
      e.a = vid(line, j);
      e.b = vid(line, j + 1);
      e.tri_stokes = lower_tri(line - 1, j);   // right edge of the left cell
      e.tri_brinkman = upper_tri(line, j);     // left edge of the right cell
      e.normal_x = 1.0;
      e.normal_y = 0.0;
      mesh.interface_edges.push_back(e);
    }
  } else {
    for (int i = 0; i < mesh.nx; ++i) {
      InterfaceEdge e;
      e.a = vid(i, line);
      e.b = vid(i + 1, line);
      e.tri_stokes = upper_tri(i, line - 1);   // top edge of the cell below
      e.tri_brinkman = lower_tri(i, line);     // bottom edge of the cell above
      e.normal_x = 0.0;
      e.normal_y = 1.0;
      mesh.interface_edges.push_back(e);
    }
  }
  return mesh;
}

void write_mesh_text(const Mesh& mesh, std::ostream& out) {
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace sbtrans

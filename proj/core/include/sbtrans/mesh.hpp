#pragma once

#include <array>
#include <iosfwd>
#include <vector>

namespace sbtrans {

enum class BoundaryTag { Left, Right, Bottom, Top };
enum class Subdomain { Unified, Stokes, Brinkman };
enum class Axis { X, Y };

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct BoundaryEdge {
  int a = -1, b = -1;   // vertex indices, oriented along the boundary
  BoundaryTag tag = BoundaryTag::Left;
  int tri = -1;         // the unique adjacent triangle
};

/// Edge on the Stokes/Brinkman interface. The stored normal points out of
/// the Stokes subdomain, so n_B = -n_S.
struct InterfaceEdge {
  int a = -1, b = -1;
  int tri_stokes = -1;
  int tri_brinkman = -1;
  double normal_x = 0.0, normal_y = 0.0;
};

/// Structured triangulation of an axis-aligned rectangle. Every cell is split
/// along its bottom-left to top-right diagonal, so meshes are deterministic
/// for a given resolution. Immutable once built.
struct Mesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;   // CCW vertex triples
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<Subdomain> subdomain_of;         // per triangle
  std::vector<InterfaceEdge> interface_edges;
  double h = 0.0;      // max element diameter
  double h_min = 0.0;  // smallest element altitude; the inverse-inequality
                       // length scale the stabilization parameters use
  int nx = 0, ny = 0;
  Rect rect;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double signed_area(int tri) const;
  double longest_edge(int tri) const;

  /// Triangle containing (x, y), resolved through the structured layout.
  int locate(double x, double y) const;

  /// Total mesh area, summed over triangles.
  double total_area() const;
};

/// Builds an nx-by-ny structured mesh of `rect`. Throws std::invalid_argument
/// for non-positive resolutions or a degenerate rectangle.
Mesh build_structured_mesh(int nx, int ny, const Rect& rect = Rect{});

/// Labels triangles on the low side of the split Stokes and the rest
/// Brinkman, and records the conforming interface edges. The split coordinate
/// must lie on an interior grid line (within 1e-12), otherwise throws.
Mesh partition_interface(Mesh mesh, Axis axis, double coord);

/// Plain-text dump: one "x y" line per vertex, then one "i j k" line per
/// triangle (0-based indices).
void write_mesh_text(const Mesh& mesh, std::ostream& out);

}  // namespace sbtrans

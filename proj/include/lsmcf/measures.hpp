#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lsmcf/grid.hpp"

namespace lsmcf {

// Zero level set of a field: closed/open polylines in 2D (marching squares),
// a triangle soup with shared vertices in 3D (marching cubes).
struct FrontMesh {
  int dim = 2;
  std::vector<Vec> vertices;
  std::vector<std::vector<std::uint32_t>> polylines;  // 2D
  std::vector<bool> closed;                           // 2D, one flag per polyline
  std::vector<std::array<std::uint32_t, 3>> triangles;  // 3D

  bool empty() const { return vertices.empty(); }
};

// Vertices sit on grid edges where (v >= level) changes, placed by linear
// interpolation. Faces with four crossings are resolved with the asymptotic
// decider, which both adjacent cells evaluate identically, so 3D meshes are
// watertight away from the domain boundary.
FrontMesh extract_front(const ScalarField& v, double level = 0.0);

// Total polyline length (2D) or triangle area (3D); EmptyMesh when empty.
double front_measure(const FrontMesh& mesh);

// Area/volume of {v >= 0}: every cell is split into simplices (2 triangles or
// 6 tetrahedra along the main diagonal) and the part where the linear
// interpolant is nonnegative is measured exactly.
double enclosed_measure(const ScalarField& v);

// L^2 / (4 pi A) of the single closed front of a 2D field. Throws EmptyMesh or
// MultipleComponents.
double isoperimetric_ratio(const ScalarField& v);

// Face-connected components of the node set {v >= 0}.
int component_count(const ScalarField& v);

// A point where `f - level` changes sign along a grid edge.
struct EdgeCrossing {
  Vec position;
  Index node;  // lower endpoint of the edge
  int axis;
  double t;    // fraction along the edge from `node`
};

// All edge crossings of `level` whose position lies within `radius` of
// `center` (every crossing when radius <= 0), in edge order.
std::vector<EdgeCrossing> level_crossings(const ScalarField& f, double level, const Vec& center,
                                          double radius);

}  // namespace lsmcf

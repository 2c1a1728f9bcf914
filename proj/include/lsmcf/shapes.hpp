#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "lsmcf/grid.hpp"

namespace lsmcf {

using Point2 = std::array<double, 2>;

struct Sphere {
  int dim = 3;
  Vec center{};
  double radius = 0.0;
};

// Infinite round cylinder (a strip in 2D).
struct Cylinder {
  int dim = 3;
  Vec axis_point{};
  Vec axis_dir{0.0, 0.0, 1.0};
  double radius = 0.0;
};

struct Torus {
  Vec center{};
  Vec plane_normal{0.0, 0.0, 1.0};
  double major_radius = 0.0;
  double minor_radius = 0.0;
};

// Surface of revolution around the segment joining the two bell centers:
// spherical bells, a constant-radius neck of half-length `neck_halflength`
// centered between them, and concave circular fillets tangent to both.
struct Dumbbell {
  int dim = 3;
  Vec end_a{};
  Vec end_b{};
  double bell_radius = 0.0;
  double neck_radius = 0.0;
  double neck_halflength = 0.0;
};

struct Polygon2D {
  std::vector<Point2> vertices;  // closed implicitly (last joins first)
};

struct ShapeSpec;

struct Union {
  std::vector<ShapeSpec> members;
};

struct Intersection {
  std::vector<ShapeSpec> members;
};

struct ShapeSpec {
  std::variant<Sphere, Cylinder, Torus, Dumbbell, Polygon2D, Union, Intersection> shape;
};

// Spatial dimension a spec lives in; throws InvalidSpec for inconsistent
// compositions.
int shape_dim(const ShapeSpec& spec);
std::string shape_kind(const ShapeSpec& spec);

// Throws InvalidSpec when radii, directions or polygon simplicity are violated.
void validate(const ShapeSpec& spec);

// Signed distance (positive inside). Exact for primitives; max/min of member
// values for Union/Intersection.
double signed_distance(const ShapeSpec& spec, const Vec& p);

ScalarField init_field(const ShapeSpec& spec, const Grid& grid);

// Closed double-walled Archimedean spiral: a channel of width `gap` wound
// `turns` times with walls `gap` apart, capped by semicircles at both ends.
// `grid_h` (when > 0) is the spacing of the target grid; gaps under 4 h throw
// UnresolvableGap.
ShapeSpec spiral_polygon(double turns, double gap, int samples, double grid_h = 0.0);

// Defaults: bells of radius 0.35 centred at (+-0.83, 0, 0), neck radius 0.08,
// neck half-length 0.25.
Dumbbell default_dumbbell();

// Fillet radius implied by a dumbbell's parameters (<= 0 means invalid).
double dumbbell_fillet_radius(const Dumbbell& d);

double polygon_signed_area(const std::vector<Point2>& vertices);
double polygon_perimeter(const std::vector<Point2>& vertices);
bool polygon_is_simple(const std::vector<Point2>& vertices);

}  // namespace lsmcf

#include "lsmcf/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lsmcf/error.hpp"

namespace lsmcf {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
  const double ux = b[0] - a[0], uy = b[1] - a[1];
  const double wx = p[0] - a[0], wy = p[1] - a[1];
  const double len2 = ux * ux + uy * uy;
  double t = len2 > 0.0 ? (wx * ux + wy * uy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(wx - t * ux, wy - t * uy);
}

// Winding number of a closed polygon around p (Sunday's crossing rule).
int winding_number(const Point2& p, const std::vector<Point2>& poly) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const double cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
    if (a[1] <= p[1]) {
      if (b[1] > p[1] && cross > 0.0) ++wn;
    } else if (b[1] <= p[1] && cross < 0.0) {
      --wn;
    }
  }
  return wn;
}

double polygon_sdf(const Polygon2D& poly, const Vec& p) {
  const Point2 q{p[0], p[1]};
  const auto& v = poly.vertices;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    d = std::min(d, distance_to_segment(q, v[i], v[(i + 1) % v.size()]));
  return winding_number(q, v) != 0 ? d : -d;
}

double distance_to_arc(double s, double r, double cs, double cr, double radius, double th0,
                       double th1) {
  const double ds = s - cs, dr = r - cr;
  const double phi = std::atan2(dr, ds);
  if (phi >= th0 && phi <= th1) return std::abs(std::hypot(ds, dr) - radius);
  const double e0 = std::hypot(s - (cs + radius * std::cos(th0)), r - (cr + radius * std::sin(th0)));
  const double e1 = std::hypot(s - (cs + radius * std::cos(th1)), r - (cr + radius * std::sin(th1)));
  return std::min(e0, e1);
}

double dumbbell_sdf(const Dumbbell& d, const Vec& p) {
  const int dim = d.dim;
  Vec axis = sub(d.end_b, d.end_a);
  const double len = norm(axis, dim);
  for (int a = 0; a < dim; ++a) axis[a] /= len;
  Vec mid{};
  for (int a = 0; a < dim; ++a) mid[a] = 0.5 * (d.end_a[a] + d.end_b[a]);
  const Vec q = sub(p, mid);
  const double s_signed = dot(q, axis, dim);
  Vec perp = q;
  for (int a = 0; a < dim; ++a) perp[a] -= s_signed * axis[a];
  // Meridian half-plane coordinates; the profile is symmetric in s.
  const double s = std::abs(s_signed);
  const double r = norm(perp, dim);

  const double c = 0.5 * len;
  const double b = d.bell_radius, nu = d.neck_radius, ell = d.neck_halflength;
  const double f = dumbbell_fillet_radius(d);
  const double fs = ell, fr = nu + f;                  // fillet centre
  const double th_fb = std::atan2(-fr, c - fs);        // direction fillet -> bell centre
  const double th_bf = std::atan2(fr, fs - c);         // direction bell centre -> fillet
  const double s_t = fs + f * std::cos(th_fb);         // tangency abscissa

  double dist = distance_to_segment({s, r}, {0.0, nu}, {ell, nu});
  dist = std::min(dist, distance_to_arc(s, r, fs, fr, f, -0.5 * kPi, th_fb));
  dist = std::min(dist, distance_to_arc(s, r, c, 0.0, b, 0.0, th_bf));
  // Mirrored pieces (s < 0) are never closer for s >= 0.

  double rho = -1.0;
  if (s <= ell) {
    rho = nu;
  } else if (s <= s_t) {
    const double ds = s - fs;
    rho = fr - std::sqrt(std::max(0.0, f * f - ds * ds));
  } else if (s <= c + b) {
    const double ds = s - c;
    rho = std::sqrt(std::max(0.0, b * b - ds * ds));
  }
  return r < rho ? dist : -dist;
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& p3, const Point2& p4) {
  auto orient = [](const Point2& a, const Point2& b, const Point2& c) {
    const double v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](const Point2& a, const Point2& b, const Point2& c) {
    return std::min(a[0], b[0]) <= c[0] && c[0] <= std::max(a[0], b[0]) &&
           std::min(a[1], b[1]) <= c[1] && c[1] <= std::max(a[1], b[1]);
  };
  const int o1 = orient(p1, p2, p3), o2 = orient(p1, p2, p4);
  const int o3 = orient(p3, p4, p1), o4 = orient(p3, p4, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, p3)) return true;
  if (o2 == 0 && on_segment(p1, p2, p4)) return true;
  if (o3 == 0 && on_segment(p3, p4, p1)) return true;
  if (o4 == 0 && on_segment(p3, p4, p2)) return true;
  return false;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidSpec, msg);
}

void require_unit(const Vec& v, int dim, const std::string& what) {
  require(std::abs(norm(v, dim) - 1.0) < 1e-9, what + " must be a unit vector");
}

}  // namespace

double dumbbell_fillet_radius(const Dumbbell& d) {
  const double c = 0.5 * norm(sub(d.end_b, d.end_a), d.dim);
  const double gap = c - d.neck_halflength;
  const double b = d.bell_radius, nu = d.neck_radius;
  if (!(b > nu)) return -1.0;
  return (gap * gap + nu * nu - b * b) / (2.0 * (b - nu));
}

Dumbbell default_dumbbell() {
  Dumbbell d;
  d.dim = 3;
  d.end_a = {-0.83, 0.0, 0.0};
  d.end_b = {0.83, 0.0, 0.0};
  d.bell_radius = 0.35;
  d.neck_radius = 0.08;
  d.neck_halflength = 0.25;
  return d;
}

int shape_dim(const ShapeSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Sphere& s) { return s.dim; },
          [](const Cylinder& s) { return s.dim; },
          [](const Torus&) { return 3; },
          [](const Dumbbell& s) { return s.dim; },
          [](const Polygon2D&) { return 2; },
          [](const auto& comp) {
            require(!comp.members.empty(), "composition needs at least one member");
            const int d = shape_dim(comp.members.front());
            for (const auto& m : comp.members)
              require(shape_dim(m) == d, "composition members differ in dimension");
            return d;
          },
      },
      spec.shape);
}

std::string shape_kind(const ShapeSpec& spec) {
  return std::visit(Overloaded{
                        [](const Sphere&) { return std::string("sphere"); },
                        [](const Cylinder&) { return std::string("cylinder"); },
                        [](const Torus&) { return std::string("torus"); },
                        [](const Dumbbell&) { return std::string("dumbbell"); },
                        [](const Polygon2D&) { return std::string("polygon"); },
                        [](const Union&) { return std::string("union"); },
                        [](const Intersection&) { return std::string("intersection"); },
                    },
                    spec.shape);
}

void validate(const ShapeSpec& spec) {
  const int dim = shape_dim(spec);
  require(dim == 2 || dim == 3, "shape dimension must be 2 or 3");
  std::visit(Overloaded{
                 [](const Sphere& s) { require(s.radius > 0.0, "sphere radius must be positive"); },
                 [](const Cylinder& s) {
                   require(s.radius > 0.0, "cylinder radius must be positive");
                   require_unit(s.axis_dir, s.dim, "cylinder axis_dir");
                 },
                 [](const Torus& t) {
                   require(t.minor_radius > 0.0, "torus minor radius must be positive");
                   require(t.minor_radius < t.major_radius, "torus requires minor < major radius");
                   require_unit(t.plane_normal, 3, "torus plane_normal");
                 },
                 [](const Dumbbell& d) {
                   require(d.neck_radius > 0.0 && d.neck_radius < d.bell_radius,
                           "dumbbell requires 0 < neck_radius < bell_radius");
                   require(d.neck_halflength >= 0.0, "dumbbell neck half-length must be >= 0");
                   require(norm(sub(d.end_b, d.end_a), d.dim) > 0.0, "dumbbell ends coincide");
                   require(dumbbell_fillet_radius(d) > 0.0,
                           "dumbbell bells too close for a fillet between neck and bell");
                 },
                 [](const Polygon2D& p) {
                   require(p.vertices.size() >= 3, "polygon needs at least 3 vertices");
                   require(polygon_is_simple(p.vertices), "polygon is not simple");
                 },
                 [](const auto& comp) {
                   for (const auto& m : comp.members) validate(m);
                 },
             },
             spec.shape);
}

double signed_distance(const ShapeSpec& spec, const Vec& p) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) { return s.radius - norm(sub(p, s.center), s.dim); },
          [&](const Cylinder& c) {
            Vec q = sub(p, c.axis_point);
            const double along = dot(q, c.axis_dir, c.dim);
            for (int a = 0; a < c.dim; ++a) q[a] -= along * c.axis_dir[a];
            return c.radius - norm(q, c.dim);
          },
          [&](const Torus& t) {
            Vec q = sub(p, t.center);
            const double z = dot(q, t.plane_normal);
            for (int a = 0; a < 3; ++a) q[a] -= z * t.plane_normal[a];
            const double ring = norm(q) - t.major_radius;
            return t.minor_radius - std::hypot(ring, z);
          },
          [&](const Dumbbell& d) { return dumbbell_sdf(d, p); },
          [&](const Polygon2D& poly) { return polygon_sdf(poly, p); },
          [&](const Union& u) {
            double v = -std::numeric_limits<double>::infinity();
            for (const auto& m : u.members) v = std::max(v, signed_distance(m, p));
            return v;
          },
          [&](const Intersection& u) {
            double v = std::numeric_limits<double>::infinity();
            for (const auto& m : u.members) v = std::min(v, signed_distance(m, p));
            return v;
          },
      },
      spec.shape);
}

ScalarField init_field(const ShapeSpec& spec, const Grid& grid) {
  if (shape_dim(spec) != grid.dim)
    throw Error(ErrorCode::SpecGridDimMismatch,
                "shape is " + std::to_string(shape_dim(spec)) + "D, grid is " +
                    std::to_string(grid.dim) + "D");
  validate(spec);
  ScalarField f(grid);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    f.values[k] = signed_distance(spec, grid.position(grid.unravel(static_cast<std::size_t>(k))));
  return f;
}

ShapeSpec spiral_polygon(double turns, double gap, int samples, double grid_h) {
  if (!(turns >= 1.0)) throw Error(ErrorCode::InvalidSpec, "spiral needs at least one turn");
  if (!(gap > 0.0)) throw Error(ErrorCode::InvalidSpec, "spiral gap must be positive");
  if (samples < 64.0 * turns)
    throw Error(ErrorCode::InvalidSpec, "spiral needs at least 64 samples per turn");
  if (grid_h > 0.0 && gap < 4.0 * grid_h)
    throw Error(ErrorCode::UnresolvableGap,
                "gap " + std::to_string(gap) + " is below 4h = " + std::to_string(4.0 * grid_h));

  const double pitch = 2.0 * gap;
  const double r0 = 2.0 * gap;
  const double theta_max = 2.0 * kPi * turns;
  const int cap = 16;
  auto centre_r = [&](double th) { return r0 + pitch * th / (2.0 * kPi); };
  auto cap_points = [&](double th, double phi0, double phi1, std::vector<Point2>& out) {
    const double rc = centre_r(th);
    const double er[2] = {std::cos(th), std::sin(th)};
    const double et[2] = {-std::sin(th), std::cos(th)};
    for (int j = 1; j < cap; ++j) {
      const double phi = phi0 + (phi1 - phi0) * j / cap;
      const double a = 0.5 * gap * std::cos(phi), b = 0.5 * gap * std::sin(phi);
      out.push_back({rc * er[0] + a * er[0] + b * et[0], rc * er[1] + a * er[1] + b * et[1]});
    }
  };

  Polygon2D poly;
  auto& v = poly.vertices;
  v.reserve(2 * (samples + 1) + 2 * cap);
  for (int j = 0; j <= samples; ++j) {
    const double th = theta_max * j / samples;
    const double r = centre_r(th) + 0.5 * gap;
    v.push_back({r * std::cos(th), r * std::sin(th)});
  }
  cap_points(theta_max, 0.0, kPi, v);
  for (int j = samples; j >= 0; --j) {
    const double th = theta_max * j / samples;
    const double r = centre_r(th) - 0.5 * gap;
    v.push_back({r * std::cos(th), r * std::sin(th)});
  }
  cap_points(0.0, kPi, 2.0 * kPi, v);
  return ShapeSpec{poly};
}

double polygon_signed_area(const std::vector<Point2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& p = v[i];
    const Point2& q = v[(i + 1) % v.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

double polygon_perimeter(const std::vector<Point2>& v) {
  double l = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& p = v[i];
    const Point2& q = v[(i + 1) % v.size()];
    l += std::hypot(q[0] - p[0], q[1] - p[1]);
  }
  return l;
}

bool polygon_is_simple(const std::vector<Point2>& v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share exactly one endpoint
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

}  // namespace lsmcf

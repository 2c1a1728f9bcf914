#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "lsmcf/evolution.hpp"
#include "lsmcf/measures.hpp"
#include "lsmcf/shapes.hpp"

using namespace lsmcf;
using std::numbers::pi;

namespace {

ShapeSpec sphere(int dim, Vec c, double r) { return ShapeSpec{Sphere{dim, c, r}}; }

// |grad v| == 1 (to 10h) at nodes at least 2h from the front and from `skip`.
void check_eikonal(const ScalarField& v, auto&& skip) {
  const Grid& g = v.grid;
  std::size_t checked = 0;
  for_each_index(g, [&](const Index& i) {
    if (!g.interior(i) || std::abs(v.at(i)) < 2 * g.h || skip(g.position(i))) return;
    CHECK(std::abs(norm(gradient_central(v, i), g.dim) - 1.0) <= 10 * g.h);
    ++checked;
  });
  CHECK(checked > 100);
}

}  // namespace

TEST_CASE("sphere values") {
  Grid g = th::cube_grid(3, 96);
  auto v = init_field(sphere(3, {0, 0, 0}, 0.8), g);
  const double h = g.h;
  CHECK(std::abs(signed_distance(sphere(3, {0, 0, 0}, 0.8), Vec{0, 0, 0}) - 0.8) <= h);
  CHECK(std::abs(signed_distance(sphere(3, {0, 0, 0}, 0.8), Vec{0.8, 0, 0})) <= h);
  CHECK(std::abs(interpolate(v, Vec{0.8, 0, 0})) <= h);
  CHECK(std::abs(interpolate(v, Vec{0, 0, 0}) - 0.8) <= h);
  CHECK(signed_distance(sphere(3, {0, 0, 0}, 0.8), Vec{1, 1, 1}) < 0);
  check_eikonal(v, [](const Vec& p) { return norm(p) < 0.1; });
}

TEST_CASE("torus value on the core circle") {
  ShapeSpec t{Torus{{0, 0, 0}, {0, 0, 1}, 0.5, 0.15}};
  CHECK(signed_distance(t, Vec{0.5, 0, 0}) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(signed_distance(t, Vec{0, -0.5, 0}) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(signed_distance(t, Vec{0, 0, 0}) == doctest::Approx(-0.35).epsilon(1e-12));
  CHECK(signed_distance(t, Vec{0.5, 0, 0.15}) == doctest::Approx(0.0).epsilon(1e-12));
  // tilted torus
  const double s = 1 / std::sqrt(2.0);
  ShapeSpec tt{Torus{{0.1, 0, 0}, {s, 0, s}, 0.5, 0.15}};
  CHECK(signed_distance(tt, Vec{0.1, 0.5, 0}) == doctest::Approx(0.15).epsilon(1e-12));
  Grid g = th::cube_grid(3, 64);
  check_eikonal(init_field(t, g), [](const Vec& p) {
    const double rho = std::hypot(p[0], p[1]);
    return rho < 0.1 || std::hypot(rho - 0.5, p[2]) < 0.05;
  });
}

TEST_CASE("cylinder and strip") {
  ShapeSpec c{Cylinder{3, {0, 0, 0}, {0, 0, 1}, 0.6}};
  CHECK(signed_distance(c, Vec{0, 0, 0.9}) == doctest::Approx(0.6));
  CHECK(signed_distance(c, Vec{0.6, 0, -3}) == doctest::Approx(0.0).epsilon(1e-12));
  ShapeSpec strip{Cylinder{2, {0, 0.2, 0}, {1, 0, 0}, 0.3}};
  CHECK(signed_distance(strip, Vec{5, 0.2, 0}) == doctest::Approx(0.3));
  CHECK(signed_distance(strip, Vec{5, 0.6, 0}) == doctest::Approx(-0.1));
  ShapeSpec bad{Cylinder{3, {0, 0, 0}, {0, 0, 2}, 0.6}};
  CHECK_CODE(validate(bad), InvalidSpec);
}

TEST_CASE("sign convention: inside points positive, far points negative") {
  std::vector<std::pair<ShapeSpec, Vec>> inside{
      {sphere(3, {0.1, 0.2, 0.3}, 0.4), {0.1, 0.2, 0.3}},
      {ShapeSpec{Cylinder{3, {0, 0, 0}, {1, 0, 0}, 0.3}}, {0.7, 0.1, 0}},
      {ShapeSpec{Torus{{0, 0, 0}, {0, 0, 1}, 0.5, 0.15}}, {0, 0.55, 0.05}},
      {ShapeSpec{default_dumbbell()}, {0.83, 0, 0}},
      {ShapeSpec{default_dumbbell()}, {0, 0, 0}},
      {ShapeSpec{Polygon2D{{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}}}, {0.1, 0.2, 0}},
  };
  for (auto& [s, p] : inside) {
    CHECK(signed_distance(s, p) > 0);
    Vec far{5, 5, shape_dim(s) == 3 ? 5.0 : 0.0};
    CHECK(signed_distance(s, far) < 0);
  }
  // polygon orientation does not matter
  ShapeSpec cw{Polygon2D{{{-0.5, 0.5}, {0.5, 0.5}, {0.5, -0.5}, {-0.5, -0.5}}}};
  CHECK(signed_distance(cw, Vec{0, 0, 0}) == doctest::Approx(0.5));
}

TEST_CASE("union is the nodewise max, intersection the min") {
  Grid g = th::cube_grid(3, 40);
  auto a = sphere(3, {-0.5, 0, 0}, 0.3);
  auto b = sphere(3, {0.5, 0, 0}, 0.25);
  auto va = init_field(a, g), vb = init_field(b, g);
  auto vu = init_field(ShapeSpec{Union{{a, b}}}, g);
  auto vi = init_field(ShapeSpec{Intersection{{a, b}}}, g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(vu[n] == std::max(va[n], vb[n]));
    CHECK(vi[n] == std::min(va[n], vb[n]));
  }
  CHECK(component_count(vu) == 2);
  CHECK(component_count(vi) == 0);
  CHECK_CODE(validate(ShapeSpec{Union{}}), InvalidSpec);
  CHECK_CODE(shape_dim(ShapeSpec{Union{{a, sphere(2, {}, 0.3)}}}), InvalidSpec);
}

TEST_CASE("init_field errors") {
  Grid g2 = th::cube_grid(2, 16);
  CHECK_CODE(init_field(sphere(3, {}, 0.5), g2), SpecGridDimMismatch);
  Grid g3 = th::cube_grid(3, 16);
  CHECK_CODE(init_field(sphere(3, {}, -0.5), g3), InvalidSpec);
  CHECK_CODE(init_field(ShapeSpec{Torus{{}, {0, 0, 1}, 0.3, 0.3}}, g3), InvalidSpec);
  Dumbbell d = default_dumbbell();
  d.neck_radius = 0.4;
  CHECK_CODE(validate(ShapeSpec{d}), InvalidSpec);
  ShapeSpec bowtie{Polygon2D{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}};
  CHECK_CODE(validate(bowtie), InvalidSpec);
  CHECK_CODE(validate(ShapeSpec{Polygon2D{{{0, 0}, {1, 0}}}}), InvalidSpec);
}

TEST_CASE("symmetric shapes produce symmetric fields") {
  Grid g = th::cube_grid(3, 33);
  auto v = init_field(sphere(3, {0, 0, 0}, 0.6), g);
  for_each_index(g, [&](const Index& i) {
    CHECK(v.at(i) == v.at(Index{i[1], i[2], i[0]}));
    CHECK(v.at(i) == v.at(Index{32 - i[0], i[1], i[2]}));
  });
  auto c = init_field(ShapeSpec{Cylinder{3, {0, 0, 0}, {0, 0, 1}, 0.4}}, g);
  for_each_index(g, [&](const Index& i) { CHECK(c.at(i) == c.at(Index{i[0], i[1], 0})); });
}

TEST_CASE("dumbbell") {
  Dumbbell d = default_dumbbell();
  CHECK(d.bell_radius == 0.35);
  CHECK(d.neck_radius == 0.08);
  CHECK(d.neck_halflength == 0.25);
  CHECK(d.end_a[0] == -0.83);
  CHECK(d.end_b[0] == 0.83);
  const double f = dumbbell_fillet_radius(d);
  CHECK(f > 0);
  ShapeSpec s{d};
  // bell poles and neck
  CHECK(signed_distance(s, Vec{0.83 + 0.35, 0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(signed_distance(s, Vec{0.83, 0.35, 0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(signed_distance(s, Vec{0.1, 0, 0}) == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(signed_distance(s, Vec{0.1, 0.0, 0.2}) == doctest::Approx(-0.12).epsilon(1e-12));
  // the profile is continuous across the fillet tangency points
  double prev = signed_distance(s, Vec{0.0, 0.0, 0.09});
  for (int k = 1; k <= 400; ++k) {
    const double x = 0.83 * k / 400;
    const double val = signed_distance(s, Vec{x, 0.0, 0.09});
    CHECK(std::abs(val - prev) <= 0.83 / 400 + 1e-12);
    prev = val;
  }
  std::vector<Extent> ex{{-1.3, 1.3}, {-0.5, 0.5}, {-0.5, 0.5}};
  std::vector<int> res{131, 51, 51};
  Grid g = make_grid(3, ex, res);
  auto v = init_field(s, g);
  CHECK(component_count(v) == 1);
  CHECK(min_front_mean_curvature(v) > 0);
}

TEST_CASE("spiral polygon") {
  ShapeSpec one = spiral_polygon(1, 0.1, 128);
  const auto& v1 = std::get<Polygon2D>(one.shape).vertices;
  CHECK(polygon_is_simple(v1));
  CHECK(std::abs(polygon_signed_area(v1)) > 0);

  ShapeSpec s = spiral_polygon(3, 0.05, 1024, 2.0 / 511);
  const auto& v = std::get<Polygon2D>(s.shape).vertices;
  CHECK(polygon_is_simple(v));
  // channel of width `gap` along the centre line
  const double area = std::abs(polygon_signed_area(v));
  double centre_len = 0;
  for (int j = 0; j < 4096; ++j) {
    auto c = [](double th) {
      const double r = 0.1 + 0.1 * th / (2 * pi);
      return std::array<double, 2>{r * std::cos(th), r * std::sin(th)};
    };
    auto a = c(6 * pi * j / 4096), b = c(6 * pi * (j + 1) / 4096);
    centre_len += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  CHECK(area == doctest::Approx(0.05 * centre_len + pi * 0.025 * 0.025).epsilon(0.02));
  for (const auto& p : v) CHECK(std::hypot(p[0], p[1]) < 1.0);

  Grid g = th::cube_grid(2, 512);
  auto f = init_field(s, g);
  CHECK(component_count(f) == 1);
  CHECK(isoperimetric_ratio(f) > 20);

  CHECK_CODE(spiral_polygon(3, 0.01, 1024, 2.0 / 511), UnresolvableGap);
  CHECK_CODE(spiral_polygon(0.5, 0.05, 1024), InvalidSpec);
  CHECK_CODE(spiral_polygon(3, 0.05, 100), InvalidSpec);
  CHECK_CODE(spiral_polygon(3, -0.05, 1024), InvalidSpec);
}

TEST_CASE("polygon helpers") {
  std::vector<Point2> sq{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
  CHECK(polygon_signed_area(sq) == 2.0);
  CHECK(polygon_perimeter(sq) == 6.0);
  CHECK(polygon_is_simple(sq));
  std::reverse(sq.begin(), sq.end());
  CHECK(polygon_signed_area(sq) == -2.0);
  CHECK(shape_kind(ShapeSpec{Polygon2D{sq}}) == "polygon");
}

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "lsmcf/grid.hpp"

using namespace lsmcf;

TEST_CASE("make_grid spacing") {
  std::vector<Extent> ex{{-1, 1}, {-1, 1}};
  std::vector<int> res{256, 256};
  Grid g = make_grid(2, ex, res);
  CHECK(g.h == doctest::Approx(2.0 / 255).epsilon(1e-14));
  CHECK(g.size() == 256u * 256u);
  CHECK(g.shape[2] == 1);

  Grid g3 = th::cube_grid(3, 96);
  CHECK(g3.h == doctest::Approx(2.0 / 95).epsilon(1e-14));
  CHECK(g3.upper(2) == doctest::Approx(1.0));
}

TEST_CASE("make_grid rejects bad input") {
  std::vector<Extent> ex{{-1, 1}, {-1, 1.5}};
  std::vector<int> res{64, 64};
  CHECK_CODE(make_grid(2, ex, res), AnisotropicSpacing);

  std::vector<Extent> sq{{-1, 1}, {-1, 1}};
  std::vector<int> small{7, 64};
  CHECK_CODE(make_grid(2, sq, small), ResolutionTooSmall);

  std::vector<Extent> ex4(4, Extent{-1, 1});
  std::vector<int> res4(4, 16);
  CHECK_CODE(make_grid(4, ex4, res4), DimensionUnsupported);
  CHECK_CODE(make_grid(1, std::span(ex4).first(1), std::span(res4).first(1)), DimensionUnsupported);

  std::vector<Extent> flat{{1, 1}, {-1, 1}};
  CHECK_CODE(make_grid(2, flat, res), InvalidSpec);
}

TEST_CASE("linear index round trip") {
  Grid g = th::cube_grid(3, 9);
  for (std::size_t n = 0; n < g.size(); n += 7) CHECK(g.linear(g.unravel(n)) == n);
  CHECK(g.stride(0) == 1);
  CHECK(g.stride(1) == 9);
  CHECK(g.stride(2) == 81);
}

TEST_CASE("gradient is exact on affine fields, boundary included") {
  Grid g = th::cube_grid(2, 33);
  auto f = th::sample(g, [](const Vec& p) { return 3 * p[0] - 2 * p[1] + 0.25; });
  for_each_index(g, [&](const Index& i) {
    Vec gr = gradient_central(f, i);
    CHECK(std::abs(gr[0] - 3) <= 1e-10);
    CHECK(std::abs(gr[1] + 2) <= 1e-10);
  });
  ScalarField c(g, 0.7);
  for_each_index(g, [&](const Index& i) {
    Vec gr = gradient_central(c, i);
    CHECK(gr[0] == 0.0);
    CHECK(gr[1] == 0.0);
  });
}

TEST_CASE("gradient of x^2 at 0.5 with h = 0.01") {
  std::vector<Extent> ex{{0, 1}, {0, 1}};
  std::vector<int> res{101, 101};
  Grid g = make_grid(2, ex, res);
  auto f = th::sample(g, [](const Vec& p) { return p[0] * p[0]; });
  Vec gr = gradient_central(f, Index{50, 30, 0});
  CHECK(std::abs(gr[0] - 1.0) <= 1e-6);
  CHECK(std::abs(gr[1]) <= 1e-12);
  // second order at the boundary as well
  Vec gb = gradient_central(f, Index{100, 30, 0});
  CHECK(std::abs(gb[0] - 2.0) <= 1e-9);
}

TEST_CASE("hessian of quadratics") {
  Grid g = th::cube_grid(2, 41);
  auto f = th::sample(g, [](const Vec& p) { return -(p[0] * p[0] + p[1] * p[1]) / 2; });
  Mat H = hessian_central(f, Index{13, 27, 0});
  CHECK(std::abs(H[0][0] + 1) <= 1e-8);
  CHECK(std::abs(H[1][1] + 1) <= 1e-8);
  CHECK(std::abs(H[0][1]) <= 1e-8);
  CHECK(H[0][1] == H[1][0]);

  auto xy = th::sample(g, [](const Vec& p) { return p[0] * p[1]; });
  Mat Hxy = hessian_central(xy, Index{20, 5, 0});
  CHECK(std::abs(Hxy[0][1] - 1) <= 1e-8);
  CHECK(std::abs(Hxy[0][0]) <= 1e-8);

  Grid g3 = th::cube_grid(3, 21);
  auto cyl = th::sample(g3, [](const Vec& p) { return -(p[0] * p[0] + p[1] * p[1]) / 2; });
  Mat H3 = hessian_central(cyl, Index{7, 12, 9});
  CHECK(std::abs(H3[0][0] + 1) <= 1e-8);
  CHECK(std::abs(H3[1][1] + 1) <= 1e-8);
  CHECK(std::abs(H3[2][2]) <= 1e-8);

  CHECK_CODE(hessian_central(f, Index{0, 5, 0}), BoundaryIndex);
  CHECK_CODE(hessian_central(cyl, Index{5, 5, 20}), BoundaryIndex);
  CHECK_CODE(gradient_central(f, Index{41, 5, 0}), BoundaryIndex);
}

TEST_CASE("interpolate") {
  Grid g = th::cube_grid(3, 17);
  auto f = th::random_field(g, 3);
  for (std::size_t n = 0; n < g.size(); n += 11) {
    Index i = g.unravel(n);
    CHECK(interpolate(f, g.position(i)) == f.at(i));
  }
  auto aff = th::sample(g, [](const Vec& p) { return 0.3 * p[0] - 1.7 * p[1] + 2.1 * p[2] + 0.5; });
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 200; ++k) {
    Vec p{d(rng), d(rng), d(rng)};
    CHECK(std::abs(interpolate(aff, p) - (0.3 * p[0] - 1.7 * p[1] + 2.1 * p[2] + 0.5)) <= 1e-12);
  }
  auto sq = th::sample(g, [](const Vec& p) { return p[0] * p[0]; });
  const double x = g.origin[0] + 4.5 * g.h;
  CHECK(std::abs(interpolate(sq, Vec{x, 0, 0}) - x * x) <= g.h * g.h / 4 + 1e-15);
  CHECK(interpolate(aff, Vec{1, 1, 1}) == doctest::Approx(0.3 - 1.7 + 2.1 + 0.5));
  CHECK_CODE(interpolate(f, (Vec{1.01, 0, 0})), OutOfDomain);
  CHECK_CODE(interpolate(f, (Vec{0, -1.5, 0})), OutOfDomain);
}

TEST_CASE("translation equivariance of derivative stencils") {
  // shifting both the data and the origin by whole cells leaves the stencil
  // outputs bit-identical
  Grid g = th::cube_grid(3, 14);
  auto f = th::random_field(g, 9);
  Grid gs = g;
  const int k = 2;
  gs.origin[1] += k * g.h;
  ScalarField fs(gs);
  for_each_index(gs, [&](const Index& i) {
    Index j = i;
    j[1] = std::min(i[1] + k, g.shape[1] - 1);
    fs.at(i) = f.at(j);
  });
  for (int z = 1; z < 13; ++z)
    for (int y = 1; y < 10; ++y)
      for (int x = 1; x < 13; ++x) {
        Index i{x, y, z};
        Index j{x, y + k, z};
        CHECK(hessian_central(fs, i) == hessian_central(f, j));
        CHECK(gradient_central(fs, i) == gradient_central(f, j));
      }
}

TEST_CASE("axis permutation equivariance") {
  Grid g = th::cube_grid(3, 12);
  auto f = th::random_field(g, 21);
  ScalarField p(g);  // p(x, y, z) = f(y, z, x)
  for_each_index(g, [&](const Index& i) { p.at(i) = f.at(Index{i[1], i[2], i[0]}); });
  for_each_index(g, [&](const Index& i) {
    const Index j{i[1], i[2], i[0]};
    Vec gp = gradient_central(p, i);
    Vec gf = gradient_central(f, j);
    CHECK(gp[0] == gf[2]);
    CHECK(gp[1] == gf[0]);
    CHECK(gp[2] == gf[1]);
    if (g.interior(i)) {
      // mixed differences are taken in the other order, so only up to round-off
      Mat hp = hessian_central(p, i);
      Mat hf = hessian_central(f, j);
      const int perm[3] = {2, 0, 1};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          CHECK(std::abs(hp[a][b] - hf[perm[a]][perm[b]]) <= 1e-12 * (1 + std::abs(hf[perm[a]][perm[b]])));
    }
  });
}

TEST_CASE("error codes map to exit statuses") {
  CHECK(exit_code(ErrorCode::ConfigInvalid) == 3);
  CHECK(exit_code(ErrorCode::IoError) == 4);
  CHECK(exit_code(ErrorCode::FormatError) == 4);
  CHECK(exit_code(ErrorCode::SuiteUnknown) == 10);
  CHECK(std::string(Error(ErrorCode::EmptyMesh, "x").what()).find("EmptyMesh") == 0);
}

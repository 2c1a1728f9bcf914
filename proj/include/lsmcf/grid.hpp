#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lsmcf {

// Points, vectors and matrices are fixed at three components; 2D grids leave
// the last component (row/column) at zero.
using Vec = std::array<double, 3>;
using Mat = std::array<std::array<double, 3>, 3>;
using Index = std::array<int, 3>;
using Extent = std::array<double, 2>;

struct Grid {
  int dim = 2;
  Index shape{1, 1, 1};         // shape[2] == 1 when dim == 2
  Vec origin{0.0, 0.0, 0.0};
  double h = 1.0;

  std::size_t size() const {
    return static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  }
  std::ptrdiff_t stride(int axis) const {
    return axis == 0 ? 1 : axis == 1 ? shape[0] : static_cast<std::ptrdiff_t>(shape[0]) * shape[1];
  }
  std::size_t linear(const Index& i) const {
    return static_cast<std::size_t>(i[0]) +
           static_cast<std::size_t>(shape[0]) * (static_cast<std::size_t>(i[1]) +
                                                 static_cast<std::size_t>(shape[1]) * i[2]);
  }
  Index unravel(std::size_t n) const {
    Index i{};
    i[0] = static_cast<int>(n % shape[0]);
    n /= shape[0];
    i[1] = static_cast<int>(n % shape[1]);
    i[2] = static_cast<int>(n / shape[1]);
    return i;
  }
  Vec position(const Index& i) const {
    Vec p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) p[a] = origin[a] + i[a] * h;
    return p;
  }
  double upper(int axis) const { return origin[axis] + (shape[axis] - 1) * h; }
  bool contains(const Index& i) const;
  // True when every axis index is at least `margin` cells from the boundary.
  bool interior(const Index& i, int margin = 1) const;

  bool operator==(const Grid&) const = default;
};

// Uniform lattice over `extents` with `resolution` nodes per axis. Spacings on
// all axes must agree to 1e-12 h.
Grid make_grid(int dim, std::span<const Extent> extents, std::span<const int> resolution);

struct ScalarField {
  Grid grid;
  std::vector<double> values;  // axis 0 fastest

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t n) { return values[n]; }
  double operator[](std::size_t n) const { return values[n]; }
  double& at(const Index& i) { return values[grid.linear(i)]; }
  double at(const Index& i) const { return values[grid.linear(i)]; }
};

// Second-order central differences in the interior, second-order one-sided
// differences on the boundary ring.
Vec gradient_central(const ScalarField& f, const Index& idx);

// Central second differences, symmetric by construction. Needs one cell of
// margin on every axis (BoundaryIndex otherwise).
Mat hessian_central(const ScalarField& f, const Index& idx);

// Multilinear interpolation; throws OutOfDomain outside the bounding box.
double interpolate(const ScalarField& f, const Vec& p);

double norm(const Vec& v, int dim = 3);
double dot(const Vec& a, const Vec& b, int dim = 3);

// Visits every node index in lexicographic (axis 0 fastest) order.
template <class Fn>
void for_each_index(const Grid& g, Fn&& fn) {
  Index i{0, 0, 0};
  for (i[2] = 0; i[2] < g.shape[2]; ++i[2])
    for (i[1] = 0; i[1] < g.shape[1]; ++i[1])
      for (i[0] = 0; i[0] < g.shape[0]; ++i[0]) fn(i);
}

}  // namespace lsmcf

#include "lsmcf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsmcf/error.hpp"
#include "lsmcf/stencil.hpp"

namespace lsmcf {
namespace {

template <int Dim>
bool speed_at(const double* c, const std::ptrdiff_t* s, const stencil::Coeffs& k, double eps,
              double& out) {
  double g[3];
  double H[3][3];
  stencil::derivs<Dim>(c, s, k, g, H);
  const bool ok = stencil::curvature_from_derivs<Dim>(g, H, eps, out);
  if (!ok) return false;
  // eps == 0 with a numerically vanishing gradient
  if (eps == 0.0) {
    double g2 = 0.0;
    for (int a = 0; a < Dim; ++a) g2 += g[a] * g[a];
    if (g2 < 1e-24) return false;
  }
  return true;
}

template <int Dim>
StepStats parallel_impl(const ScalarField& in, ScalarField& out, double dt, double eps) {
  const Grid& g = in.grid;
  const stencil::Coeffs k(g.h);
  const std::ptrdiff_t s[3] = {g.stride(0), g.stride(1), g.stride(2)};
  const int nx = g.shape[0], ny = g.shape[1];
  const int z0 = Dim == 3 ? 1 : 0;
  const int z1 = Dim == 3 ? g.shape[2] - 1 : 1;
  const double* src = in.values.data();
  double* dst = out.values.data();

  double sup = -std::numeric_limits<double>::infinity();
  int bad = 0;
  int degenerate = 0;
#pragma omp parallel for collapse(2) schedule(static) reduction(max : sup) reduction(| : bad, degenerate)
  for (int z = z0; z < z1; ++z) {
    for (int y = 1; y < ny - 1; ++y) {
      const std::ptrdiff_t row = (static_cast<std::ptrdiff_t>(z) * ny + y) * nx;
      for (int x = 1; x < nx - 1; ++x) {
        const std::ptrdiff_t n = row + x;
        double speed;
        degenerate |= !speed_at<Dim>(src + n, s, k, eps, speed);
        const double v = src[n] + dt * speed;
        dst[n] = v;
        bad |= !std::isfinite(v);
        sup = std::max(sup, v);
      }
    }
  }
  kernels::fill_boundary(out);
  return StepStats{sup, bad == 0, degenerate != 0};
}

}  // namespace

double curvature_speed(const ScalarField& v, const Index& idx, double epsilon) {
  const Grid& g = v.grid;
  if (!g.interior(idx, 1))
    throw Error(ErrorCode::BoundaryIndex, "curvature_speed needs one cell of margin");
  if (epsilon < 0.0) throw Error(ErrorCode::InvalidSpec, "epsilon must be >= 0");
  const stencil::Coeffs k(g.h);
  const std::ptrdiff_t s[3] = {g.stride(0), g.stride(1), g.stride(2)};
  const double* c = v.values.data() + g.linear(idx);
  double out = 0.0;
  const bool ok = g.dim == 2 ? speed_at<2>(c, s, k, epsilon, out) : speed_at<3>(c, s, k, epsilon, out);
  if (!ok) throw Error(ErrorCode::DegenerateGradient, "gradient vanishes and epsilon == 0");
  return out;
}

namespace kernels {

void fill_boundary(ScalarField& f) {
  const Grid& g = f.grid;
  const int nx = g.shape[0], ny = g.shape[1], nz = g.shape[2];
  auto clampi = [](int i, int n) { return std::clamp(i, 1, n - 2); };
  auto copy = [&](int x, int y, int z) {
    const int cz = g.dim == 3 ? clampi(z, nz) : 0;
    f.values[g.linear({x, y, z})] = f.values[g.linear({clampi(x, nx), clampi(y, ny), cz})];
  };
  for (int z = 0; z < nz; ++z) {
    const bool zface = g.dim == 3 && (z == 0 || z == nz - 1);
    for (int y = 0; y < ny; ++y) {
      if (zface || y == 0 || y == ny - 1) {
        for (int x = 0; x < nx; ++x) copy(x, y, z);
      } else {
        copy(0, y, z);
        copy(nx - 1, y, z);
      }
    }
  }
}

StepStats step_serial_reference(const ScalarField& in, ScalarField& out, double dt,
                                double epsilon) {
  const Grid& g = in.grid;
  if (out.grid != g) out = ScalarField(g);
  StepStats st;
  st.sup = -std::numeric_limits<double>::infinity();
  for_each_index(g, [&](const Index& i) {
    if (!g.interior(i, 1)) return;
    double speed = 0.0;
    try {
      speed = curvature_speed(in, i, epsilon);
    } catch (const Error&) {
      st.degenerate = true;
      const stencil::Coeffs k(g.h);
      const std::ptrdiff_t s[3] = {g.stride(0), g.stride(1), g.stride(2)};
      const double* c = in.values.data() + g.linear(i);
      if (g.dim == 2)
        speed_at<2>(c, s, k, epsilon, speed);
      else
        speed_at<3>(c, s, k, epsilon, speed);
    }
    const double v = in.at(i) + dt * speed;
    out.at(i) = v;
    if (!std::isfinite(v)) st.finite = false;
    st.sup = std::max(st.sup, v);
  });
  fill_boundary(out);
  return st;
}

StepStats step_parallel(const ScalarField& in, ScalarField& out, double dt, double epsilon) {
  if (out.grid != in.grid) out = ScalarField(in.grid);
  return in.grid.dim == 2 ? parallel_impl<2>(in, out, dt, epsilon)
                          : parallel_impl<3>(in, out, dt, epsilon);
}

}  // namespace kernels
}  // namespace lsmcf

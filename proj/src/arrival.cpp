#include "lsmcf/arrival.hpp"

#include <algorithm>
#include <cmath>

#include "lsmcf/error.hpp"
#include "lsmcf/kernels.hpp"

namespace lsmcf {

bool ArrivalTimeField::stencil_valid(const Index& i) const {
  const Grid& g = u.grid;
  if (!g.interior(i, 1)) return false;
  const int zlo = g.dim == 3 ? -1 : 0, zhi = g.dim == 3 ? 1 : 0;
  for (int dz = zlo; dz <= zhi; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (!valid[g.linear({i[0] + dx, i[1] + dy, i[2] + dz})]) return false;
  return true;
}

ArrivalTimeField make_arrival_field(ScalarField u, std::vector<std::uint8_t> valid) {
  ArrivalTimeField a;
  if (valid.empty()) valid.assign(u.size(), 1);
  if (valid.size() != u.size()) throw Error(ErrorCode::FormatError, "mask size does not match field");
  a.u = std::move(u);
  a.valid = std::move(valid);
  return a;
}

ArrivalRun evolve_with_arrival(const ScalarField& v0, const EvolutionParams& params,
                               const FlowHooks& hooks) {
  const auto n = static_cast<std::ptrdiff_t>(v0.size());
  bool any = false;
  for (double x : v0.values) any = any || x > 0.0;
  if (!any) throw Error(ErrorCode::NoInterior, "initial field is nowhere positive");

  ArrivalTimeField a;
  a.u = ScalarField(v0.grid, 0.0);
  a.valid.assign(v0.size(), 0);
  // 0: never inside, 1: inside and not yet crossed, 2: crossed
  std::vector<std::uint8_t> state(v0.size(), 0);
  for (std::ptrdiff_t i = 0; i < n; ++i) state[i] = v0.values[i] > 0.0 ? 1 : 0;

  FlowHooks inner = hooks;
  inner.on_step = [&](const StepView& s) {
    const double* before = s.before.values.data();
    const double* after = s.after.values.data();
    double* u = a.u.values.data();
    std::size_t re = 0;
#pragma omp parallel for schedule(static) reduction(+ : re)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (state[i] == 1) {
        if (after[i] < 0.0) {
          u[i] = s.t_before + s.dt * before[i] / (before[i] - after[i]);
          state[i] = 2;
        }
      } else if (state[i] == 2 && before[i] < 0.0 && after[i] >= 0.0) {
        ++re;
      }
    }
    a.recrossings += re;
    if (hooks.on_step) hooks.on_step(s);
  };

  ArrivalRun run;
  run.flow = evolve(v0, params, inner);
  for (std::ptrdiff_t i = 0; i < n; ++i) a.valid[i] = state[i] == 2;
  a.dt = run.flow.dt;
  a.extinction_time = run.flow.extinction_time;
  run.arrival = std::move(a);
  return run;
}

ArrivalTimeField compute_arrival_time(const ScalarField& v0, const EvolutionParams& params) {
  FlowHooks hooks;
  hooks.retain_snapshots = false;
  return evolve_with_arrival(v0, params, hooks).arrival;
}

double arrival_residual(const ArrivalTimeField& u, const Index& idx, double epsilon) {
  if (!u.stencil_valid(idx))
    throw Error(ErrorCode::BoundaryIndex, "residual needs a fully valid 3^dim stencil");
  const double gn = norm(gradient_central(u.u, idx), u.grid().dim);
  if (gn <= std::max(epsilon, 1e-12))
    throw Error(ErrorCode::NearCriticalPoint, "|grad u| = " + std::to_string(gn));
  return curvature_speed(u.u, idx, epsilon) + 1.0;
}

double quadratic_model(int k, std::span<const double> coords) {
  if (k < 1 || k > 3) throw Error(ErrorCode::InvalidK, "k = " + std::to_string(k));
  if (coords.size() < static_cast<std::size_t>(k + 1))
    throw Error(ErrorCode::InvalidK, "model of index k needs k+1 coordinates");
  double s = 0.0;
  for (int i = 0; i <= k; ++i) s += coords[i] * coords[i];
  return -s / k;
}

}  // namespace lsmcf

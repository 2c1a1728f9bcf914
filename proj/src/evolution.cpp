#include "lsmcf/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "lsmcf/error.hpp"
#include "lsmcf/kernels.hpp"
#include "lsmcf/measures.hpp"

namespace lsmcf {
namespace {

void check_step(const StepStats& st) {
  if (st.degenerate)
    throw Error(ErrorCode::DegenerateGradient, "vanishing gradient with epsilon == 0");
  if (!st.finite) throw Error(ErrorCode::NonFiniteValue, "non-finite value after step (blow-up)");
}

std::size_t count_sign_changes(const ScalarField& a, const ScalarField& b) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  const double* pa = a.values.data();
  const double* pb = b.values.data();
  std::size_t changes = 0;
#pragma omp parallel for schedule(static) reduction(+ : changes)
  for (std::ptrdiff_t i = 0; i < n; ++i) changes += (pa[i] >= 0.0) != (pb[i] >= 0.0);
  return changes;
}

double sup(const ScalarField& f) {
  return *std::max_element(f.values.begin(), f.values.end());
}

}  // namespace

void validate(const EvolutionParams& p) {
  if (!(p.epsilon >= 0.0)) throw Error(ErrorCode::InvalidSpec, "epsilon must be >= 0");
  if (!(p.cfl_factor > 0.0 && p.cfl_factor <= 0.5))
    throw Error(ErrorCode::InvalidSpec, "cfl_factor must lie in (0, 0.5]");
  if (!(p.t_max > 0.0)) throw Error(ErrorCode::InvalidSpec, "t_max must be positive");
  if (p.snapshot_stride < 1) throw Error(ErrorCode::InvalidSpec, "snapshot_stride must be >= 1");
}

double cfl_dt(const Grid& grid, const EvolutionParams& params) {
  return params.cfl_factor * grid.h * grid.h / (2.0 * grid.dim);
}

double max_stable_dt(const Grid& grid) { return grid.h * grid.h / (4.0 * grid.dim); }

ScalarField step(const ScalarField& v, double dt, double epsilon) {
  if (!(dt > 0.0) || dt > max_stable_dt(v.grid) * (1.0 + 1e-12))
    throw Error(ErrorCode::CFLViolation,
                "dt " + std::to_string(dt) + " exceeds " + std::to_string(max_stable_dt(v.grid)));
  if (epsilon < 0.0) throw Error(ErrorCode::InvalidSpec, "epsilon must be >= 0");
  ScalarField out(v.grid);
  check_step(kernels::step_parallel(v, out, dt, epsilon));
  return out;
}

FlowRecord evolve(const ScalarField& v0, const EvolutionParams& params, const FlowHooks& hooks) {
  validate(params);
  FlowRecord rec;
  rec.dt = cfl_dt(v0.grid, params);
  const double dt = rec.dt;

  auto snapshot = [&](double t, const ScalarField& f) {
    rec.times.push_back(t);
    if (hooks.retain_snapshots) rec.snapshots.push_back(f);
    if (hooks.on_snapshot) hooks.on_snapshot(t, f);
  };

  ScalarField cur = v0;
  ScalarField next(v0.grid);
  int components = component_count(cur);
  rec.initial_components = components;
  snapshot(0.0, cur);
  if (sup(cur) < 0.0) {
    rec.extinction_time = 0.0;
    return rec;
  }

  bool last_recorded = true;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= params.t_max - 1e-9 * dt) break;
    const StepStats st = kernels::step_parallel(cur, next, dt, params.epsilon);
    check_step(st);
    if (hooks.on_step) hooks.on_step(StepView{k, t, dt, cur, next});
    rec.steps = k + 1;
    const double t_next = static_cast<double>(k + 1) * dt;

    if (st.sup < 0.0) {
      const double t_ext = t + 0.5 * dt;
      rec.extinction_time = t_ext;
      rec.events.push_back({TopologyEvent::Kind::Extinction, t, t_next, components, 0});
      std::swap(cur, next);
      snapshot(t_ext, cur);
      return rec;
    }
    if (params.event_detection && count_sign_changes(cur, next) > 0) {
      const int c = component_count(next);
      if (c != components) {
        rec.events.push_back({TopologyEvent::Kind::ComponentChange, t, t_next, components, c});
        components = c;
      }
    }
    std::swap(cur, next);
    last_recorded = (k + 1) % static_cast<std::size_t>(params.snapshot_stride) == 0;
    if (last_recorded) snapshot(t_next, cur);
  }
  if (!last_recorded) snapshot(static_cast<double>(rec.steps) * dt, cur);
  return rec;
}

double avoidance_check(const ScalarField& vA0, const ScalarField& vB0, const EvolutionParams& params) {
  validate(params);
  if (vA0.grid != vB0.grid) throw Error(ErrorCode::InvalidSpec, "fields live on different grids");
  for (std::size_t n = 0; n < vA0.size(); ++n)
    if (vA0[n] > vB0[n])
      throw Error(ErrorCode::PreorderViolated, "vA0 exceeds vB0 at node " + std::to_string(n));

  const double dt = cfl_dt(vA0.grid, params);
  ScalarField a = vA0, b = vB0;
  ScalarField a_next(a.grid), b_next(b.grid);
  double worst = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= params.t_max - 1e-9 * dt) break;
    const StepStats sa = kernels::step_parallel(a, a_next, dt, params.epsilon);
    const StepStats sb = kernels::step_parallel(b, b_next, dt, params.epsilon);
    check_step(sa);
    check_step(sb);
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    double w = 0.0;
#pragma omp parallel for schedule(static) reduction(max : w)
    for (std::ptrdiff_t i = 0; i < n; ++i) w = std::max(w, a_next.values[i] - b_next.values[i]);
    worst = std::max(worst, w);
    std::swap(a, a_next);
    std::swap(b, b_next);
    if (sa.sup < 0.0) break;
  }
  return worst;
}

ScalarField reinitialize(const ScalarField& v, int iterations) {
  if (iterations < 0) throw Error(ErrorCode::InvalidSpec, "iterations must be >= 0");
  if (iterations == 0) return v;
  const Grid& g = v.grid;
  const double h = g.h;
  const double dtau = 0.25 * h;
  std::vector<double> sign(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) sign[n] = v[n] / std::sqrt(v[n] * v[n] + h * h);

  ScalarField cur = v, next(g);
  const auto total = static_cast<std::ptrdiff_t>(v.size());
  for (int it = 0; it < iterations; ++it) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t n = 0; n < total; ++n) {
      const Index i = g.unravel(static_cast<std::size_t>(n));
      const double c = cur.values[n];
      const double s = sign[n];
      double grad2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const std::ptrdiff_t st = g.stride(a);
        const int ia = i[a], na = g.shape[a];
        // values at offsets -2..2 along the axis, mirrored at the boundary
        auto at = [&](int d) {
          const int j = std::clamp(ia + d, 0, na - 1);
          return cur.values[n + (j - ia) * st];
        };
        const double m2 = at(-2), m1 = at(-1), p1 = at(1), p2 = at(2);
        // second-order ENO one-sided differences
        const double d2m = (m2 - m1) - (m1 - c);
        const double d20 = (m1 - c) - (c - p1);
        const double d2p = (c - p1) - (p1 - p2);
        auto minmod = [](double x, double y) {
          return x * y <= 0.0 ? 0.0 : (std::abs(x) < std::abs(y) ? x : y);
        };
        const double back = ((c - m1) + 0.5 * minmod(d2m, d20)) / h;
        const double fwd = ((p1 - c) - 0.5 * minmod(d20, d2p)) / h;
        if (s > 0.0) {
          const double p = std::max(back, 0.0), m = std::min(fwd, 0.0);
          grad2 += std::max(p * p, m * m);
        } else {
          const double p = std::min(back, 0.0), m = std::max(fwd, 0.0);
          grad2 += std::max(p * p, m * m);
        }
      }
      next.values[n] = c - dtau * s * (std::sqrt(grad2) - 1.0);
    }
    std::swap(cur, next);
  }

  const FrontMesh front = extract_front(cur);
  double drift = 0.0;
  for (const Vec& p : front.vertices) {
    Index near{0, 0, 0};
    for (int a = 0; a < g.dim; ++a)
      near[a] = std::clamp(static_cast<int>(std::lround((p[a] - g.origin[a]) / h)), 0, g.shape[a] - 1);
    const double gn = std::max(norm(gradient_central(v, near), g.dim), 1e-12);
    drift = std::max(drift, std::abs(interpolate(v, p)) / gn);
  }
  if (drift > 0.5 * h)
    throw Error(ErrorCode::FrontDrift,
                "zero set moved " + std::to_string(drift / h) + " cells during reinitialization");
  return cur;
}

double min_front_mean_curvature(const ScalarField& v) {
  const Grid& g = v.grid;
  double hmin = std::numeric_limits<double>::infinity();
  for_each_index(g, [&](const Index& i) {
    if (!g.interior(i, 1)) return;
    const bool in = v.at(i) >= 0.0;
    bool near = false;
    for (int a = 0; a < g.dim && !near; ++a)
      for (int d : {-1, 1}) {
        Index j = i;
        j[a] += d;
        if ((v.at(j) >= 0.0) != in) near = true;
      }
    if (!near) return;
    const double gn = norm(gradient_central(v, i), g.dim);
    if (gn < 1e-12) return;
    hmin = std::min(hmin, -curvature_speed(v, i, 0.0) / gn);
  });
  return hmin;
}

}  // namespace lsmcf

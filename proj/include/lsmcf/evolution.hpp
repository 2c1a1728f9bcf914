#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "lsmcf/grid.hpp"

namespace lsmcf {

struct EvolutionParams {
  double epsilon = 1e-6;      // relative regularization of |grad v|
  double cfl_factor = 0.25;   // dt = cfl_factor * h^2 / (2 dim), in (0, 0.5]
  double t_max = 1.0;
  int snapshot_stride = 100;  // steps between recorded snapshots
  bool event_detection = true;

  bool operator==(const EvolutionParams&) const = default;
};

// Throws InvalidSpec on out-of-range parameters.
void validate(const EvolutionParams& params);

struct TopologyEvent {
  enum class Kind { ComponentChange, Extinction };
  Kind kind = Kind::ComponentChange;
  double t_before = 0.0;  // last time with `from` components
  double t_after = 0.0;   // first time with `to` components
  int from = 0;
  int to = 0;
};

struct FlowRecord {
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> times;
  std::vector<ScalarField> snapshots;  // empty when hooks opt out of retention
  std::vector<TopologyEvent> events;
  std::optional<double> extinction_time;
  int initial_components = 0;
};

struct StepView {
  std::size_t step;  // index of the step just taken (0-based)
  double t_before;
  double dt;
  const ScalarField& before;
  const ScalarField& after;
};

struct FlowHooks {
  std::function<void(const StepView&)> on_step;
  std::function<void(double t, const ScalarField&)> on_snapshot;
  bool retain_snapshots = true;
};

double cfl_dt(const Grid& grid, const EvolutionParams& params);

// Largest admissible explicit step, h^2 / (4 dim).
double max_stable_dt(const Grid& grid);

// One explicit Euler step of the regularized level-set equation. Throws
// CFLViolation, NonFiniteValue or DegenerateGradient.
ScalarField step(const ScalarField& v, double dt, double epsilon);

// Steps until t_max or extinction (sup v < 0). Snapshots every
// snapshot_stride steps, plus the final state. When extinction occurs the final
// snapshot is the first all-negative field and is stamped with the extinction
// time t_k + dt/2, where t_k is the last time with a nonnegative node.
FlowRecord evolve(const ScalarField& v0, const EvolutionParams& params, const FlowHooks& hooks = {});

// Co-evolves two ordered fields (vA0 <= vB0 nodewise) with the same dt until
// A is extinct or t_max, and returns the largest (vA - vB)^+ seen.
double avoidance_check(const ScalarField& vA0, const ScalarField& vB0, const EvolutionParams& params);

// `iterations` pseudo-time steps of v_tau = sign(v0)(1 - |grad v|) with
// Godunov upwinding of second-order ENO differences. Throws FrontDrift if the
// zero set moved more than h/2.
ScalarField reinitialize(const ScalarField& v, int iterations);

// Smallest mean curvature H = -div(grad v/|grad v|) over interior nodes next to
// the zero set (positive for mean-convex fronts with the positive-inside sign).
double min_front_mean_curvature(const ScalarField& v);

}  // namespace lsmcf

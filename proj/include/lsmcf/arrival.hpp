#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsmcf/evolution.hpp"
#include "lsmcf/grid.hpp"

namespace lsmcf {

// First-crossing time u(x) of the evolving front. Invalid nodes (never inside,
// or not swept by t_max) hold u = 0.
struct ArrivalTimeField {
  ScalarField u;
  std::vector<std::uint8_t> valid;  // one 0/1 per node
  double dt = 0.0;
  std::optional<double> extinction_time;
  std::size_t recrossings = 0;  // nodes that turned positive again after crossing

  const Grid& grid() const { return u.grid; }
  bool is_valid(const Index& i) const { return valid[u.grid.linear(i)] != 0; }
  // Every node of the 3^dim neighborhood is valid (and inside the grid).
  bool stencil_valid(const Index& i) const;
};

// Wraps an analytic or loaded field; every node is valid unless a mask is given.
ArrivalTimeField make_arrival_field(ScalarField u, std::vector<std::uint8_t> valid = {});

struct ArrivalRun {
  FlowRecord flow;
  ArrivalTimeField arrival;
};

// Evolves v0 and records, for every node with v0 > 0, the first time v drops
// below zero, interpolated linearly in time:
//   u = t_k + dt * v_k / (v_k - v_{k+1}).
// Throws NoInterior when v0 > 0 nowhere.
ArrivalRun evolve_with_arrival(const ScalarField& v0, const EvolutionParams& params,
                               const FlowHooks& hooks = {});

ArrivalTimeField compute_arrival_time(const ScalarField& v0, const EvolutionParams& params);

// |grad u| div(grad u / |grad u|) + 1 with the regularized operator. Needs a
// fully valid stencil (BoundaryIndex otherwise) and |grad u| above
// max(epsilon, 1e-12) (NearCriticalPoint otherwise).
double arrival_residual(const ArrivalTimeField& u, const Index& idx, double epsilon);

// -(1/k)(x_1^2 + ... + x_{k+1}^2) over the first k+1 coordinates.
// InvalidK unless 1 <= k <= 3 and coords has at least k+1 entries.
double quadratic_model(int k, std::span<const double> coords);

}  // namespace lsmcf

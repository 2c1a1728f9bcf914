#pragma once

#include <cstddef>

#include "lsmcf/grid.hpp"

namespace lsmcf {

// Regularized right-hand side of v_t = |grad v| div(grad v / |grad v|) at an
// interior node:
//   sum_ij (delta_ij - v_i v_j / (|grad v|^2 + e^2)) v_ij,  e = eps * max(|grad v|, 1).
// With eps == 0 this is the unregularized operator; DegenerateGradient is
// thrown when eps == 0 and |grad v| < 1e-12.
double curvature_speed(const ScalarField& v, const Index& idx, double epsilon);

struct StepStats {
  double sup = 0.0;          // max of the new field
  bool finite = true;        // every new value finite
  bool degenerate = false;   // eps == 0 met a vanishing gradient
};

namespace kernels {

// Both kernels write out = in + dt * curvature_speed at interior nodes and copy
// the nearest interior value onto the boundary ring. They perform identical
// arithmetic per node, so their outputs agree bit for bit.

// Node-by-node loop through the public pointwise API. Kept as the testing
// reference for the parallel kernel.
StepStats step_serial_reference(const ScalarField& in, ScalarField& out, double dt, double epsilon);

// OpenMP kernel over the interior (rows distributed statically); the thread
// count never changes any output bit.
StepStats step_parallel(const ScalarField& in, ScalarField& out, double dt, double epsilon);

// Homogeneous Neumann fill: each boundary node copies the value at its index
// clamped into [1, n-2] on every axis.
void fill_boundary(ScalarField& f);

}  // namespace kernels
}  // namespace lsmcf

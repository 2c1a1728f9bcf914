#pragma once

#include "lsmcf/grid.hpp"

namespace lsmcf {

struct EigenSystem {
  Vec values{};     // ascending; entries past dim are zero
  Mat vectors{};    // vectors[i] is the unit eigenvector of values[i]
};

// Cyclic Jacobi rotations on the leading dim x dim block of a symmetric matrix.
EigenSystem eig_sym(const Mat& m, int dim);

Mat symmetrize(const Mat& m);

// Angle in degrees between two lines (sign of the directions ignored).
double line_angle_deg(const Vec& a, const Vec& b, int dim = 3);

// Flips v so its first component with |v_i| > 1e-12 is positive.
Vec sign_normalized(Vec v, int dim = 3);

}  // namespace lsmcf

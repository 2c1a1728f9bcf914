#pragma once

// Pointer-level finite-difference stencils shared by the pointwise API and the
// step kernels. Keeping one definition guarantees that both paths perform the
// same floating-point operations in the same order.

#include <algorithm>
#include <cstddef>

namespace lsmcf::stencil {

struct Coeffs {
  double inv2h;   // 1 / (2h)
  double invh2;   // 1 / h^2
  double inv4h2;  // 1 / (4h^2)

  explicit Coeffs(double h)
      : inv2h(1.0 / (2.0 * h)), invh2(1.0 / (h * h)), inv4h2(1.0 / (4.0 * h * h)) {}
};

inline double first(const double* c, std::ptrdiff_t s, const Coeffs& k) {
  return (c[s] - c[-s]) * k.inv2h;
}

inline double second(const double* c, std::ptrdiff_t s, const Coeffs& k) {
  return ((c[s] - c[0]) - (c[0] - c[-s])) * k.invh2;
}

inline double mixed(const double* c, std::ptrdiff_t sa, std::ptrdiff_t sb, const Coeffs& k) {
  return ((c[sa + sb] - c[sa - sb]) - (c[-sa + sb] - c[-sa - sb])) * k.inv4h2;
}

// Regularized mean-curvature operator
//   sum_ij (delta_ij - g_i g_j / (|g|^2 + e^2)) H_ij,  e = eps * max(|g|, 1),
// written as trace(H) - g^T H g / (|g|^2 + e^2). Returns false when the
// denominator vanishes (eps == 0 and g == 0).
template <int Dim>
inline bool curvature_from_derivs(const double* g, const double (*H)[3], double eps,
                                  double& out) {
  double g2 = 0.0;
  double trace = 0.0;
  for (int a = 0; a < Dim; ++a) {
    g2 += g[a] * g[a];
    trace += H[a][a];
  }
  double quad = 0.0;
  for (int a = 0; a < Dim; ++a) quad += g[a] * g[a] * H[a][a];
  for (int a = 0; a < Dim; ++a)
    for (int b = a + 1; b < Dim; ++b) quad += 2.0 * (g[a] * g[b] * H[a][b]);
  const double denom = g2 + eps * eps * std::max(g2, 1.0);
  if (!(denom > 0.0)) {
    out = trace;
    return false;
  }
  out = trace - quad / denom;
  return true;
}

template <int Dim>
inline void derivs(const double* c, const std::ptrdiff_t* s, const Coeffs& k, double* g,
                   double (*H)[3]) {
  for (int a = 0; a < Dim; ++a) {
    g[a] = first(c, s[a], k);
    H[a][a] = second(c, s[a], k);
  }
  for (int a = 0; a < Dim; ++a)
    for (int b = a + 1; b < Dim; ++b) {
      H[a][b] = mixed(c, s[a], s[b], k);
      H[b][a] = H[a][b];
    }
}

}  // namespace lsmcf::stencil

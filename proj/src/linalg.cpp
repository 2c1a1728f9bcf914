#include "lsmcf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lsmcf {

Mat symmetrize(const Mat& m) {
  Mat s{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = 0.5 * (m[i][j] + m[j][i]);
  return s;
}

EigenSystem eig_sym(const Mat& m, int dim) {
  Mat a = symmetrize(m);
  Mat v{};
  for (int i = 0; i < dim; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < dim; ++p)
      for (int q = p + 1; q < dim; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (int p = 0; p < dim; ++p)
      for (int q = p + 1; q < dim; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < dim; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < dim; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < dim; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }

  int order[3] = {0, 1, 2};
  std::sort(order, order + dim, [&](int x, int y) { return a[x][x] < a[y][y]; });
  EigenSystem out;
  for (int i = 0; i < dim; ++i) {
    out.values[i] = a[order[i]][order[i]];
    for (int k = 0; k < dim; ++k) out.vectors[i][k] = v[k][order[i]];
  }
  return out;
}

double line_angle_deg(const Vec& a, const Vec& b, int dim) {
  const double na = norm(a, dim), nb = norm(b, dim);
  const double c = std::min(1.0, std::abs(dot(a, b, dim)) / (na * nb));
  return std::acos(c) * 180.0 / std::numbers::pi;
}

Vec sign_normalized(Vec v, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (std::abs(v[i]) <= 1e-12) continue;
    if (v[i] < 0)
      for (int k = 0; k < dim; ++k) v[k] = -v[k];
    break;
  }
  return v;
}

}  // namespace lsmcf

#include "lsmcf/grid.hpp"

#include <cmath>
#include <string>

#include "lsmcf/error.hpp"
#include "lsmcf/stencil.hpp"

namespace lsmcf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorCode::AnisotropicSpacing: return "AnisotropicSpacing";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::BoundaryIndex: return "BoundaryIndex";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SpecGridDimMismatch: return "SpecGridDimMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UnresolvableGap: return "UnresolvableGap";
    case ErrorCode::DegenerateGradient: return "DegenerateGradient";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::PreorderViolated: return "PreorderViolated";
    case ErrorCode::FrontDrift: return "FrontDrift";
    case ErrorCode::NoInterior: return "NoInterior";
    case ErrorCode::NearCriticalPoint: return "NearCriticalPoint";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::Unclassifiable: return "Unclassifiable";
    case ErrorCode::EmptyLevelSet: return "EmptyLevelSet";
    case ErrorCode::DegenerateMoments: return "DegenerateMoments";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::MultipleComponents: return "MultipleComponents";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::SuiteUnknown: return "SuiteUnknown";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return 3;
    case ErrorCode::IoError:
    case ErrorCode::FormatError: return 4;
    case ErrorCode::SpecGridDimMismatch:
    case ErrorCode::InvalidSpec:
    case ErrorCode::UnresolvableGap: return 5;
    case ErrorCode::DimensionUnsupported:
    case ErrorCode::AnisotropicSpacing:
    case ErrorCode::ResolutionTooSmall:
    case ErrorCode::BoundaryIndex:
    case ErrorCode::OutOfDomain: return 6;
    case ErrorCode::DegenerateGradient:
    case ErrorCode::CFLViolation:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::PreorderViolated:
    case ErrorCode::FrontDrift: return 7;
    case ErrorCode::NoInterior:
    case ErrorCode::NearCriticalPoint:
    case ErrorCode::InvalidK:
    case ErrorCode::Unclassifiable:
    case ErrorCode::EmptyLevelSet:
    case ErrorCode::DegenerateMoments:
    case ErrorCode::EmptyMesh:
    case ErrorCode::MultipleComponents: return 8;
    case ErrorCode::SuiteUnknown: return 10;
  }
  return 1;
}

bool Grid::contains(const Index& i) const {
  for (int a = 0; a < 3; ++a)
    if (i[a] < 0 || i[a] >= shape[a]) return false;
  return true;
}

bool Grid::interior(const Index& i, int margin) const {
  for (int a = 0; a < dim; ++a)
    if (i[a] < margin || i[a] >= shape[a] - margin) return false;
  return dim == 3 || i[2] == 0;
}

Grid make_grid(int dim, std::span<const Extent> extents, std::span<const int> resolution) {
  if (dim != 2 && dim != 3)
    throw Error(ErrorCode::DimensionUnsupported, "dim must be 2 or 3, got " + std::to_string(dim));
  if (extents.size() != static_cast<std::size_t>(dim) ||
      resolution.size() != static_cast<std::size_t>(dim))
    throw Error(ErrorCode::DimensionUnsupported, "extents/resolution must have dim entries");
  Grid g;
  g.dim = dim;
  double h0 = 0.0;
  for (int a = 0; a < dim; ++a) {
    if (resolution[a] < 8)
      throw Error(ErrorCode::ResolutionTooSmall,
                  "axis " + std::to_string(a) + " has " + std::to_string(resolution[a]) + " nodes");
    if (!(extents[a][1] > extents[a][0]))
      throw Error(ErrorCode::InvalidSpec, "extent max must exceed min on axis " + std::to_string(a));
    const double h = (extents[a][1] - extents[a][0]) / (resolution[a] - 1);
    if (a == 0) {
      h0 = h;
    } else if (std::abs(h - h0) > 1e-12 * h0) {
      throw Error(ErrorCode::AnisotropicSpacing,
                  "spacing " + std::to_string(h) + " on axis " + std::to_string(a) +
                      " differs from " + std::to_string(h0));
    }
    g.shape[a] = resolution[a];
    g.origin[a] = extents[a][0];
  }
  g.h = h0;
  return g;
}

double norm(const Vec& v, int dim) { return std::sqrt(dot(v, v, dim)); }

double dot(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

Vec gradient_central(const ScalarField& f, const Index& idx) {
  const Grid& g = f.grid;
  if (!g.contains(idx)) throw Error(ErrorCode::BoundaryIndex, "index outside grid");
  const stencil::Coeffs k(g.h);
  const double* c = f.values.data() + g.linear(idx);
  Vec out{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    const std::ptrdiff_t s = g.stride(a);
    const int n = g.shape[a];
    if (idx[a] > 0 && idx[a] < n - 1) {
      out[a] = stencil::first(c, s, k);
    } else if (idx[a] == 0) {
      out[a] = (4.0 * (c[s] - c[0]) - (c[2 * s] - c[0])) * k.inv2h;
    } else {
      out[a] = (4.0 * (c[0] - c[-s]) - (c[0] - c[-2 * s])) * k.inv2h;
    }
  }
  return out;
}

Mat hessian_central(const ScalarField& f, const Index& idx) {
  const Grid& g = f.grid;
  if (!g.interior(idx, 1))
    throw Error(ErrorCode::BoundaryIndex, "Hessian needs one cell of margin");
  const stencil::Coeffs k(g.h);
  const double* c = f.values.data() + g.linear(idx);
  const std::ptrdiff_t s[3] = {g.stride(0), g.stride(1), g.stride(2)};
  double gr[3];
  double H[3][3] = {};
  if (g.dim == 2)
    stencil::derivs<2>(c, s, k, gr, H);
  else
    stencil::derivs<3>(c, s, k, gr, H);
  Mat out{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out[a][b] = H[a][b];
  return out;
}

double interpolate(const ScalarField& f, const Vec& p) {
  const Grid& g = f.grid;
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    double s = (p[a] - g.origin[a]) / g.h;
    const double n1 = g.shape[a] - 1;
    if (s < -1e-9 || s > n1 + 1e-9 || !std::isfinite(s))
      throw Error(ErrorCode::OutOfDomain, "point outside grid bounding box");
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-9) s = r;
    s = std::clamp(s, 0.0, n1);
    int i0 = static_cast<int>(std::floor(s));
    if (i0 >= g.shape[a] - 1) i0 = g.shape[a] - 2;
    base[a] = i0;
    frac[a] = s - i0;
  }
  auto val = [&](int dx, int dy, int dz) {
    return f.at(Index{base[0] + dx, base[1] + dy, base[2] + dz});
  };
  auto lerp = [](double a, double b, double t) { return t == 1.0 ? b : a + t * (b - a); };
  auto plane = [&](int dz) {
    return lerp(lerp(val(0, 0, dz), val(1, 0, dz), frac[0]),
                lerp(val(0, 1, dz), val(1, 1, dz), frac[0]), frac[1]);
  };
  if (g.dim == 2) return plane(0);
  return lerp(plane(0), plane(1), frac[2]);
}

}  // namespace lsmcf

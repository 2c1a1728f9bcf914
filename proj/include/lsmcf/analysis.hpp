#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsmcf/arrival.hpp"
#include "lsmcf/evolution.hpp"
#include "lsmcf/grid.hpp"

namespace lsmcf {

// Match of a Hessian spectrum against the cylinder model of index k:
// eigenvalue -1/k with multiplicity k+1 and 0 with multiplicity n-k
// (n = dim - 1). k == n is the spherical case.
struct Classification {
  int k = 0;
  bool spherical = false;
  double deviation = 0.0;  // max |eigenvalue - model| over the spectrum
};

// Best k over 1..n; never throws.
Classification match_spectrum(const Vec& eigenvalues, int dim);

// The ascending model spectrum for index k.
Vec model_spectrum(int k, int dim);

struct CriticalPointReport {
  int dim = 3;
  Vec location{};       // cluster centroid
  Index node{};         // cluster node nearest the centroid
  double value = 0.0;   // estimated critical value of u (the singular time)
  Mat hessian{};        // symmetrized, at `node`
  Vec eigenvalues{};    // ascending
  Mat eigenvectors{};   // eigenvectors[i] belongs to eigenvalues[i]
  Classification fit;   // best spectrum match (may exceed the tolerance)
  std::optional<Vec> axis;  // kernel direction when cylindrical
  double gradient_norm = 0.0;
  std::size_t cluster_size = 0;
};

// Throws Unclassifiable when the best deviation exceeds tol_eig.
Classification classify(const CriticalPointReport& report, double tol_eig = 0.15);

// Nodes with |grad u| < tol (default 2h) and a fully valid stencil, grouped by
// 8/26-connectivity in lexicographic order, one report per group.
std::vector<CriticalPointReport> find_critical_points(const ArrivalTimeField& u, double tol = 0.0);

// Critical value estimated from a nearby node: the quadratic model with the
// node's Hessian is maximized along its strongly curved directions.
double critical_value_estimate(const ArrivalTimeField& u, const Index& node);

// Axis of the level set {u = level} near a critical point: the eigenvector of
// the smallest eigenvalue of the mean n n^T over unit normals sampled where the
// level crosses grid edges inside the ball of `radius` (default 10h).
// Throws EmptyLevelSet, or DegenerateMoments when the normals are too
// isotropic to single out a direction.
Vec axis_fit(const ArrivalTimeField& u, const CriticalPointReport& critical, double level,
             double radius = 0.0);

// Largest pairwise angle (degrees) between the fitted axes at >= 3 levels.
double axis_uniqueness(const ArrivalTimeField& u, const CriticalPointReport& critical,
                       std::span<const double> levels, double radius = 0.0);
double max_pairwise_axis_angle(std::span<const Vec> axes, int dim = 3);

struct SingularPoint {
  Index node{};
  Vec position{};
  double value = 0.0;  // critical_value_estimate at the node
  double gradient_norm = 0.0;
  Vec eigenvalues{};
  Mat eigenvectors{};
  Classification fit;
  std::size_t component = 0;
};

struct SingularComponent {
  std::vector<std::size_t> points;  // indices into SingularSet::points
  Vec centroid{};
  double diameter = 0.0;
  bool curve_like = false;
  double value = 0.0;  // value at the point of smallest gradient
  // Curve-like components only: representatives chained by nearest neighbour.
  std::vector<Vec> chain;
  std::vector<double> chain_values;
  std::vector<Vec> tangents;
  bool closed = false;
  double loop_length = 0.0;
  double loop_radius = 0.0;  // mean distance of chain vertices from their centroid
};

struct SingularSet {
  int dim = 3;
  double tol = 0.0;
  double h = 0.0;
  std::vector<SingularPoint> points;  // lexicographic node order
  std::vector<std::pair<std::size_t, std::size_t>> adjacency;
  std::vector<SingularComponent> components;
};

// Every sub-threshold node (tol defaults to 2h) with its classification.
// Components wider than the ball a compact critical point produces
// (2 n tol + 2h) are treated as curves and chained.
SingularSet singular_set(const ArrivalTimeField& u, double tol = 0.0);

// Splits sorted values wherever consecutive entries differ by more than gap.
std::vector<std::vector<double>> group_values(std::vector<double> values, double gap);

struct C2Tolerances {
  double dt = 0.0;               // singular values must agree within 3 dt
  double eig_tol = 0.15;
  double axis_tol_deg = 15.0;
  double axis_radius = 0.0;      // ball radius for tangent checks (default 6h)
};

struct C2Verdict {
  enum class Case { PointSpherical, ClosedCurveCylindrical };
  bool is_c2 = false;
  std::optional<Case> kind;
  std::vector<std::string> reasons;  // "pass: ..." / "fail: ..."
  std::vector<double> singular_values;
  double max_axis_angle_deg = 0.0;
};

std::string to_string(C2Verdict::Case c);

// Numerical proxy of the C^2 characterization: one singular time, one
// connected singular component, consistent classification matching the
// component's dimension, and (cylindrical case) fitted axes along the
// chained curve's tangents.
C2Verdict c2_classify(const ArrivalTimeField& u, const SingularSet& set,
                      std::span<const TopologyEvent> events, const C2Tolerances& tol);

struct SingularityEvent {
  enum class Kind { Spherical, Cylindrical, NeckPinchTopologyChange, Extinction };
  double time = 0.0;
  Kind kind = Kind::Spherical;
  std::vector<Vec> locations;
};

std::string to_string(SingularityEvent::Kind k);

// Merges flow events with the singular set's components, ordered by time.
std::vector<SingularityEvent> singularity_events(const SingularSet& set,
                                                 std::span<const TopologyEvent> events);

}  // namespace lsmcf

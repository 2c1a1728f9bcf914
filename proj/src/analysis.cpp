#include "lsmcf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "lsmcf/error.hpp"
#include "lsmcf/linalg.hpp"
#include "lsmcf/measures.hpp"

namespace lsmcf {
namespace {

Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double dist(const Vec& a, const Vec& b, int dim) { return norm(sub(a, b), dim); }

double default_tol(const Grid& g, double tol) { return tol > 0.0 ? tol : 2.0 * g.h; }

// Sub-threshold nodes and their 8/26-connected groups.
struct Candidates {
  std::vector<std::size_t> nodes;              // lexicographic
  std::vector<double> gradient_norms;
  std::vector<std::ptrdiff_t> slot;            // node -> index in `nodes`, -1 if absent
  std::vector<std::vector<std::size_t>> groups;  // indices into `nodes`
};

template <class Fn>
void for_each_neighbor(const Grid& g, const Index& i, Fn&& fn) {
  const int zr = g.dim == 3 ? 1 : 0;
  for (int dz = -zr; dz <= zr; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const Index j{i[0] + dx, i[1] + dy, i[2] + dz};
        if (g.contains(j)) fn(j);
      }
}

Candidates collect(const ArrivalTimeField& u, double tol) {
  const Grid& g = u.grid();
  Candidates c;
  c.slot.assign(g.size(), -1);
  for_each_index(g, [&](const Index& i) {
    if (!u.stencil_valid(i)) return;
    const double gn = norm(gradient_central(u.u, i), g.dim);
    if (gn >= tol) return;
    const std::size_t n = g.linear(i);
    c.slot[n] = static_cast<std::ptrdiff_t>(c.nodes.size());
    c.nodes.push_back(n);
    c.gradient_norms.push_back(gn);
  });
  std::vector<bool> seen(c.nodes.size(), false);
  for (std::size_t s = 0; s < c.nodes.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> group;
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      group.push_back(cur);
      for_each_neighbor(g, g.unravel(c.nodes[cur]), [&](const Index& j) {
        const std::ptrdiff_t k = c.slot[g.linear(j)];
        if (k >= 0 && !seen[k]) {
          seen[k] = true;
          queue.push_back(static_cast<std::size_t>(k));
        }
      });
    }
    std::sort(group.begin(), group.end());
    c.groups.push_back(std::move(group));
  }
  return c;
}

double diameter(const std::vector<Vec>& pts, int dim) {
  double d = 0.0;
  if (pts.size() <= 5000) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, dist(pts[i], pts[j], dim));
    return d;
  }
  // two sweeps; within a factor of two of the true diameter
  std::size_t far = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (dist(pts[i], pts[0], dim) > dist(pts[far], pts[0], dim)) far = i;
  for (const Vec& p : pts) d = std::max(d, dist(p, pts[far], dim));
  return d;
}

void chain_component(const SingularSet& set, SingularComponent& comp) {
  const int dim = set.dim;
  const double r_rep = 3.0 * set.h;
  const auto& ids = comp.points;
  // Seeds in lexicographic order, then a few mean-shift passes pull every seed
  // onto the middle of the tube of sub-threshold nodes; near-duplicates are
  // dropped afterwards.
  std::vector<Vec> seeds;
  std::vector<bool> assigned(ids.size(), false);
  for (std::size_t s = 0; s < ids.size(); ++s) {
    if (assigned[s]) continue;
    const Vec seed = set.points[ids[s]].position;
    seeds.push_back(seed);
    for (std::size_t t = s; t < ids.size(); ++t)
      if (!assigned[t] && dist(set.points[ids[t]].position, seed, dim) <= r_rep) assigned[t] = true;
  }
  for (int pass = 0; pass < 3; ++pass)
    for (Vec& c : seeds) {
      Vec m{};
      std::size_t count = 0;
      for (std::size_t id : ids) {
        const Vec& p = set.points[id].position;
        if (dist(p, c, dim) > r_rep) continue;
        for (int a = 0; a < 3; ++a) m[a] += p[a];
        ++count;
      }
      if (count == 0) continue;
      for (int a = 0; a < 3; ++a) c[a] = m[a] / static_cast<double>(count);
    }
  std::vector<Vec> reps;
  std::vector<double> rep_values;
  for (const Vec& c : seeds) {
    bool dup = false;
    for (const Vec& r : reps) dup = dup || dist(r, c, dim) < 2.0 * set.h;
    if (dup) continue;
    std::size_t best = ids.front();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t id : ids) {
      const SingularPoint& p = set.points[id];
      if (dist(p.position, c, dim) > r_rep) continue;
      if (p.gradient_norm < bd) {
        bd = p.gradient_norm;
        best = id;
      }
    }
    reps.push_back(c);
    rep_values.push_back(set.points[best].value);
  }

  const double reach = 3.0 * r_rep;
  std::vector<bool> visited(reps.size(), false);
  std::deque<std::size_t> chain{0};
  visited[0] = true;
  auto nearest = [&](std::size_t from) {
    std::ptrdiff_t best = -1;
    double bd = reach;
    for (std::size_t j = 0; j < reps.size(); ++j) {
      if (visited[j]) continue;
      const double d = dist(reps[j], reps[from], dim);
      if (d <= bd) {
        bd = d;
        best = static_cast<std::ptrdiff_t>(j);
      }
    }
    return best;
  };
  for (std::ptrdiff_t nx; (nx = nearest(chain.back())) >= 0;) {
    visited[nx] = true;
    chain.push_back(static_cast<std::size_t>(nx));
  }
  const bool wrapped = chain.size() >= 3 && dist(reps[chain.back()], reps[chain.front()], dim) <= reach;
  if (!(wrapped && chain.size() == reps.size()))
    for (std::ptrdiff_t nx; (nx = nearest(chain.front())) >= 0;) {
      visited[nx] = true;
      chain.push_front(static_cast<std::size_t>(nx));
    }

  const std::size_t m = chain.size();
  comp.closed = m == reps.size() && m >= 3 && dist(reps[chain.back()], reps[chain.front()], dim) <= reach;
  for (std::size_t i : chain) {
    comp.chain.push_back(reps[i]);
    comp.chain_values.push_back(rep_values[i]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t lo = i > 0 ? i - 1 : (comp.closed ? m - 1 : 0);
    std::size_t hi = i + 1 < m ? i + 1 : (comp.closed ? 0 : m - 1);
    Vec t = sub(comp.chain[hi], comp.chain[lo]);
    const double tn = norm(t, dim);
    if (tn > 0.0)
      for (double& x : t) x /= tn;
    comp.tangents.push_back(t);
  }
  Vec c{};
  for (const Vec& p : comp.chain)
    for (int a = 0; a < 3; ++a) c[a] += p[a] / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    comp.loop_radius += dist(comp.chain[i], c, dim) / static_cast<double>(m);
    if (i + 1 < m || comp.closed) comp.loop_length += dist(comp.chain[i], comp.chain[(i + 1) % m], dim);
  }
}

}  // namespace

Vec model_spectrum(int k, int dim) {
  Vec m{};
  for (int i = 0; i < dim; ++i) m[i] = i <= k ? -1.0 / k : 0.0;
  return m;
}

Classification match_spectrum(const Vec& eigenvalues, int dim) {
  const int n = dim - 1;
  Classification best;
  best.deviation = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k) {
    const Vec m = model_spectrum(k, dim);
    double dev = 0.0;
    for (int i = 0; i < dim; ++i) dev = std::max(dev, std::abs(eigenvalues[i] - m[i]));
    if (dev < best.deviation) best = {k, k == n, dev};
  }
  return best;
}

Classification classify(const CriticalPointReport& report, double tol_eig) {
  const Classification c = match_spectrum(report.eigenvalues, report.dim);
  if (c.deviation > tol_eig)
    throw Error(ErrorCode::Unclassifiable,
                "spectrum deviates by " + std::to_string(c.deviation) + " from every model");
  return c;
}

double critical_value_estimate(const ArrivalTimeField& u, const Index& node) {
  const int dim = u.grid().dim;
  const Vec g = gradient_central(u.u, node);
  const EigenSystem e = eig_sym(hessian_central(u.u, node), dim);
  double v = u.u.at(node);
  for (int i = 0; i < dim; ++i) {
    if (e.values[i] >= -0.2) continue;
    const double p = dot(e.vectors[i], g, dim);
    v += 0.5 * p * p / -e.values[i];
  }
  return v;
}

std::vector<CriticalPointReport> find_critical_points(const ArrivalTimeField& u, double tol) {
  const Grid& g = u.grid();
  const Candidates c = collect(u, default_tol(g, tol));
  std::vector<CriticalPointReport> out;
  for (const auto& group : c.groups) {
    CriticalPointReport r;
    r.dim = g.dim;
    r.cluster_size = group.size();
    for (std::size_t s : group) {
      const Vec p = g.position(g.unravel(c.nodes[s]));
      for (int a = 0; a < 3; ++a) r.location[a] += p[a] / static_cast<double>(group.size());
    }
    std::size_t pick = group.front();
    for (std::size_t s : group)
      if (dist(g.position(g.unravel(c.nodes[s])), r.location, g.dim) <
          dist(g.position(g.unravel(c.nodes[pick])), r.location, g.dim))
        pick = s;
    r.node = g.unravel(c.nodes[pick]);
    r.gradient_norm = c.gradient_norms[pick];
    r.value = critical_value_estimate(u, r.node);
    r.hessian = symmetrize(hessian_central(u.u, r.node));
    const EigenSystem e = eig_sym(r.hessian, g.dim);
    r.eigenvalues = e.values;
    r.eigenvectors = e.vectors;
    r.fit = match_spectrum(r.eigenvalues, g.dim);
    if (!r.fit.spherical) r.axis = sign_normalized(e.vectors[g.dim - 1], g.dim);
    out.push_back(r);
  }
  return out;
}

Vec axis_fit(const ArrivalTimeField& u, const CriticalPointReport& critical, double level,
             double radius) {
  const Grid& g = u.grid();
  if (radius <= 0.0) radius = 10.0 * g.h;
  Mat t{};
  std::size_t count = 0;
  for (const EdgeCrossing& x : level_crossings(u.u, level, critical.location, radius)) {
    Index j = x.node;
    j[x.axis] += 1;
    if (!u.stencil_valid(x.node) || !u.stencil_valid(j)) continue;
    const Vec ga = gradient_central(u.u, x.node);
    const Vec gb = gradient_central(u.u, j);
    Vec n{};
    for (int a = 0; a < g.dim; ++a) n[a] = ga[a] + x.t * (gb[a] - ga[a]);
    const double nn = norm(n, g.dim);
    if (nn < 1e-12) continue;
    for (int a = 0; a < g.dim; ++a)
      for (int b = 0; b < g.dim; ++b) t[a][b] += n[a] * n[b] / (nn * nn);
    ++count;
  }
  if (count == 0)
    throw Error(ErrorCode::EmptyLevelSet, "no crossing of level " + std::to_string(level) +
                                              " within radius " + std::to_string(radius));
  const EigenSystem e = eig_sym(t, g.dim);
  const double mu0 = e.values[0], mu1 = e.values[1];
  if (!(mu1 > 0.0) || (mu1 - mu0) / mu1 < 0.5)
    throw Error(ErrorCode::DegenerateMoments, "normal moments are nearly isotropic");
  return sign_normalized(e.vectors[0], g.dim);
}

double max_pairwise_axis_angle(std::span<const Vec> axes, int dim) {
  double worst = 0.0;
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = i + 1; j < axes.size(); ++j)
      worst = std::max(worst, line_angle_deg(axes[i], axes[j], dim));
  return worst;
}

double axis_uniqueness(const ArrivalTimeField& u, const CriticalPointReport& critical,
                       std::span<const double> levels, double radius) {
  if (levels.size() < 3) throw Error(ErrorCode::InvalidSpec, "axis uniqueness needs >= 3 levels");
  std::vector<Vec> axes;
  for (double level : levels) axes.push_back(axis_fit(u, critical, level, radius));
  return max_pairwise_axis_angle(axes, u.grid().dim);
}

SingularSet singular_set(const ArrivalTimeField& u, double tol) {
  const Grid& g = u.grid();
  SingularSet set;
  set.dim = g.dim;
  set.h = g.h;
  set.tol = default_tol(g, tol);
  const Candidates c = collect(u, set.tol);

  for (std::size_t s = 0; s < c.nodes.size(); ++s) {
    SingularPoint p;
    p.node = g.unravel(c.nodes[s]);
    p.position = g.position(p.node);
    p.gradient_norm = c.gradient_norms[s];
    p.value = critical_value_estimate(u, p.node);
    const EigenSystem e = eig_sym(hessian_central(u.u, p.node), g.dim);
    p.eigenvalues = e.values;
    p.eigenvectors = e.vectors;
    p.fit = match_spectrum(e.values, g.dim);
    set.points.push_back(p);
  }
  for (std::size_t s = 0; s < c.nodes.size(); ++s)
    for_each_neighbor(g, set.points[s].node, [&](const Index& j) {
      const std::ptrdiff_t k = c.slot[g.linear(j)];
      if (k > static_cast<std::ptrdiff_t>(s)) set.adjacency.emplace_back(s, static_cast<std::size_t>(k));
    });

  const int n = g.dim - 1;
  for (std::size_t ci = 0; ci < c.groups.size(); ++ci) {
    SingularComponent comp;
    comp.points = c.groups[ci];
    std::vector<Vec> pos;
    std::size_t best = comp.points.front();
    for (std::size_t s : comp.points) {
      set.points[s].component = ci;
      pos.push_back(set.points[s].position);
      for (int a = 0; a < 3; ++a) comp.centroid[a] += set.points[s].position[a] / comp.points.size();
      if (set.points[s].gradient_norm < set.points[best].gradient_norm) best = s;
    }
    comp.value = set.points[best].value;
    comp.diameter = diameter(pos, g.dim);
    comp.curve_like = comp.diameter > 2.0 * n * set.tol + 2.0 * g.h;
    if (comp.curve_like) chain_component(set, comp);
    set.components.push_back(std::move(comp));
  }
  return set;
}

std::vector<std::vector<double>> group_values(std::vector<double> values, double gap) {
  std::sort(values.begin(), values.end());
  std::vector<std::vector<double>> groups;
  for (double v : values) {
    if (groups.empty() || v - groups.back().back() > gap) groups.emplace_back();
    groups.back().push_back(v);
  }
  return groups;
}

std::string to_string(C2Verdict::Case c) {
  return c == C2Verdict::Case::PointSpherical ? "PointSpherical" : "ClosedCurveCylindrical";
}

C2Verdict c2_classify(const ArrivalTimeField& u, const SingularSet& set,
                      std::span<const TopologyEvent> events, const C2Tolerances& tol) {
  C2Verdict v;
  const int n = set.dim - 1;
  bool ok = true;
  auto note = [&](bool pass, const std::string& what) {
    v.reasons.push_back((pass ? "pass: " : "fail: ") + what);
    ok = ok && pass;
  };

  if (set.components.empty()) {
    v.reasons.push_back("fail: no singular points");
    return v;
  }

  for (const auto& comp : set.components) {
    if (comp.curve_like)
      v.singular_values.insert(v.singular_values.end(), comp.chain_values.begin(), comp.chain_values.end());
    else
      v.singular_values.push_back(comp.value);
  }
  const auto [lo, hi] = std::minmax_element(v.singular_values.begin(), v.singular_values.end());
  const double window = 3.0 * tol.dt;
  // Nodes within a cell of a singular point cross up to h^2/2 before it, so a
  // collapsing curve may fragment on the grid just before its singular time.
  const double collapse = window + 0.5 * set.h * set.h;
  std::size_t early = 0;
  for (const auto& e : events)
    if (e.kind == TopologyEvent::Kind::ComponentChange && e.t_after < *lo - collapse) ++early;
  const double spread = *hi - *lo;
  if (spread <= window && early == 0)
    note(true, "single singular time (spread " + std::to_string(spread) + ")");
  else
    note(false, "multiple singular times (spread " + std::to_string(spread) + ", " +
                    std::to_string(early) + " earlier topology changes)");

  note(set.components.size() == 1,
       "singular set has " + std::to_string(set.components.size()) + " component(s)");

  const SingularComponent& comp = set.components.front();
  const int proxy_dim = comp.curve_like ? 1 : 0;
  int k = -1;
  bool consistent = true;
  for (const auto& p : set.points) {
    if (p.fit.deviation > tol.eig_tol || (k >= 0 && p.fit.k != k)) consistent = false;
    if (k < 0) k = p.fit.k;
  }
  note(consistent && n - k == proxy_dim,
       consistent ? "classification k=" + std::to_string(k) + " on a " +
                        (proxy_dim ? "curve" : "point") + "-like set"
                  : std::string("inconsistent point classifications"));

  if (consistent && k < n && comp.curve_like) {
    note(comp.closed, comp.closed ? "singular curve is closed" : "singular curve is open");
    const double radius = tol.axis_radius > 0.0 ? tol.axis_radius : 6.0 * set.h;
    bool fitted = true;
    for (std::size_t i = 0; i < comp.chain.size(); ++i) {
      CriticalPointReport r;
      r.dim = set.dim;
      r.location = comp.chain[i];
      r.value = comp.chain_values[i];
      try {
        const Vec axis = axis_fit(u, r, r.value - 4.5 * set.h * set.h, radius);
        v.max_axis_angle_deg = std::max(v.max_axis_angle_deg, line_angle_deg(axis, comp.tangents[i], set.dim));
      } catch (const Error&) {
        fitted = false;
      }
    }
    note(fitted && v.max_axis_angle_deg <= tol.axis_tol_deg,
         fitted ? "axes within " + std::to_string(v.max_axis_angle_deg) + " deg of tangents"
                : std::string("axis fit failed along the curve"));
  }

  if (ok) {
    if (!comp.curve_like && k == n)
      v.kind = C2Verdict::Case::PointSpherical;
    else if (comp.curve_like && comp.closed && k == n - 1 && set.dim == 3)
      v.kind = C2Verdict::Case::ClosedCurveCylindrical;
    else
      note(false, "singular set fits neither case");
  }
  v.is_c2 = ok && v.kind.has_value();
  return v;
}

std::string to_string(SingularityEvent::Kind k) {
  switch (k) {
    case SingularityEvent::Kind::Spherical: return "Spherical";
    case SingularityEvent::Kind::Cylindrical: return "Cylindrical";
    case SingularityEvent::Kind::NeckPinchTopologyChange: return "NeckPinchTopologyChange";
    case SingularityEvent::Kind::Extinction: return "Extinction";
  }
  return "?";
}

std::vector<SingularityEvent> singularity_events(const SingularSet& set,
                                                 std::span<const TopologyEvent> events) {
  std::vector<SingularityEvent> out;
  auto near = [&](double t, double window) {
    std::vector<Vec> locs;
    for (const auto& c : set.components)
      if (std::abs(c.value - t) <= window) locs.push_back(c.centroid);
    return locs;
  };
  for (const auto& e : events) {
    const double window = 3.0 * (e.t_after - e.t_before);
    if (e.kind == TopologyEvent::Kind::ComponentChange)
      out.push_back({e.t_after, SingularityEvent::Kind::NeckPinchTopologyChange, near(e.t_after, window)});
    else
      out.push_back({0.5 * (e.t_before + e.t_after), SingularityEvent::Kind::Extinction,
                     near(e.t_after, window)});
  }
  for (const auto& c : set.components) {
    std::size_t best = c.points.front();
    for (std::size_t s : c.points)
      if (set.points[s].gradient_norm < set.points[best].gradient_norm) best = s;
    SingularityEvent ev;
    ev.time = c.value;
    ev.kind = set.points[best].fit.spherical ? SingularityEvent::Kind::Spherical
                                             : SingularityEvent::Kind::Cylindrical;
    ev.locations = c.curve_like ? c.chain : std::vector<Vec>{c.centroid};
    out.push_back(std::move(ev));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SingularityEvent& a, const SingularityEvent& b) { return a.time < b.time; });
  return out;
}

}  // namespace lsmcf

#include "lsmcf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "lsmcf/error.hpp"

namespace lsmcf {
namespace {

// ---- cube / face tables ---------------------------------------------------

struct CubeTables {
  std::array<std::array<int, 2>, 12> edge_corners{};  // lower corner first
  std::array<int, 12> edge_axis{};
  std::array<std::array<int, 4>, 6> face_corners{};   // cyclic, canonical order
  std::array<std::array<int, 4>, 6> face_edges{};     // edge k joins corners k, k+1
  std::array<bool, 6> face_ccw{};  // cyclic order is counterclockwise seen from outside
  std::array<std::array<bool, 12>, 12> share_face{};

  CubeTables() {
    int e = 0;
    for (int axis = 0; axis < 3; ++axis)
      for (int c = 0; c < 8; ++c)
        if (!(c & (1 << axis))) {
          edge_corners[e] = {c, c | (1 << axis)};
          edge_axis[e] = axis;
          ++e;
        }
    int f = 0;
    for (int axis = 0; axis < 3; ++axis) {
      const int u = axis == 0 ? 1 : 0;
      const int w = axis == 2 ? 1 : 2;
      for (int side = 0; side < 2; ++side) {
        const int base = side << axis;
        face_corners[f] = {base, base | (1 << u), base | (1 << u) | (1 << w), base | (1 << w)};
        // u x w is +e_axis for axes 0 and 2, -e_axis for axis 1
        face_ccw[f] = (side == 1) == (axis != 1);
        for (int k = 0; k < 4; ++k) {
          const int a = face_corners[f][k], b = face_corners[f][(k + 1) % 4];
          for (int j = 0; j < 12; ++j) {
            const auto& ec = edge_corners[j];
            if ((ec[0] == a && ec[1] == b) || (ec[0] == b && ec[1] == a)) face_edges[f][k] = j;
          }
        }
        ++f;
      }
    }
    for (const auto& fe : face_edges)
      for (int a : fe)
        for (int b : fe) share_face[a][b] = true;
  }
};

const CubeTables& tables() {
  static const CubeTables t;
  return t;
}

// Segments of the zero contour of a bilinear face with corner values w (cyclic,
// relative to the level). Writes pairs of face-edge ids, directed so the inside
// lies to the left in the cyclic orientation; returns segment count.
int face_segments(const double w[4], int seg[2][2]) {
  bool in[4];
  for (int k = 0; k < 4; ++k) in[k] = w[k] >= 0.0;
  int crossing[4];
  int nc = 0;
  for (int k = 0; k < 4; ++k)
    if (in[k] != in[(k + 1) % 4]) crossing[nc++] = k;
  auto orient = [&](int* sg) {
    if (in[(sg[0] + 1) % 4]) std::swap(sg[0], sg[1]);
  };
  if (nc == 2) {
    seg[0][0] = crossing[0];
    seg[0][1] = crossing[1];
    orient(seg[0]);
    return 1;
  }
  if (nc != 4) return 0;
  // Asymptotic decider: value of the bilinear interpolant at its saddle.
  const double denom = w[0] + w[2] - w[1] - w[3];
  const double saddle = denom != 0.0 ? (w[0] * w[2] - w[1] * w[3]) / denom : 0.0;
  const bool connect_inside = saddle >= 0.0;
  int s = 0;
  for (int c = 0; c < 4; ++c) {
    // cut off the corners that end up isolated
    if (in[c] == connect_inside) continue;
    seg[s][0] = (c + 3) % 4;
    seg[s][1] = c;
    orient(seg[s]);
    ++s;
  }
  return s;
}

class VertexCache {
 public:
  VertexCache(const ScalarField& f, double level, FrontMesh& mesh)
      : f_(f), level_(level), mesh_(mesh) {}

  std::uint32_t get(std::size_t node, int axis) {
    const std::uint64_t key = static_cast<std::uint64_t>(node) * 3 + axis;
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    const Grid& g = f_.grid;
    const double a = f_[node] - level_;
    const double b = f_[node + g.stride(axis)] - level_;
    const double t = a / (a - b);
    Vec p = g.position(g.unravel(node));
    p[axis] += t * g.h;
    const auto id = static_cast<std::uint32_t>(mesh_.vertices.size());
    mesh_.vertices.push_back(p);
    ids_.emplace(key, id);
    return id;
  }

 private:
  const ScalarField& f_;
  double level_;
  FrontMesh& mesh_;
  std::unordered_map<std::uint64_t, std::uint32_t> ids_;
};

Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

void chain_polylines(FrontMesh& mesh, const std::vector<std::array<std::uint32_t, 2>>& segs) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<std::array<std::int64_t, 2>> nb(nv, {-1, -1});
  for (const auto& s : segs) {
    for (int e = 0; e < 2; ++e) {
      auto& slot = nb[s[e]];
      (slot[0] < 0 ? slot[0] : slot[1]) = s[1 - e];
    }
  }
  std::vector<bool> used(nv, false);
  auto walk = [&](std::uint32_t start, bool closed) {
    std::vector<std::uint32_t> line{start};
    used[start] = true;
    std::int64_t prev = -1, cur = start;
    for (;;) {
      std::int64_t nxt = nb[cur][0] != prev ? nb[cur][0] : nb[cur][1];
      if (nb[cur][0] == nb[cur][1]) nxt = nb[cur][0];  // two-vertex loop
      if (nxt < 0 || used[nxt]) break;
      used[nxt] = true;
      line.push_back(static_cast<std::uint32_t>(nxt));
      prev = cur;
      cur = nxt;
    }
    mesh.polylines.push_back(std::move(line));
    mesh.closed.push_back(closed);
  };
  for (std::uint32_t v = 0; v < nv; ++v)
    if (!used[v] && (nb[v][0] < 0 || nb[v][1] < 0)) walk(v, false);
  for (std::uint32_t v = 0; v < nv; ++v)
    if (!used[v]) walk(v, true);
}

FrontMesh extract_2d(const ScalarField& f, double level) {
  const Grid& g = f.grid;
  FrontMesh mesh;
  mesh.dim = 2;
  VertexCache cache(f, level, mesh);
  std::vector<std::array<std::uint32_t, 2>> segs;
  const std::ptrdiff_t sy = g.stride(1);
  for (int y = 0; y + 1 < g.shape[1]; ++y)
    for (int x = 0; x + 1 < g.shape[0]; ++x) {
      const std::size_t n = g.linear({x, y, 0});
      const std::size_t corner[4] = {n, n + 1, n + 1 + sy, n + sy};
      double w[4];
      for (int k = 0; k < 4; ++k) w[k] = f[corner[k]] - level;
      int seg[2][2];
      const int ns = face_segments(w, seg);
      if (ns == 0) continue;
      // face edge k: 0 bottom (x), 1 right (y), 2 top (x), 3 left (y)
      auto vid = [&](int e) {
        switch (e) {
          case 0: return cache.get(n, 0);
          case 1: return cache.get(n + 1, 1);
          case 2: return cache.get(n + sy, 0);
          default: return cache.get(n, 1);
        }
      };
      for (int s = 0; s < ns; ++s) segs.push_back({vid(seg[s][0]), vid(seg[s][1])});
    }
  chain_polylines(mesh, segs);
  return mesh;
}

// Splits a cell loop along diagonals that cross the cube's interior. A
// diagonal lying in a face could be produced again by the neighbouring cell,
// leaving an edge shared by four triangles.
void triangulate_loop(const CubeTables& T, const std::vector<int>& edges,
                      const std::vector<std::uint32_t>& ids,
                      std::vector<std::array<std::uint32_t, 3>>& out) {
  const std::size_t m = edges.size();
  if (m == 3) {
    out.push_back({ids[0], ids[2], ids[1]});
    return;
  }
  std::size_t a = 0, b = 2;
  bool found = false;
  for (std::size_t i = 0; i < m && !found; ++i)
    for (std::size_t j = i + 2; j < m && !found; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (!T.share_face[edges[i]][edges[j]]) {
        a = i;
        b = j;
        found = true;
      }
    }
  std::vector<int> e1, e2;
  std::vector<std::uint32_t> i1, i2;
  for (std::size_t k = a; k <= b; ++k) {
    e1.push_back(edges[k]);
    i1.push_back(ids[k]);
  }
  for (std::size_t k = b; k != a; k = (k + 1) % m) {
    e2.push_back(edges[k]);
    i2.push_back(ids[k]);
  }
  e2.push_back(edges[a]);
  i2.push_back(ids[a]);
  triangulate_loop(T, e1, i1, out);
  triangulate_loop(T, e2, i2, out);
}

FrontMesh extract_3d(const ScalarField& f, double level) {
  const Grid& g = f.grid;
  const CubeTables& T = tables();
  FrontMesh mesh;
  mesh.dim = 3;
  VertexCache cache(f, level, mesh);
  std::ptrdiff_t coff[8];
  for (int c = 0; c < 8; ++c)
    coff[c] = (c & 1) * g.stride(0) + ((c >> 1) & 1) * g.stride(1) + ((c >> 2) & 1) * g.stride(2);

  for (int z = 0; z + 1 < g.shape[2]; ++z)
    for (int y = 0; y + 1 < g.shape[1]; ++y)
      for (int x = 0; x + 1 < g.shape[0]; ++x) {
        const std::size_t n = g.linear({x, y, z});
        double w[8];
        int inside = 0;
        for (int c = 0; c < 8; ++c) {
          w[c] = f[n + coff[c]] - level;
          inside += w[c] >= 0.0;
        }
        if (inside == 0 || inside == 8) continue;

        // Directed edge successors within the cube. Every face segment keeps
        // the inside on its left seen from outside the cube, so the face shared
        // with a neighbour is walked the other way there and the triangle
        // orientation is consistent across cells.
        std::array<int, 12> next;
        next.fill(-1);
        for (int fi = 0; fi < 6; ++fi) {
          double fw[4];
          for (int k = 0; k < 4; ++k) fw[k] = w[T.face_corners[fi][k]];
          int seg[2][2];
          const int ns = face_segments(fw, seg);
          for (int s = 0; s < ns; ++s) {
            int e0 = T.face_edges[fi][seg[s][0]];
            int e1 = T.face_edges[fi][seg[s][1]];
            if (!T.face_ccw[fi]) std::swap(e0, e1);
            next[e0] = e1;
          }
        }

        bool seen[12] = {};
        for (int e = 0; e < 12; ++e) {
          if (seen[e] || next[e] < 0) continue;
          std::vector<int> edges;
          for (int cur = e; cur >= 0 && !seen[cur]; cur = next[cur]) {
            seen[cur] = true;
            edges.push_back(cur);
          }
          const std::size_t m = edges.size();
          if (m < 3) continue;
          std::vector<std::uint32_t> ids(m);
          for (std::size_t i = 0; i < m; ++i)
            ids[i] = cache.get(n + coff[T.edge_corners[edges[i]][0]], T.edge_axis[edges[i]]);
          triangulate_loop(T, edges, ids, mesh.triangles);
        }
      }
  return mesh;
}

// Fraction of a triangle / tetrahedron where the linear interpolant of the
// vertex values is >= 0.
double triangle_fraction(double a, double b, double c) {
  double v[3] = {a, b, c};
  std::sort(v, v + 3);
  const int pos = (v[0] >= 0.0) + (v[1] >= 0.0) + (v[2] >= 0.0);
  if (pos == 0) return 0.0;
  if (pos == 3) return 1.0;
  if (pos == 1) return v[2] * v[2] / ((v[2] - v[0]) * (v[2] - v[1]));
  return 1.0 - v[0] * v[0] / ((v[0] - v[1]) * (v[0] - v[2]));
}

double tet_volume6(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  return std::abs(dot(cross(sub(b, a), sub(c, a)), sub(d, a)));
}

double tet_fraction(const double val[4]) {
  int pos_idx[4], neg_idx[4];
  int np = 0, nn = 0;
  for (int k = 0; k < 4; ++k) (val[k] >= 0.0 ? pos_idx[np++] : neg_idx[nn++]) = k;
  if (np == 0) return 0.0;
  if (np == 4) return 1.0;
  if (np == 1) {
    const double p = val[pos_idx[0]];
    return p * p * p /
           ((p - val[neg_idx[0]]) * (p - val[neg_idx[1]]) * (p - val[neg_idx[2]]));
  }
  if (np == 3) {
    const double m = val[neg_idx[0]];
    return 1.0 - m * m * m /
                     ((m - val[pos_idx[0]]) * (m - val[pos_idx[1]]) * (m - val[pos_idx[2]]));
  }
  // Two on each side: the positive part is a triangular prism; measure it in
  // reference coordinates where the tetrahedron has volume 1/6.
  static const Vec ref[4] = {Vec{0, 0, 0}, Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}};
  auto crossing = [&](int p, int m) {
    const double t = val[p] / (val[p] - val[m]);
    Vec r{};
    for (int a = 0; a < 3; ++a) r[a] = ref[p][a] + t * (ref[m][a] - ref[p][a]);
    return r;
  };
  const Vec& A = ref[pos_idx[0]];
  const Vec& B = ref[pos_idx[1]];
  const Vec A1 = crossing(pos_idx[0], neg_idx[0]), A2 = crossing(pos_idx[0], neg_idx[1]);
  const Vec B1 = crossing(pos_idx[1], neg_idx[0]), B2 = crossing(pos_idx[1], neg_idx[1]);
  const double v6 = tet_volume6(A, A1, A2, B2) + tet_volume6(A, A1, B1, B2) + tet_volume6(A, B, B1, B2);
  return v6;  // (v6 / 6) / (1 / 6)
}

}  // namespace

FrontMesh extract_front(const ScalarField& v, double level) {
  return v.grid.dim == 2 ? extract_2d(v, level) : extract_3d(v, level);
}

double front_measure(const FrontMesh& mesh) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "front is empty");
  double total = 0.0;
  if (mesh.dim == 2) {
    for (std::size_t l = 0; l < mesh.polylines.size(); ++l) {
      const auto& line = mesh.polylines[l];
      const std::size_t n = line.size();
      const std::size_t segs = mesh.closed[l] ? n : n - 1;
      for (std::size_t i = 0; i < segs; ++i)
        total += norm(sub(mesh.vertices[line[(i + 1) % n]], mesh.vertices[line[i]]), 2);
    }
  } else {
    for (const auto& t : mesh.triangles) {
      const Vec& a = mesh.vertices[t[0]];
      total += 0.5 * norm(cross(sub(mesh.vertices[t[1]], a), sub(mesh.vertices[t[2]], a)));
    }
  }
  return total;
}

double enclosed_measure(const ScalarField& v) {
  const Grid& g = v.grid;
  double total = 0.0;
  if (g.dim == 2) {
    const std::ptrdiff_t sy = g.stride(1);
    for (int y = 0; y + 1 < g.shape[1]; ++y)
      for (int x = 0; x + 1 < g.shape[0]; ++x) {
        const std::size_t n = g.linear({x, y, 0});
        const double a = v[n], b = v[n + 1], c = v[n + 1 + sy], d = v[n + sy];
        if (a >= 0 && b >= 0 && c >= 0 && d >= 0) {
          total += 1.0;
        } else if (a < 0 && b < 0 && c < 0 && d < 0) {
          continue;
        } else {
          total += 0.5 * (triangle_fraction(a, b, c) + triangle_fraction(a, c, d));
        }
      }
    return total * g.h * g.h;
  }
  std::ptrdiff_t coff[8];
  for (int c = 0; c < 8; ++c)
    coff[c] = (c & 1) * g.stride(0) + ((c >> 1) & 1) * g.stride(1) + ((c >> 2) & 1) * g.stride(2);
  static const int tets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                                 {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};
  for (int z = 0; z + 1 < g.shape[2]; ++z)
    for (int y = 0; y + 1 < g.shape[1]; ++y)
      for (int x = 0; x + 1 < g.shape[0]; ++x) {
        const std::size_t n = g.linear({x, y, z});
        double w[8];
        int pos = 0;
        for (int c = 0; c < 8; ++c) {
          w[c] = v[n + coff[c]];
          pos += w[c] >= 0.0;
        }
        if (pos == 0) continue;
        if (pos == 8) {
          total += 1.0;
          continue;
        }
        double cell = 0.0;
        for (const auto& t : tets) {
          const double tv[4] = {w[t[0]], w[t[1]], w[t[2]], w[t[3]]};
          cell += tet_fraction(tv);
        }
        total += cell / 6.0;
      }
  return total * g.h * g.h * g.h;
}

double isoperimetric_ratio(const ScalarField& v) {
  if (v.grid.dim != 2) throw Error(ErrorCode::DimensionUnsupported, "isoperimetric ratio is 2D only");
  const FrontMesh mesh = extract_front(v);
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "front is empty");
  if (mesh.polylines.size() != 1)
    throw Error(ErrorCode::MultipleComponents,
                std::to_string(mesh.polylines.size()) + " front components");
  const auto& line = mesh.polylines.front();
  double area = 0.0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const Vec& p = mesh.vertices[line[i]];
    const Vec& q = mesh.vertices[line[(i + 1) % line.size()]];
    area += p[0] * q[1] - q[0] * p[1];
  }
  area = 0.5 * std::abs(area);
  const double len = front_measure(mesh);
  return len * len / (4.0 * std::numbers::pi * area);
}

int component_count(const ScalarField& v) {
  const Grid& g = v.grid;
  const int nx = g.shape[0], ny = g.shape[1], nz = g.shape[2];
  struct Run {
    int x0, x1;
  };
  std::vector<Run> runs;
  std::vector<std::size_t> row_start(static_cast<std::size_t>(ny) * nz + 1, 0);
  std::vector<int> parent;
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  auto link_rows = [&](std::size_t r_cur, std::size_t r_prev) {
    std::size_t i = row_start[r_prev], j = row_start[r_cur];
    const std::size_t ie = row_start[r_prev + 1], je = runs.size();
    while (i < ie && j < je) {
      if (runs[i].x1 >= runs[j].x0 && runs[j].x1 >= runs[i].x0)
        unite(static_cast<int>(i), static_cast<int>(j));
      if (runs[i].x1 < runs[j].x1)
        ++i;
      else
        ++j;
    }
  };
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y) {
      const std::size_t r = static_cast<std::size_t>(z) * ny + y;
      row_start[r] = runs.size();
      const double* row = v.values.data() + r * nx;
      for (int x = 0; x < nx;) {
        if (row[x] < 0.0) {
          ++x;
          continue;
        }
        const int x0 = x;
        while (x < nx && row[x] >= 0.0) ++x;
        runs.push_back({x0, x - 1});
        parent.push_back(static_cast<int>(parent.size()));
      }
      row_start[r + 1] = runs.size();
      if (y > 0) link_rows(r, r - 1);
      if (z > 0) link_rows(r, r - ny);
    }
  int count = 0;
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++count;
  return count;
}

std::vector<EdgeCrossing> level_crossings(const ScalarField& f, double level, const Vec& center,
                                          double radius) {
  const Grid& g = f.grid;
  Index lo{0, 0, 0}, hi{g.shape[0] - 1, g.shape[1] - 1, g.shape[2] - 1};
  if (radius > 0.0)
    for (int a = 0; a < g.dim; ++a) {
      lo[a] = std::max(0, static_cast<int>(std::floor((center[a] - radius - g.origin[a]) / g.h)) - 1);
      hi[a] = std::min(g.shape[a] - 1,
                       static_cast<int>(std::ceil((center[a] + radius - g.origin[a]) / g.h)) + 1);
    }
  std::vector<EdgeCrossing> out;
  Index i{0, 0, 0};
  for (i[2] = lo[2]; i[2] <= hi[2]; ++i[2])
    for (i[1] = lo[1]; i[1] <= hi[1]; ++i[1])
      for (i[0] = lo[0]; i[0] <= hi[0]; ++i[0]) {
        const std::size_t n = g.linear(i);
        const double a = f[n] - level;
        for (int axis = 0; axis < g.dim; ++axis) {
          if (i[axis] + 1 > hi[axis]) continue;
          const double b = f[n + g.stride(axis)] - level;
          if ((a >= 0.0) == (b >= 0.0)) continue;
          const double t = a / (a - b);
          Vec p = g.position(i);
          p[axis] += t * g.h;
          if (radius > 0.0 && norm(sub(p, center), g.dim) > radius) continue;
          out.push_back({p, i, axis, t});
        }
      }
  return out;
}

}  // namespace lsmcf

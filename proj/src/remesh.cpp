// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/remesh.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "mcflow/error.hpp"

namespace mcflow {
namespace {

// Midpoint of the cubic Hermite edge curve through a, b whose tangent planes
// are given by the unit normals na, nb.
Vec3 curved_midpoint(const Vec3& a, const Vec3& na, const Vec3& b, const Vec3& nb) {
  double wa = (b - a).dot(na);
  double wb = (a - b).dot(nb);
  return 0.5 * (a + b) - (wa * na + wb * nb) / 8.0;
}

Vec3 blended_normal(const Vec3& na, const Vec3& nb) {
  Vec3 n = na + nb;
  double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : na;
}

// ---------------------------------------------------------------- curves

RemeshResult remesh_curve(const DiscreteHypersurface& surface, const RemeshParams& p) {
  const double hi = p.split_ratio * p.target_edge;
  const double lo = p.collapse_ratio * p.target_edge;
  std::vector<Vec3> x = surface.positions();
  std::vector<Vec3> normals = surface.normals();
  std::vector<char> touched(x.size(), 0);
  RemeshResult result{surface, 0, 0};

  for (int pass = 0; pass < 8; ++pass) {
    bool any = false;
    std::vector<Vec3> nx;
    std::vector<Vec3> nn;
    std::vector<char> nt;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      nx.push_back(x[i]);
      nn.push_back(normals[i]);
      nt.push_back(touched[i]);
      std::size_t j = (i + 1) % n;
      if ((x[j] - x[i]).norm() > hi && nx.size() + (n - i) < p.max_vertices) {
        nx.push_back(curved_midpoint(x[i], normals[i], x[j], normals[j]));
        nn.push_back(blended_normal(normals[i], normals[j]));
        nt.push_back(1);
        ++result.splits;
        any = true;
      }
    }
    x = std::move(nx);
    normals = std::move(nn);
    touched = std::move(nt);
    if (!any) break;
  }

  for (int pass = 0; pass < 8; ++pass) {
    bool any = false;
    const std::size_t n = x.size();
    std::vector<char> dead(n, 0);
    std::vector<char> locked(n, 0);
    std::size_t alive = n;
    for (std::size_t i = 0; i < n && alive > p.min_vertices; ++i) {
      std::size_t j = (i + 1) % n;
      if (locked[i] || locked[j] || dead[i] || dead[j]) continue;
      if ((x[j] - x[i]).norm() >= lo) continue;
      Vec3 m = curved_midpoint(x[i], normals[i], x[j], normals[j]);
      std::size_t prev = (i + n - 1) % n;
      std::size_t next = (j + 1) % n;
      if ((m - x[prev]).norm() > hi || (x[next] - m).norm() > hi) continue;
      x[i] = m;
      normals[i] = blended_normal(normals[i], normals[j]);
      dead[j] = 1;
      touched[i] = 1;
      locked[i] = locked[j] = locked[prev] = locked[next] = 1;
      --alive;
      ++result.collapses;
      any = true;
    }
    std::vector<Vec3> nx;
    std::vector<Vec3> nn;
    std::vector<char> nt;
    for (std::size_t i = 0; i < n; ++i) {
      if (dead[i]) continue;
      nx.push_back(x[i]);
      nn.push_back(normals[i]);
      nt.push_back(touched[i]);
    }
    x = std::move(nx);
    normals = std::move(nn);
    touched = std::move(nt);
    if (!any) break;
  }

  if (result.splits == 0 && result.collapses == 0) return result;

  const std::size_t n = x.size();
  std::vector<char> relax(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (touched[i]) relax[i] = relax[(i + 1) % n] = relax[(i + n - 1) % n] = 1;
  for (int it = 0; it < p.relax_iterations; ++it) {
    auto current = DiscreteHypersurface::curve(x);
    const auto& nrm = current.normals();
    std::vector<Vec3> moved = x;
    for (std::size_t i = 0; i < n; ++i) {
      if (!relax[i]) continue;
      Vec3 mid = 0.5 * (x[(i + 1) % n] + x[(i + n - 1) % n]);
      Vec3 d = mid - x[i];
      d -= d.dot(nrm[i]) * nrm[i];
      d *= p.relax_strength;
      // Height h = a s^2 through both neighbors keeps the vertex on the curve.
      double hs2 = 0.0, s4 = 0.0;
      for (std::size_t j : {(i + 1) % n, (i + n - 1) % n}) {
        const Vec3 w = x[j] - x[i];
        const double h = w.dot(nrm[i]);
        const double s2 = (w - h * nrm[i]).squaredNorm();
        hs2 += h * s2;
        s4 += s2 * s2;
      }
      moved[i] = x[i] + d + (s4 > 0.0 ? hs2 / s4 * d.squaredNorm() : 0.0) * nrm[i];
    }
    x = std::move(moved);
  }
  result.surface = DiscreteHypersurface::curve(std::move(x));
  return result;
}

// ---------------------------------------------------------------- meshes

class MutableMesh {
 public:
  explicit MutableMesh(const DiscreteHypersurface& s)
      : x_(s.positions()), normals_(s.normals()), faces_(s.faces()) {
    face_alive_.assign(faces_.size(), 1);
    vertex_alive_.assign(x_.size(), 1);
    touched_.assign(x_.size(), 0);
    incident_.resize(x_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f)
      for (int v : faces_[f]) incident_[v].push_back(static_cast<int>(f));
  }

  std::size_t alive_vertices() const {
    return static_cast<std::size_t>(std::count(vertex_alive_.begin(), vertex_alive_.end(), 1));
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!face_alive_[f]) continue;
      for (int k = 0; k < 3; ++k) {
        int a = faces_[f][k];
        int b = faces_[f][(k + 1) % 3];
        if (a < b) out.emplace_back(a, b);
      }
    }
    return out;
  }

  double length(int a, int b) const { return (x_[a] - x_[b]).norm(); }

  // Faces containing directed edge a->b and b->a respectively; -1 if absent.
  std::pair<int, int> edge_faces(int a, int b) const {
    int fab = -1;
    int fba = -1;
    for (int f : incident_[a]) {
      const Face& t = faces_[f];
      for (int k = 0; k < 3; ++k) {
        if (t[k] == a && t[(k + 1) % 3] == b) fab = f;
        if (t[k] == b && t[(k + 1) % 3] == a) fba = f;
      }
    }
    return {fab, fba};
  }

  static int opposite(const Face& f, int a, int b) {
    for (int v : f)
      if (v != a && v != b) return v;
    return -1;
  }

  std::set<int> neighbors(int v) const {
    std::set<int> out;
    for (int f : incident_[v])
      for (int u : faces_[f])
        if (u != v) out.insert(u);
    return out;
  }

  bool split(int a, int b) {
    auto [f1, f2] = edge_faces(a, b);
    if (f1 < 0 || f2 < 0) return false;
    int c = opposite(faces_[f1], a, b);
    int d = opposite(faces_[f2], a, b);
    int m = static_cast<int>(x_.size());
    x_.push_back(curved_midpoint(x_[a], normals_[a], x_[b], normals_[b]));
    normals_.push_back(blended_normal(normals_[a], normals_[b]));
    vertex_alive_.push_back(1);
    touched_.push_back(1);
    incident_.emplace_back();

    replace(f1, b, m);
    detach(b, f1);
    incident_[m].push_back(f1);
    int g1 = add_face({m, b, c});

    replace(f2, a, m);
    detach(a, f2);
    incident_[m].push_back(f2);
    int g2 = add_face({m, a, d});
    (void)g1;
    (void)g2;
    return true;
  }

  bool collapse(int a, int b, double hi) {
    auto [f1, f2] = edge_faces(a, b);
    if (f1 < 0 || f2 < 0) return false;
    int c = opposite(faces_[f1], a, b);
    int d = opposite(faces_[f2], a, b);
    auto na = neighbors(a);
    auto nb = neighbors(b);
    std::vector<int> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
    if (common.size() != 2) return false;  // link condition
    if (neighbors(c).size() <= 3 || neighbors(d).size() <= 3) return false;
    if (na.size() + nb.size() - 4 < 3) return false;

    Vec3 target = curved_midpoint(x_[a], normals_[a], x_[b], normals_[b]);
    for (int u : na)
      if (u != b && (x_[u] - target).norm() > hi) return false;
    for (int u : nb)
      if (u != a && (x_[u] - target).norm() > hi) return false;

    // Reject collapses that fold or squash any surviving face.
    for (int v : {a, b}) {
      for (int f : incident_[v]) {
        if (f == f1 || f == f2) continue;
        const Face& t = faces_[f];
        Vec3 before = (x_[t[1]] - x_[t[0]]).cross(x_[t[2]] - x_[t[0]]);
        std::array<Vec3, 3> q{x_[t[0]], x_[t[1]], x_[t[2]]};
        for (int k = 0; k < 3; ++k)
          if (t[k] == a || t[k] == b) q[k] = target;
        Vec3 after = (q[1] - q[0]).cross(q[2] - q[0]);
        double bn = before.norm();
        double an = after.norm();
        if (!(an > 1e-12 * bn) || before.dot(after) < 0.5 * bn * an) return false;
      }
    }

    kill_face(f1);
    kill_face(f2);
    std::vector<int> moving = incident_[b];
    for (int f : moving) {
      replace(f, b, a);
      incident_[a].push_back(f);
    }
    incident_[b].clear();
    vertex_alive_[b] = 0;
    x_[a] = target;
    normals_[a] = blended_normal(normals_[a], normals_[b]);
    touched_[a] = 1;
    return true;
  }

  bool alive(int v) const { return vertex_alive_[v] != 0; }

  // Flips edges next to touched vertices that are non-Delaunay or whose flip
  // moves the four valences toward 6.
  int delaunay_flips(int passes) {
    std::vector<char> near(x_.size(), 0);
    for (std::size_t v = 0; v < x_.size(); ++v) {
      if (!touched_[v] || !vertex_alive_[v]) continue;
      near[v] = 1;
      for (int u : neighbors(static_cast<int>(v))) near[u] = 1;
    }
    int total = 0;
    for (int pass = 0; pass < passes; ++pass) {
      int done = 0;
      for (auto [a, b] : edges()) {
        if (!near[a] || !near[b]) continue;
        if (flip_if_needed(a, b)) ++done;
      }
      total += done;
      if (done == 0) break;
    }
    return total;
  }

  void relax(int iterations, double strength) {
    std::vector<char> mark(x_.size(), 0);
    for (std::size_t v = 0; v < x_.size(); ++v) {
      if (!touched_[v] || !vertex_alive_[v]) continue;
      mark[v] = 1;
      for (int u : neighbors(static_cast<int>(v))) mark[u] = 1;
    }
    for (int it = 0; it < iterations; ++it) {
      std::vector<Vec3> moved = x_;
      for (std::size_t v = 0; v < x_.size(); ++v) {
        if (!mark[v] || !vertex_alive_[v]) continue;
        Vec3 normal = Vec3::Zero();
        for (int f : incident_[v]) {
          const Face& t = faces_[f];
          normal += (x_[t[1]] - x_[t[0]]).cross(x_[t[2]] - x_[t[0]]);
        }
        normal.normalize();
        auto nbrs = neighbors(static_cast<int>(v));
        Vec3 centroid = Vec3::Zero();
        for (int u : nbrs) centroid += x_[u];
        centroid /= static_cast<double>(nbrs.size());
        Vec3 d = centroid - x_[v];
        d -= d.dot(normal) * normal;
        d *= strength;
        // Follow the local height field h(x, y) = a x^2 + b x y + c y^2 back onto the surface.
        moved[v] = x_[v] + d + height_offset(static_cast<int>(v), nbrs, normal, d) * normal;
      }
      x_ = std::move(moved);
    }
  }

  double height_offset(int v, const std::set<int>& nbrs, const Vec3& normal, const Vec3& d) const {
    const Vec3 e1 = normal.unitOrthogonal();
    const Vec3 e2 = normal.cross(e1);
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    double r4 = 0.0, hr2 = 0.0;
    for (int u : nbrs) {
      const Vec3 w = x_[u] - x_[v];
      const double x = w.dot(e1), y = w.dot(e2), h = w.dot(normal);
      const Eigen::Vector3d phi(x * x, x * y, y * y);
      m += phi * phi.transpose();
      rhs += h * phi;
      const double r2 = x * x + y * y;
      r4 += r2 * r2;
      hr2 += h * r2;
    }
    const double dx = d.dot(e1), dy = d.dot(e2);
    Eigen::LDLT<Eigen::Matrix3d> ldlt(m);
    if (nbrs.size() >= 4 && ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-8) {
      const Eigen::Vector3d c = ldlt.solve(rhs);
      return c[0] * dx * dx + c[1] * dx * dy + c[2] * dy * dy;
    }
    return r4 > 0.0 ? hr2 / r4 * (dx * dx + dy * dy) : 0.0;
  }

  bool flip_if_needed(int a, int b) {
    auto [f1, f2] = edge_faces(a, b);
    if (f1 < 0 || f2 < 0) return false;
    const int c = opposite(faces_[f1], a, b);
    const int d = opposite(faces_[f2], a, b);
    if (c == d || incident_[a].size() <= 3 || incident_[b].size() <= 3) return false;
    auto angle = [&](int apex, int u, int v) {
      const Vec3 p = x_[u] - x_[apex], q = x_[v] - x_[apex];
      return std::atan2(p.cross(q).norm(), p.dot(q));
    };
    auto dev = [](std::size_t v) { return (static_cast<double>(v) - 6.0) * (static_cast<double>(v) - 6.0); };
    const std::size_t va = incident_[a].size(), vb = incident_[b].size();
    const std::size_t vc = incident_[c].size(), vd = incident_[d].size();
    const double before = dev(va) + dev(vb) + dev(vc) + dev(vd);
    const double after = dev(va - 1) + dev(vb - 1) + dev(vc + 1) + dev(vd + 1);
    const bool delaunay_bad = angle(c, a, b) + angle(d, a, b) > std::numbers::pi + 1e-9;
    if (!(after < before) && !delaunay_bad) return false;
    // A valence flip may not create a non-Delaunay edge.
    if (!delaunay_bad && angle(a, c, d) + angle(b, c, d) > std::numbers::pi) return false;
    for (int f : incident_[c])
      for (int u : faces_[f])
        if (u == d) return false;
    const Vec3 old_n = (x_[b] - x_[a]).cross(x_[c] - x_[a]) + (x_[a] - x_[b]).cross(x_[d] - x_[b]);
    const Vec3 n1 = (x_[d] - x_[a]).cross(x_[c] - x_[a]);
    const Vec3 n2 = (x_[b] - x_[d]).cross(x_[c] - x_[d]);
    if (!(n1.dot(old_n) > 0.0) || !(n2.dot(old_n) > 0.0) || !(n1.dot(n2) > 0.0)) return false;

    kill_face(f1);
    kill_face(f2);
    add_face({a, d, c});
    add_face({d, b, c});
    for (int v : {a, b, c, d}) touched_[v] = 1;
    return true;
  }

  DiscreteHypersurface compact() const {
    std::vector<int> remap(x_.size(), -1);
    std::vector<Vec3> positions;
    for (std::size_t v = 0; v < x_.size(); ++v) {
      if (!vertex_alive_[v]) continue;
      remap[v] = static_cast<int>(positions.size());
      positions.push_back(x_[v]);
    }
    FaceList faces;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!face_alive_[f]) continue;
      faces.push_back({remap[faces_[f][0]], remap[faces_[f][1]], remap[faces_[f][2]]});
    }
    return DiscreteHypersurface::mesh(std::move(positions), std::move(faces));
  }

 private:
  void replace(int f, int from, int to) {
    for (int& v : faces_[f])
      if (v == from) v = to;
  }

  void detach(int v, int f) {
    auto& list = incident_[v];
    list.erase(std::remove(list.begin(), list.end(), f), list.end());
  }

  int add_face(const Face& face) {
    int id = static_cast<int>(faces_.size());
    faces_.push_back(face);
    face_alive_.push_back(1);
    for (int v : face) incident_[v].push_back(id);
    return id;
  }

  void kill_face(int f) {
    face_alive_[f] = 0;
    for (int v : faces_[f]) detach(v, f);
  }

  std::vector<Vec3> x_;
  std::vector<Vec3> normals_;
  FaceList faces_;
  std::vector<char> face_alive_;
  std::vector<char> vertex_alive_;
  std::vector<char> touched_;
  std::vector<std::vector<int>> incident_;
};

RemeshResult remesh_mesh(const DiscreteHypersurface& surface, const RemeshParams& p) {
  const double hi = p.split_ratio * p.target_edge;
  const double lo = p.collapse_ratio * p.target_edge;
  MutableMesh mesh(surface);
  RemeshResult result{surface, 0, 0};

  for (int pass = 0; pass < 6; ++pass) {
    auto edges = mesh.edges();
    std::vector<std::pair<double, std::pair<int, int>>> longs;
    for (auto [a, b] : edges) {
      double len = mesh.length(a, b);
      if (len > hi) longs.push_back({len, {a, b}});
    }
    if (longs.empty()) break;
    std::sort(longs.begin(), longs.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
    int done = 0;
    for (const auto& [len, e] : longs) {
      if (mesh.alive_vertices() >= p.max_vertices) break;
      if (mesh.length(e.first, e.second) <= hi) continue;
      if (mesh.split(e.first, e.second)) ++done;
    }
    result.splits += done;
    if (done == 0) break;
  }

  for (int pass = 0; pass < 6; ++pass) {
    auto edges = mesh.edges();
    std::vector<std::pair<double, std::pair<int, int>>> shorts;
    for (auto [a, b] : edges) {
      double len = mesh.length(a, b);
      if (len < lo) shorts.push_back({len, {a, b}});
    }
    if (shorts.empty()) break;
    std::sort(shorts.begin(), shorts.end());
    int done = 0;
    for (const auto& [len, e] : shorts) {
      if (mesh.alive_vertices() <= p.min_vertices) break;
      auto [a, b] = e;
      if (!mesh.alive(a) || !mesh.alive(b)) continue;
      if (mesh.length(a, b) >= lo) continue;
      if (mesh.collapse(a, b, hi)) ++done;
    }
    result.collapses += done;
    if (done == 0) break;
  }

  if (result.splits == 0 && result.collapses == 0) return result;
  mesh.delaunay_flips(4);
  mesh.relax(p.relax_iterations, p.relax_strength);
  result.surface = mesh.compact();
  return result;
}

}  // namespace

bool needs_remesh(const DiscreteHypersurface& surface, const RemeshParams& params) {
  if (!(params.target_edge > 0.0)) return false;
  const double hi = params.split_ratio * params.target_edge;
  const double lo = params.collapse_ratio * params.target_edge;
  for (double len : surface.edge_lengths())
    if (len > hi || len < lo) return true;
  return false;
}

RemeshResult remesh(const DiscreteHypersurface& surface, const RemeshParams& params) {
  if (!(params.target_edge > 0.0)) raise(ErrorKind::InvalidArgument, "remesh target edge must be positive");
  if (!(params.split_ratio > 1.0) || !(params.collapse_ratio < 1.0) || !(params.collapse_ratio > 0.0))
    raise(ErrorKind::InvalidArgument, "remesh ratios must bracket 1");
  if (surface.dimension() == 1) return remesh_curve(surface, params);
  return remesh_mesh(surface, params);
}

}  // namespace mcflow

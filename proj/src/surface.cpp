// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/surface.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

#include "mcflow/error.hpp"
#include "mcflow/kernels.hpp"

namespace mcflow {
namespace {

constexpr double kAreaEpsilonFactor = 1e-14;

std::uint64_t edge_key(int a, int b) {
  auto lo = static_cast<std::uint32_t>(std::min(a, b));
  auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

std::uint64_t directed_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

void require_finite(const std::vector<Vec3>& positions) {
  for (const auto& p : positions)
    if (!p.allFinite()) raise(ErrorKind::InvalidArgument, "non-finite vertex position");
}

// Checks that faces form a single closed, consistently oriented 2-manifold.
void validate_mesh_topology(std::size_t vertex_count, const FaceList& faces) {
  if (faces.size() < 4) raise(ErrorKind::NonManifold, "a closed triangle mesh needs at least 4 faces");
  std::unordered_map<std::uint64_t, int> undirected;
  std::unordered_map<std::uint64_t, int> directed;
  undirected.reserve(faces.size() * 3);
  directed.reserve(faces.size() * 3);
  std::vector<int> face_count(vertex_count, 0);
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k];
      int b = f[(k + 1) % 3];
      if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= vertex_count ||
          static_cast<std::size_t>(b) >= vertex_count)
        raise(ErrorKind::InvalidArgument, "face index out of range");
      if (a == b) raise(ErrorKind::Degenerate, "face with repeated vertex");
      ++undirected[edge_key(a, b)];
      if (++directed[directed_key(a, b)] > 1)
        raise(ErrorKind::NonManifold, "inconsistent face orientation or non-manifold edge");
      ++face_count[a];
    }
  }
  for (const auto& [key, count] : undirected) {
    if (count == 1) raise(ErrorKind::NonManifold, "open boundary edge");
    if (count != 2) raise(ErrorKind::NonManifold, "edge shared by more than two faces");
  }
  for (std::size_t v = 0; v < vertex_count; ++v)
    if (face_count[v] == 0) raise(ErrorKind::NonManifold, "unreferenced vertex " + std::to_string(v));

  // Each vertex star must be a single fan: follow b -> c around the vertex.
  std::vector<std::vector<std::pair<int, int>>> star(vertex_count);
  for (const auto& f : faces)
    for (int k = 0; k < 3; ++k) star[f[k]].emplace_back(f[(k + 1) % 3], f[(k + 2) % 3]);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    const auto& fan = star[v];
    std::unordered_map<int, int> next;
    for (const auto& [b, c] : fan) next[b] = c;
    int start = fan.front().first;
    int cur = start;
    std::size_t steps = 0;
    do {
      auto it = next.find(cur);
      if (it == next.end()) raise(ErrorKind::NonManifold, "broken vertex star");
      cur = it->second;
      ++steps;
    } while (cur != start && steps <= fan.size());
    if (steps != fan.size()) raise(ErrorKind::NonManifold, "non-manifold vertex " + std::to_string(v));
  }

  // Single connected component.
  std::vector<int> parent(vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& f : faces) {
    parent[find(f[1])] = find(f[0]);
    parent[find(f[2])] = find(f[0]);
  }
  int root = find(0);
  for (std::size_t v = 1; v < vertex_count; ++v)
    if (find(static_cast<int>(v)) != root) raise(ErrorKind::NonManifold, "more than one component");
}

double signed_volume(const std::vector<Vec3>& x, const FaceList& faces) {
  double vol = 0.0;
  for (const auto& f : faces) vol += x[f[0]].dot(x[f[1]].cross(x[f[2]]));
  return vol / 6.0;
}

double signed_area_xy(const std::vector<Vec3>& x) {
  double area = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = x[i];
    const Vec3& b = x[(i + 1) % n];
    area += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * area;
}

}  // namespace

ScalarField::ScalarField(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!std::isfinite(v)) raise(ErrorKind::InvalidArgument, "scalar field has non-finite values");
}

ScalarField ScalarField::constant(std::size_t size, double value) {
  return ScalarField(std::vector<double>(size, value));
}

DiscreteHypersurface DiscreteHypersurface::curve(std::vector<Vec3> positions) {
  if (positions.size() < 3) raise(ErrorKind::NonManifold, "a closed curve needs at least 3 vertices");
  require_finite(positions);
  for (const auto& p : positions)
    if (p.z() != 0.0) raise(ErrorKind::InvalidArgument, "curve vertices must lie in the z = 0 plane");
  DiscreteHypersurface s;
  s.dimension_ = 1;
  s.faces_ = std::make_shared<const FaceList>();
  double area = signed_area_xy(positions);
  s.orientation_ = area >= 0.0 ? 1 : -1;
  s.positions_ = std::move(positions);
  s.refresh();
  return s;
}

DiscreteHypersurface DiscreteHypersurface::mesh(std::vector<Vec3> positions, FaceList faces) {
  require_finite(positions);
  validate_mesh_topology(positions.size(), faces);
  if (signed_volume(positions, faces) < 0.0)
    for (auto& f : faces) std::swap(f[1], f[2]);
  DiscreteHypersurface s;
  s.dimension_ = 2;
  s.faces_ = std::make_shared<const FaceList>(std::move(faces));
  s.positions_ = std::move(positions);
  s.refresh();
  return s;
}

DiscreteHypersurface DiscreteHypersurface::with_positions(std::vector<Vec3> positions) const {
  if (positions.size() != positions_.size())
    raise(ErrorKind::InvalidArgument, "vertex count changed without new connectivity");
  require_finite(positions);
  DiscreteHypersurface s;
  s.dimension_ = dimension_;
  s.orientation_ = orientation_;
  s.faces_ = faces_;
  s.positions_ = std::move(positions);
  s.refresh();
  return s;
}

void DiscreteHypersurface::refresh() {
  const std::size_t n = positions_.size();
  normals_.assign(n, Vec3::Zero());
  mean_curvature_vectors_.assign(n, Vec3::Zero());
  mean_curvature_.assign(n, 0.0);
  a_squared_.assign(n, 0.0);
  a_norm_.assign(n, 0.0);
  gauss_curvature_.assign(n, 0.0);
  dual_area_.assign(n, 0.0);
  if (dimension_ == 1)
    refresh_curve();
  else
    refresh_mesh();

  total_measure_ = std::accumulate(element_measure_.begin(), element_measure_.end(), 0.0);
  const double eps = kAreaEpsilonFactor * total_measure_ / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(dual_area_[i] > eps)) raise(ErrorKind::Degenerate, "dual area underflow at vertex " + std::to_string(i));
    const Vec3& hn = mean_curvature_vectors_[i];
    double h = hn.norm();
    mean_curvature_[i] = hn.dot(normals_[i]) < 0.0 ? -h : h;
    if (dimension_ == 1) {
      a_squared_[i] = h * h;
    } else {
      a_squared_[i] = std::max(h * h - 2.0 * gauss_curvature_[i], 0.0);
    }
    a_norm_[i] = std::sqrt(a_squared_[i]);
  }
}

void DiscreteHypersurface::refresh_curve() {
  const std::size_t n = positions_.size();
  element_measure_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double len = (positions_[(i + 1) % n] - positions_[i]).norm();
    if (!(len > 0.0)) raise(ErrorKind::Degenerate, "zero-length edge " + std::to_string(i));
    element_measure_[i] = len;
  }
  const double sign = static_cast<double>(orientation_);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t prev = (i + n - 1) % n;
    std::size_t next = (i + 1) % n;
    Vec3 d0 = positions_[i] - positions_[prev];
    Vec3 d1 = positions_[next] - positions_[i];
    double l0 = element_measure_[prev];
    double l1 = element_measure_[i];
    dual_area_[i] = 0.5 * (l0 + l1);
    // Outward edge normal of a counter-clockwise loop is (dy, -dx); summing the
    // unnormalized rotations weights each edge by its length.
    Vec3 nsum(sign * (d0.y() + d1.y()), -sign * (d0.x() + d1.x()), 0.0);
    double nn = nsum.norm();
    if (!(nn > 0.0)) raise(ErrorKind::Degenerate, "cusp at vertex " + std::to_string(i));
    normals_[i] = nsum / nn;
    Vec3 length_gradient = d0 / l0 - d1 / l1;
    mean_curvature_vectors_[i] = length_gradient / dual_area_[i];
  }
}

void DiscreteHypersurface::refresh_mesh() {
  const FaceList& faces = *faces_;
  const std::size_t n = positions_.size();
  element_measure_.assign(faces.size(), 0.0);
  std::vector<double> angle_sum(n, 0.0);
  std::vector<Vec3> laplacian(n, Vec3::Zero());
  double total = 0.0;
  for (const auto& f : faces) {
    Vec3 e = (positions_[f[1]] - positions_[f[0]]).cross(positions_[f[2]] - positions_[f[0]]);
    total += 0.5 * e.norm();
  }
  const double face_eps = kAreaEpsilonFactor * total / static_cast<double>(faces.size());

  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const auto& f = faces[fi];
    const Vec3& p0 = positions_[f[0]];
    const Vec3& p1 = positions_[f[1]];
    const Vec3& p2 = positions_[f[2]];
    Vec3 cross = (p1 - p0).cross(p2 - p0);
    double double_area = cross.norm();
    double area = 0.5 * double_area;
    if (!(area > face_eps)) raise(ErrorKind::Degenerate, "zero-area face " + std::to_string(fi));
    element_measure_[fi] = area;
    for (int k = 0; k < 3; ++k) {
      int v = f[k];
      dual_area_[v] += area / 3.0;
      normals_[v] += cross;  // area-weighted
    }
    for (int k = 0; k < 3; ++k) {
      int i = f[k];
      int j = f[(k + 1) % 3];
      int l = f[(k + 2) % 3];
      Vec3 u = positions_[j] - positions_[i];
      Vec3 w = positions_[l] - positions_[i];
      double dot = u.dot(w);
      double sin_part = u.cross(w).norm();
      angle_sum[i] += std::atan2(sin_part, dot);
      // Corner i faces edge (j, l): half its cotangent weights that edge.
      double half_cot = 0.5 * dot / sin_part;
      Vec3 d = positions_[j] - positions_[l];
      laplacian[j] += half_cot * d;
      laplacian[l] -= half_cot * d;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    double nn = normals_[v].norm();
    if (!(nn > 0.0)) raise(ErrorKind::Degenerate, "vanishing vertex normal at " + std::to_string(v));
    normals_[v] /= nn;
    mean_curvature_vectors_[v] = laplacian[v] / dual_area_[v];
    gauss_curvature_[v] = (2.0 * std::numbers::pi - angle_sum[v]) / dual_area_[v];
  }
}

double DiscreteHypersurface::max_abs_a() const { return kernels::max_abs(a_norm_); }

double DiscreteHypersurface::max_abs_h() const { return kernels::max_abs(mean_curvature_); }

std::size_t DiscreteHypersurface::edge_count() const {
  return dimension_ == 1 ? positions_.size() : faces_->size() * 3 / 2;
}

int DiscreteHypersurface::euler_characteristic() const {
  if (dimension_ == 1) return 0;
  return static_cast<int>(positions_.size()) - static_cast<int>(edge_count()) +
         static_cast<int>(faces_->size());
}

std::vector<double> DiscreteHypersurface::edge_lengths() const {
  if (dimension_ == 1) return element_measure_;
  std::vector<double> out;
  out.reserve(edge_count());
  for (const auto& f : *faces_)
    for (int k = 0; k < 3; ++k) {
      int a = f[k];
      int b = f[(k + 1) % 3];
      if (a < b) out.push_back((positions_[a] - positions_[b]).norm());
    }
  return out;
}

Vec3 DiscreteHypersurface::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : positions_) c += p;
  return c / static_cast<double>(positions_.size());
}

Eigen::SparseMatrix<double> DiscreteHypersurface::stiffness_matrix() const {
  const auto n = static_cast<Eigen::Index>(positions_.size());
  std::vector<Eigen::Triplet<double>> triplets;
  auto add_edge = [&](int a, int b, double w) {
    triplets.emplace_back(a, b, -w);
    triplets.emplace_back(b, a, -w);
    triplets.emplace_back(a, a, w);
    triplets.emplace_back(b, b, w);
  };
  if (dimension_ == 1) {
    triplets.reserve(4 * positions_.size());
    for (std::size_t i = 0; i < positions_.size(); ++i)
      add_edge(static_cast<int>(i), static_cast<int>((i + 1) % positions_.size()),
               1.0 / element_measure_[i]);
  } else {
    triplets.reserve(12 * faces_->size());
    for (const auto& f : *faces_) {
      for (int k = 0; k < 3; ++k) {
        int i = f[k];
        int j = f[(k + 1) % 3];
        int l = f[(k + 2) % 3];
        Vec3 u = positions_[j] - positions_[i];
        Vec3 w = positions_[l] - positions_[i];
        add_edge(j, l, 0.5 * u.dot(w) / u.cross(w).norm());
      }
    }
  }
  Eigen::SparseMatrix<double> c(n, n);
  c.setFromTriplets(triplets.begin(), triplets.end());
  return c;
}

DiscreteHypersurface curvatures(const DiscreteHypersurface& surface) {
  return surface.with_positions(surface.positions());
}

DiscreteHypersurface transformed(const DiscreteHypersurface& surface, const Eigen::Matrix3d& rotation,
                                 const Vec3& translation, double scale) {
  std::vector<Vec3> moved;
  moved.reserve(surface.vertex_count());
  for (const auto& p : surface.positions()) moved.push_back(scale * (rotation * p) + translation);
  if (surface.dimension() == 1) return DiscreteHypersurface::curve(std::move(moved));
  return DiscreteHypersurface::mesh(std::move(moved), surface.faces());
}

double integrate(const DiscreteHypersurface& surface, std::span<const double> values, double p) {
  if (values.size() != surface.vertex_count())
    raise(ErrorKind::FieldMismatch, "field length differs from vertex count");
  if (!(p > 0.0)) raise(ErrorKind::InvalidArgument, "integration exponent must be positive");
  return kernels::weighted_real_power_sum(values, surface.dual_area(), p);
}

double integrate(const DiscreteHypersurface& surface, const ScalarField& field, double p) {
  return integrate(surface, field.values(), p);
}

std::vector<Vec3> face_gradients(const DiscreteHypersurface& surface, const ScalarField& field) {
  if (field.size() != surface.vertex_count())
    raise(ErrorKind::FieldMismatch, "field length differs from vertex count");
  if (surface.dimension() != 2) raise(ErrorKind::UnsupportedDimension, "face gradients need a mesh");
  const auto& x = surface.positions();
  std::vector<Vec3> out;
  out.reserve(surface.faces().size());
  for (const auto& f : surface.faces()) {
    Vec3 cross = (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]);
    double double_area = cross.norm();
    Vec3 normal = cross / double_area;
    Vec3 g = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      // Edge opposite corner k, oriented with the face.
      Vec3 opposite = x[f[(k + 2) % 3]] - x[f[(k + 1) % 3]];
      g += field[f[k]] * normal.cross(opposite);
    }
    out.push_back(g / double_area);
  }
  return out;
}

double dirichlet_energy(const DiscreteHypersurface& surface, const ScalarField& field) {
  if (field.size() != surface.vertex_count())
    raise(ErrorKind::FieldMismatch, "field length differs from vertex count");
  double energy = 0.0;
  auto measure = surface.element_measure();
  if (surface.dimension() == 1) {
    const std::size_t n = field.size();
    for (std::size_t i = 0; i < n; ++i) {
      double d = field[(i + 1) % n] - field[i];
      energy += d * d / measure[i];
    }
    return energy;
  }
  auto grads = face_gradients(surface, field);
  for (std::size_t f = 0; f < grads.size(); ++f) energy += grads[f].squaredNorm() * measure[f];
  return energy;
}

double gradient_l1(const DiscreteHypersurface& surface, const ScalarField& field) {
  if (field.size() != surface.vertex_count())
    raise(ErrorKind::FieldMismatch, "field length differs from vertex count");
  double total = 0.0;
  auto measure = surface.element_measure();
  if (surface.dimension() == 1) {
    const std::size_t n = field.size();
    for (std::size_t i = 0; i < n; ++i) total += std::fabs(field[(i + 1) % n] - field[i]);
    return total;
  }
  auto grads = face_gradients(surface, field);
  for (std::size_t f = 0; f < grads.size(); ++f) total += grads[f].norm() * measure[f];
  return total;
}

}  // namespace mcflow

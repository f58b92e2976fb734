// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/mesh_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "mcflow/error.hpp"

namespace mcflow {
namespace {

struct RawMesh {
  std::vector<Vec3> positions;
  FaceList faces;
};

RawMesh unit_icosphere(int level) {
  if (level < 0 || level > 8) raise(ErrorKind::InvalidArgument, "icosphere level must be in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  RawMesh m;
  m.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                 {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : m.positions) p.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 p = (m.positions[a] + m.positions[b]).normalized();
      m.positions.push_back(p);
      int idx = static_cast<int>(m.positions.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    FaceList next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      int a = mid(f[0], f[1]);
      int b = mid(f[1], f[2]);
      int c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    m.faces = std::move(next);
  }
  return m;
}

}  // namespace

DiscreteHypersurface make_icosphere(int level, double radius, const Vec3& center) {
  if (!(radius > 0.0)) raise(ErrorKind::InvalidArgument, "radius must be positive");
  RawMesh m = unit_icosphere(level);
  for (auto& p : m.positions) p = center + radius * p;
  return DiscreteHypersurface::mesh(std::move(m.positions), std::move(m.faces));
}

DiscreteHypersurface make_ellipsoid(int level, const Vec3& semi_axes) {
  if (!(semi_axes.minCoeff() > 0.0)) raise(ErrorKind::InvalidArgument, "semi-axes must be positive");
  RawMesh m = unit_icosphere(level);
  for (auto& p : m.positions) p = p.cwiseProduct(semi_axes);
  return DiscreteHypersurface::mesh(std::move(m.positions), std::move(m.faces));
}

DiscreteHypersurface make_bumpy_sphere(int level, double radius, double amplitude, std::uint64_t seed) {
  if (!(radius > 0.0) || !(amplitude >= 0.0) || amplitude >= 1.0)
    raise(ErrorKind::InvalidArgument, "need radius > 0 and amplitude in [0, 1)");
  RawMesh m = unit_icosphere(level);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Random homogeneous polynomials of degree 2..4 restricted to the sphere.
  struct Term {
    double c;
    int i, j, k;
  };
  std::vector<Term> terms;
  for (int deg = 2; deg <= 4; ++deg)
    for (int i = 0; i <= deg; ++i)
      for (int j = 0; i + j <= deg; ++j) terms.push_back({normal(rng), i, j, deg - i - j});
  std::vector<double> bump(m.positions.size());
  double peak = 0.0;
  for (std::size_t v = 0; v < m.positions.size(); ++v) {
    const Vec3& p = m.positions[v];
    double value = 0.0;
    for (const auto& t : terms)
      value += t.c * std::pow(p.x(), t.i) * std::pow(p.y(), t.j) * std::pow(p.z(), t.k);
    bump[v] = value;
    peak = std::max(peak, std::fabs(value));
  }
  if (peak == 0.0) peak = 1.0;
  for (std::size_t v = 0; v < m.positions.size(); ++v)
    m.positions[v] *= radius * (1.0 + amplitude * bump[v] / peak);
  return DiscreteHypersurface::mesh(std::move(m.positions), std::move(m.faces));
}

DiscreteHypersurface make_circle(int vertex_count, double radius) {
  return make_ellipse(vertex_count, radius, radius);
}

DiscreteHypersurface make_ellipse(int vertex_count, double semi_x, double semi_y) {
  if (vertex_count < 3) raise(ErrorKind::InvalidArgument, "need at least 3 vertices");
  if (!(semi_x > 0.0) || !(semi_y > 0.0)) raise(ErrorKind::InvalidArgument, "semi-axes must be positive");
  std::vector<Vec3> pts;
  pts.reserve(vertex_count);
  for (int i = 0; i < vertex_count; ++i) {
    double theta = 2.0 * std::numbers::pi * i / vertex_count;
    pts.emplace_back(semi_x * std::cos(theta), semi_y * std::sin(theta), 0.0);
  }
  return DiscreteHypersurface::curve(std::move(pts));
}

}  // namespace mcflow

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mcflow {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;
using FaceList = std::vector<Face>;

/// One finite real value per vertex of a surface.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::vector<double> values);

  static ScalarField constant(std::size_t size, double value);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Closed polygonal curve in the z = 0 plane (n = 1) or closed oriented
/// triangle mesh (n = 2), with the per-vertex geometry every other module reads.
///
/// Conventions: the normal points outward and H > 0 on convex shapes, so the
/// flow dF/dt = -H nu shrinks spheres. Dual weights are barycentric (half the
/// incident edge lengths, a third of the incident triangle areas). On meshes
/// |A|^2 = max(H^2 - 2K, 0) with K the angle defect over the dual weight.
///
/// Instances are immutable once built.
class DiscreteHypersurface {
 public:
  /// Vertices in loop order; the loop closes implicitly. z must be zero.
  static DiscreteHypersurface curve(std::vector<Vec3> positions);
  /// Faces may come in either global orientation; they are flipped when the
  /// enclosed signed volume is negative. Vertex numbering is preserved.
  static DiscreteHypersurface mesh(std::vector<Vec3> positions, FaceList faces);

  /// Same connectivity (and orientation) with new vertex positions. Skips the
  /// topology checks, which positions cannot change.
  DiscreteHypersurface with_positions(std::vector<Vec3> positions) const;

  int dimension() const { return dimension_; }
  std::size_t vertex_count() const { return positions_.size(); }
  const std::vector<Vec3>& positions() const { return positions_; }
  /// Empty for curves.
  const FaceList& faces() const { return *faces_; }
  const std::shared_ptr<const FaceList>& shared_faces() const { return faces_; }
  /// +1 when the stored loop is counter-clockwise (curves only).
  int loop_orientation() const { return orientation_; }

  const std::vector<Vec3>& normals() const { return normals_; }
  /// H nu per vertex.
  const std::vector<Vec3>& mean_curvature_vectors() const { return mean_curvature_vectors_; }
  std::span<const double> mean_curvature() const { return mean_curvature_; }
  std::span<const double> a_squared() const { return a_squared_; }
  std::span<const double> a_norm() const { return a_norm_; }
  /// Angle-defect density; zeros for curves.
  std::span<const double> gauss_curvature() const { return gauss_curvature_; }
  std::span<const double> dual_area() const { return dual_area_; }
  /// Triangle areas (n = 2) or edge lengths (n = 1, edge i joins i and i+1).
  std::span<const double> element_measure() const { return element_measure_; }

  double total_measure() const { return total_measure_; }
  double max_abs_a() const;
  double max_abs_h() const;
  int euler_characteristic() const;
  std::size_t edge_count() const;
  /// Lengths of all undirected edges (each listed once).
  std::vector<double> edge_lengths() const;
  Vec3 centroid() const;

  /// Symmetric positive semidefinite stiffness matrix C with
  /// (C X)_i = w_i * (H nu)_i: the cotangent matrix on meshes, inverse edge
  /// lengths on curves.
  Eigen::SparseMatrix<double> stiffness_matrix() const;

 private:
  DiscreteHypersurface() = default;
  void refresh();
  void refresh_curve();
  void refresh_mesh();

  int dimension_ = 0;
  int orientation_ = 1;
  std::vector<Vec3> positions_;
  std::shared_ptr<const FaceList> faces_;

  std::vector<Vec3> normals_;
  std::vector<Vec3> mean_curvature_vectors_;
  std::vector<double> mean_curvature_;
  std::vector<double> a_squared_;
  std::vector<double> a_norm_;
  std::vector<double> gauss_curvature_;
  std::vector<double> dual_area_;
  std::vector<double> element_measure_;
  double total_measure_ = 0.0;
};

/// Recomputes every cached quantity from positions and connectivity.
DiscreteHypersurface curvatures(const DiscreteHypersurface& surface);

/// Applies x -> scale * R x + t. Reflections (det R < 0) are re-oriented so
/// normals stay outward.
DiscreteHypersurface transformed(const DiscreteHypersurface& surface, const Eigen::Matrix3d& rotation,
                                 const Vec3& translation, double scale = 1.0);

/// sum_i |f_i|^p w_i, the lumped version of the integral of |f|^p over M.
double integrate(const DiscreteHypersurface& surface, const ScalarField& field, double p);
double integrate(const DiscreteHypersurface& surface, std::span<const double> values, double p);

/// Integral of |grad f|^2 with piecewise-linear gradients (per face on meshes,
/// per edge on curves).
double dirichlet_energy(const DiscreteHypersurface& surface, const ScalarField& field);
/// Integral of |grad f| with the same element-wise gradients.
double gradient_l1(const DiscreteHypersurface& surface, const ScalarField& field);

/// Per-face gradient vectors of the piecewise-linear interpolant (n = 2).
std::vector<Vec3> face_gradients(const DiscreteHypersurface& surface, const ScalarField& field);

}  // namespace mcflow

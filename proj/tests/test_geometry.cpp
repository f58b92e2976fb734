// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Geometry>

#include <numbers>

#include "doctest.h"
#include "mcflow/error.hpp"
#include "mcflow/mesh_gen.hpp"
#include "mcflow/surface.hpp"
#include "support.hpp"

using namespace mcflow;
using testing::rel;
using std::numbers::pi;

namespace {

std::vector<DiscreteHypersurface> sample_meshes() {
  return {make_icosphere(0), make_icosphere(2), make_icosphere(4, 2.5, Vec3(1, -2, 0.5)),
          make_ellipsoid(3, Vec3(1.0, 0.7, 0.4)), make_bumpy_sphere(3, 1.0, 0.2, 11)};
}

double max_rel(std::span<const double> a, std::span<const double> b, double scale_a = 1.0) {
  double scale = 0.0;
  for (double v : b) scale = std::max(scale, std::fabs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] * scale_a - b[i]) / scale);
  return worst;
}

}  // namespace

TEST_CASE("angle defects integrate to 2 pi chi") {
  for (const auto& m : sample_meshes()) {
    const auto defects = testing::angle_defects(m);
    double total = 0.0, from_k = 0.0;
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      total += defects[i];
      from_k += m.gauss_curvature()[i] * m.dual_area()[i];
      CHECK(std::fabs(m.gauss_curvature()[i] * m.dual_area()[i] - defects[i]) < 1e-12);
    }
    CHECK(m.euler_characteristic() == 2);
    CHECK(std::fabs(total - 4.0 * pi) < 1e-9);
    CHECK(std::fabs(from_k - 4.0 * pi) < 1e-9);
  }
}

TEST_CASE("|A|^2 equals H^2 - 2K on meshes and kappa^2 on curves") {
  for (const auto& m : sample_meshes())
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      const double h = m.mean_curvature()[i], k = m.gauss_curvature()[i];
      CHECK(m.a_squared()[i] == doctest::Approx(std::max(h * h - 2.0 * k, 0.0)).epsilon(1e-12));
      CHECK(m.a_norm()[i] * m.a_norm()[i] == doctest::Approx(m.a_squared()[i]).epsilon(1e-12));
    }
  const auto c = make_ellipse(300, 2.0, 1.0);
  for (std::size_t i = 0; i < c.vertex_count(); ++i)
    CHECK(c.a_squared()[i] == doctest::Approx(c.mean_curvature()[i] * c.mean_curvature()[i]).epsilon(1e-12));
}

TEST_CASE("rigid motions preserve curvature and measure") {
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (const auto& m : sample_meshes()) {
    const auto moved = transformed(m, rot, Vec3(3, -1, 2));
    CHECK(max_rel(moved.mean_curvature(), m.mean_curvature()) < 1e-10);
    CHECK(max_rel(moved.a_norm(), m.a_norm()) < 1e-10);
    CHECK(max_rel(moved.gauss_curvature(), m.gauss_curvature()) < 1e-10);
    CHECK(max_rel(moved.dual_area(), m.dual_area()) < 1e-10);
  }
  const Eigen::Matrix3d planar = Eigen::AngleAxisd(1.1, Vec3::UnitZ()).toRotationMatrix();
  const auto c = make_ellipse(200, 1.5, 0.5);
  const auto moved = transformed(c, planar, Vec3(0.3, 4.0, 0.0));
  CHECK(max_rel(moved.a_norm(), c.a_norm()) < 1e-10);
  CHECK(max_rel(moved.dual_area(), c.dual_area()) < 1e-10);
}

TEST_CASE("dilations scale every cached quantity exactly") {
  const double s = 3.0;
  auto meshes = sample_meshes();
  meshes.push_back(make_circle(97));
  for (const auto& m : meshes) {
    const auto big = transformed(m, Eigen::Matrix3d::Identity(), Vec3::Zero(), s);
    const int n = m.dimension();
    CHECK(max_rel(big.mean_curvature(), m.mean_curvature(), s) < 1e-12);
    CHECK(max_rel(big.a_norm(), m.a_norm(), s) < 1e-12);
    CHECK(max_rel(big.dual_area(), m.dual_area(), std::pow(s, -n)) < 1e-12);
    if (n == 2) CHECK(max_rel(big.gauss_curvature(), m.gauss_curvature(), s * s) < 1e-12);
    CHECK(rel(big.total_measure(), std::pow(s, n) * m.total_measure()) < 1e-12);
  }
}

TEST_CASE("regular polygon and fine sphere approximate the smooth values") {
  const int count = 2000;
  const auto c = make_circle(count, 2.0);
  CHECK(rel(c.total_measure(), 2.0 * count * 2.0 * std::sin(pi / count)) < 1e-12);
  for (double a : c.a_norm()) CHECK(a == doctest::Approx(0.5).epsilon(1e-5));
  const auto s = make_icosphere(4);
  CHECK(s.total_measure() == doctest::Approx(4.0 * pi).epsilon(5e-3));
  double mean_h = 0.0;
  for (double h : s.mean_curvature()) mean_h += h / static_cast<double>(s.vertex_count());
  CHECK(mean_h == doctest::Approx(2.0).epsilon(5e-3));
}

TEST_CASE("integrals, Dirichlet energy and gradient norm") {
  const auto s = make_icosphere(4);
  const auto one = ScalarField::constant(s.vertex_count(), 1.0);
  CHECK(rel(integrate(s, one, 1.0), s.total_measure()) < 1e-12);
  CHECK(dirichlet_energy(s, one) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gradient_l1(s, one) == doctest::Approx(0.0).epsilon(1e-12));
  // f = x: |grad f|^2 = 1 - n_x^2 integrates to 8 pi / 3 on the unit sphere.
  std::vector<double> x;
  for (const auto& p : s.positions()) x.push_back(p.x());
  CHECK(dirichlet_energy(s, ScalarField(x)) == doctest::Approx(8.0 * pi / 3.0).epsilon(1e-2));
  // integral of |grad x| = integral of sqrt(1 - n_x^2) = pi^2.
  CHECK(gradient_l1(s, ScalarField(x)) == doctest::Approx(pi * pi).epsilon(1e-2));
}

TEST_CASE("construction errors") {
  auto m = make_icosphere(1);
  FaceList faces = m.faces();
  faces.pop_back();
  CHECK_THROWS_AS(DiscreteHypersurface::mesh(m.positions(), faces), Error);
  try {
    DiscreteHypersurface::mesh(m.positions(), faces);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonManifold);
  }
  FaceList bad = m.faces();
  bad[0][1] = bad[0][0];
  try {
    DiscreteHypersurface::mesh(m.positions(), bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::Degenerate || e.kind() == ErrorKind::NonManifold));
  }
  try {
    DiscreteHypersurface::curve({Vec3(0, 0, 0), Vec3(1, 0, 0.5), Vec3(0, 1, 0)});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  try {
    integrate(m, ScalarField::constant(3, 1.0), 2.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FieldMismatch);
  }
}

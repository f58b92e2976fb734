// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcflow/analysis.hpp"
#include "mcflow/error.hpp"
#include "mcflow/mesh_gen.hpp"
#include "mcflow/rescale.hpp"
#include "support.hpp"

using namespace mcflow;
using testing::rel;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

DiscreteHypersurface scaled(const DiscreteHypersurface& s, double k) {
  std::vector<Vec3> p = s.positions();
  for (Vec3& v : p) v *= k;
  return s.with_positions(std::move(p));
}

const FlowTrajectory& unit_sphere_run() {
  static const FlowTrajectory t = [] {
    const auto& base = testing::singular_sphere();
    return rescale_trajectory(base, unit_time_factor(0.8 * base.final_time()));
  }();
  return t;
}

}  // namespace

TEST_CASE("Sobolev exponents") {
  const auto e = SobolevExponents::make(2, 10.0);
  CHECK(e.m == doctest::Approx(5.5));
  CHECK(e.alpha == doctest::Approx(10.0));
  CHECK(e.beta_par == doctest::Approx(4.0));
  const auto e3 = SobolevExponents::make(3);
  CHECK(e3.q_sob == doctest::Approx(3.0));
  CHECK(e3.m == doctest::Approx(12.0 / 5.0));
  CHECK(e3.m > 1.0);
  CHECK(e3.m < e3.q_sob);
  CHECK(kind_of([] { SobolevExponents::make(1); }) == ErrorKind::UnsupportedDimension);
  CHECK(kind_of([] { SobolevExponents::make(2, 1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Michael-Simon ratio of a constant on the round sphere") {
  const auto s = make_icosphere(4);
  const auto one = ScalarField::constant(s.vertex_count(), 1.0);
  // sqrt(4 pi) / (2 * 4 pi)
  const double expected = std::sqrt(4.0 * std::numbers::pi) / (8.0 * std::numbers::pi);
  const double r = michael_simon_ratio(s, one);
  CHECK(rel(r, expected) < 5e-3);
  CHECK(rel(michael_simon_ratio(scaled(s, 3.0), one), r) < 1e-12);
  CHECK(rel(michael_simon_ratio(s, ScalarField::constant(s.vertex_count(), 7.0)), r) < 1e-12);
  CHECK(kind_of([] { michael_simon_ratio(make_circle(64), ScalarField::constant(64, 1.0)); }) ==
        ErrorKind::UnsupportedDimension);
  CHECK(kind_of([&] { michael_simon_ratio(s, ScalarField::constant(s.vertex_count(), -1.0)); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { michael_simon_ratio(s, ScalarField::constant(3, 1.0)); }) == ErrorKind::FieldMismatch);
}

TEST_CASE("mean-curvature Sobolev terms") {
  const auto s = make_icosphere(3);
  const auto one = ScalarField::constant(s.vertex_count(), 1.0);
  const auto t = lemma21_terms(s, one);
  const double area = 4.0 * std::numbers::pi;
  CHECK(rel(t.lhs, std::pow(area, 0.1)) < 1e-2);
  CHECK(t.gradient == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rel(t.l2_squared, area) < 1e-2);
  CHECK(rel(t.h_factor, std::pow(std::pow(2.0, 5.0) * area, 2.0 / 3.0)) < 2e-2);
  CHECK(t.gap(t.minimal_constant()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lemma21_gap(s, one, 2.0 * t.minimal_constant()) > 0.0);
  CHECK(kind_of([] { lemma21_terms(make_circle(32), ScalarField::constant(32, 1.0)); }) ==
        ErrorKind::UnsupportedDimension);
}

TEST_CASE("interpolation inequality") {
  const auto s = make_icosphere(3);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const auto f = random_field(s, rng);
    for (int e = -6; e <= 6; ++e) {
      const auto terms = interpolation_terms(s, f, std::pow(10.0, e / 2.0), 4, 8, 2);
      CHECK(terms.mu == doctest::Approx(2.0));
      CHECK(terms.gap >= -1e-9 * terms.norm_r);
    }
  }
  const auto one = ScalarField::constant(s.vertex_count(), 2.0);
  const auto c = interpolation_terms(s, one, 1.0, 4, 8, 2);
  CHECK(c.norm_r == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.gap == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(kind_of([&] { interpolation_gap(s, one, 1.0, 2, 8, 4); }) == ErrorKind::ExponentOrder);
  CHECK(kind_of([&] { interpolation_gap(s, one, 1.0, 4, 4, 2); }) == ErrorKind::ExponentOrder);
}

TEST_CASE("reverse Holder constants") {
  CHECK(moser_constants(2, 2.5, 1, 1, 1).nu == doctest::Approx(4.0));
  CHECK(moser_constants(2, 3.0, 1, 1, 1).c_a == doctest::Approx(8.0));
  CHECK(moser_constants(2, 3.0, 1, 1, 1).lambda_m == doctest::Approx(2.0));
  CHECK(kind_of([] { moser_constants(2, 2.0, 1, 1, 1); }) == ErrorKind::SubcriticalExponent);
  for (int n = 1; n <= 8; ++n) CHECK(1.0 + moser_constants(n, 0.5 * (n + 3), 1, 1, 1).nu == doctest::Approx(n + 3.0));

  const auto m = moser_constants(2, 2.5, 1.5, 1.2, 3.0);
  CHECK(m.log_c_b(4.0) == doctest::Approx(std::log(m.c_b(4.0))));
  CHECK(moser_constants(2, 2.5, 2.0, 1.2, 3.0).c_a > m.c_a);
  CHECK(moser_constants(2, 2.5, 1.5, 2.0, 3.0).c_z > m.c_z);
  CHECK(moser_constants(2, 2.5, 1.5, 1.2, 4.0).log_c_b(5.0) > m.log_c_b(5.0));
  CHECK(m.big_lambda(3.0) == doctest::Approx(300.0));
  CHECK(kind_of([&] { m.c_b(1.0); }) == ErrorKind::InvalidArgument);

  const auto huge = moser_constants(4, 3.01, 1e30, 1e30, 1e30);
  CHECK(std::isfinite(huge.log_c_z));
  CHECK(huge.to_json().dump().find("null") != std::string::npos);
}

TEST_CASE("c1 bound on trajectories") {
  FlowTrajectory t = testing::short_sphere();
  t.records.resize(1);
  t.records[0].dt = 0.0;
  const auto zero = c1_from_c0_bound(t);
  CHECK(zero.c0 == 0.0);
  CHECK(zero.c1 == 1.0);
  CHECK(zero.pass);
  const auto b = c1_from_c0_bound(testing::singular_sphere());
  CHECK(b.c0 > 0.0);
  CHECK(b.c1 > 1.0);
  CHECK(b.pass);
}

TEST_CASE("spacetime regions and the Harnack-type check") {
  const auto& t = unit_sphere_run();
  REQUIRE(t.final_time() >= 1.0);
  const Vec3 c = t.snapshots.front().positions.front() * std::sqrt(0.5);
  const auto inner = SpacetimeRegion::inner(c).extract(t);
  const auto outer = SpacetimeRegion::outer(c).extract(t);
  REQUIRE(!inner.empty());
  CHECK(std::is_sorted(inner.begin(), inner.end()));
  CHECK(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));

  const auto r = harnack_check(t, c, 5.0, 2.5, 1.0);
  CHECK(r.inner_samples == inner.size());
  CHECK(r.outer_samples == outer.size());
  CHECK(r.sup_inner > 0.0);
  CHECK(r.pass == (r.log_margin >= 0.0));
  CHECK(!r.caveat.empty());
  const auto at_min = harnack_check(t, c, 5.0, 2.5, r.minimal_c_n);
  CHECK(at_min.log_margin == doctest::Approx(0.0).epsilon(1e-9));

  CHECK(kind_of([&] { harnack_check(t, Vec3(100, 0, 0), 5.0, 2.5, 1.0); }) == ErrorKind::EmptyRegion);
  CHECK(kind_of([&] { harnack_check(testing::short_sphere(), c, 5.0, 2.5, 1.0); }) == ErrorKind::TrajectoryRange);
  CHECK(kind_of([&] { harnack_check(t, c, 5.0, 2.0, 1.0); }) == ErrorKind::SubcriticalExponent);
  CHECK(kind_of([&] { harnack_check(t, c, 1.0, 2.5, 1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("parabolic Sobolev terms") {
  const auto& t = testing::singular_sphere();
  const auto terms = parabolic_sobolev_terms(t, a_norm_series(t));
  CHECK(terms.lhs > 0.0);
  CHECK(terms.max_l2_power == doctest::Approx(terms.max_l2_squared));
  CHECK(terms.gap(terms.minimal_constant()) == doctest::Approx(0.0).epsilon(1e-9));
  FieldSeries short_series(t.snapshots.size() - 1);
  CHECK(kind_of([&] { parabolic_sobolev_terms(t, short_series); }) == ErrorKind::FieldMismatch);
}

TEST_CASE("random batteries are reproducible") {
  const std::vector<DiscreteHypersurface> surfaces{make_icosphere(2), make_ellipsoid(2, Vec3(1.0, 0.8, 0.6))};
  const auto a = michael_simon_battery(surfaces, 20, 5);
  const auto b = michael_simon_battery(surfaces, 20, 5);
  CHECK(a.values == b.values);
  CHECK(a.trials() == 40u);
  CHECK(a.max <= 1.0);
  CHECK(michael_simon_battery(surfaces, 20, 6).values != a.values);

  const auto l1 = lemma21_battery(surfaces, 50, 10.0, 1);
  const auto l2 = lemma21_battery(surfaces, 50, 10.0, 2);
  CHECK(std::isfinite(l1.max));
  CHECK(l1.max / l2.max < 2.0);
  CHECK(l2.max / l1.max < 2.0);

  const auto i = interpolation_battery(surfaces, 5, {0.1, 1.0, 10.0}, 4, 8, 2, 3);
  CHECK(i.trials() == 30u);
  CHECK(i.min >= -1e-9);
}

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcflow/error.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/mesh_gen.hpp"
#include "mcflow/oracle.hpp"
#include "support.hpp"

using namespace mcflow;
using std::numbers::pi;
using testing::rel;

namespace {

// Instantaneous integrands written out directly in terms of R(t).
double direct(int n, double r0, double t, const FunctionalSpec& spec) {
  const double r = std::sqrt(r0 * r0 - 2.0 * n * t);
  const double a = std::sqrt(static_cast<double>(n)) / r;
  const double measure = (n == 1 ? 2.0 * pi : 4.0 * pi) * std::pow(r, n);
  switch (spec.kind) {
    case FunctionalKind::MixedNorm: return std::pow(std::pow(a, spec.p) * measure, spec.q / spec.p);
    case FunctionalKind::Supercritical: return std::pow(a, n + 3) * measure;
    case FunctionalKind::SubcriticalLog:
      return std::pow(a, n + 2) / std::log((spec.log == LogVariant::TwoPlus ? 2.0 : 1.0) + a) * measure;
    case FunctionalKind::SupA: return a;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("sphere solution closed forms") {
  for (int n = 1; n <= 4; ++n) {
    const SphereSolution s{n, 1.3};
    CHECK(s.singular_time() == doctest::Approx(1.69 / (2.0 * n)));
    for (double f : {0.0, 0.3, 0.9, 0.999}) {
      const double t = f * s.singular_time();
      CHECK(s.a_norm(t) * std::sqrt(2.0 * (s.singular_time() - t)) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.mean_curvature(t) == doctest::Approx(std::sqrt(static_cast<double>(n)) * s.a_norm(t)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(s.radius(s.singular_time()), Error);
    CHECK_THROWS_AS(s.radius(-0.1), Error);
  }
  CHECK(unit_sphere_measure(1) == doctest::Approx(2.0 * pi));
  CHECK(unit_sphere_measure(2) == doctest::Approx(4.0 * pi));
  CHECK(unit_sphere_measure(3) == doctest::Approx(2.0 * pi * pi));
}

TEST_CASE("closed-form cumulative values") {
  const SphereSolution sphere{2, 1.0}, circle{1, 1.0};
  CHECK(sphere_functional(sphere, 0.2, FunctionalSpec::mixed(4, 4), true) ==
        doctest::Approx(4.0 * pi * std::log(5.0)).epsilon(1e-12));
  CHECK(sphere_functional(circle, 0.4, FunctionalSpec::mixed(3, 3), true) ==
        doctest::Approx(pi * std::log(5.0)).epsilon(1e-12));
  CHECK(sphere_functional(sphere, 0.2, FunctionalSpec::supercritical(), true) ==
        doctest::Approx(std::pow(2.0, 3.5) * pi * (std::sqrt(5.0) - 1.0)).epsilon(1e-12));
  CHECK(sphere_functional(sphere, 0.0, FunctionalSpec::subcritical_log(), false) ==
        doctest::Approx(16.0 * pi / std::log(2.0 + std::sqrt(2.0))).epsilon(1e-12));
  CHECK(sphere_functional(sphere, 0.0, FunctionalSpec::subcritical_log(), true) == 0.0);
}

TEST_CASE("closed forms agree with independent quadrature") {
  const std::vector<FunctionalSpec> specs{FunctionalSpec::mixed(4, 4),       FunctionalSpec::mixed(3, 3),
                                          FunctionalSpec::mixed(6, 6),       FunctionalSpec::mixed(2, 5),
                                          FunctionalSpec::supercritical(),   FunctionalSpec::subcritical_log(),
                                          FunctionalSpec::subcritical_log(LogVariant::OnePlus),
                                          FunctionalSpec::sup_a()};
  for (int n : {1, 2})
    for (double r0 : {1.0, 0.6})
      for (const auto& spec : specs) {
        const SphereSolution s{n, r0};
        const double t = 0.8 * s.singular_time();
        CAPTURE(n);
        CAPTURE(spec.name());
        CHECK(rel(sphere_functional(s, t, spec, false), direct(n, r0, t, spec)) < 1e-12);
        const double quad = testing::simpson([&](double u) { return direct(n, r0, u, spec); }, 0.0, t, 1e-13);
        CHECK(rel(sphere_functional(s, t, spec, true), quad) < 1e-9);
      }
}

TEST_CASE("supercritical closed form scales like 1/Q") {
  for (double q : {0.5, 2.0, 7.0}) {
    const SphereSolution s{2, 1.0};
    const double t = 0.15;
    CHECK(rel(sphere_functional(s.rescaled(q), q * q * t, FunctionalSpec::supercritical(), true),
              sphere_functional(s, t, FunctionalSpec::supercritical(), true) / q) < 1e-12);
    CHECK(rel(s.rescaled(q).radius(q * q * t), q * s.radius(t)) < 1e-12);
  }
}

TEST_CASE("trajectory comparison") {
  const auto& t = testing::short_sphere();
  const auto c = compare(t, SphereSolution{2, 1.0});
  CHECK(c.radius.max < 0.02);
  CHECK(c.radius.samples > 10);
  CHECK(!c.cumulative.empty());
  const auto j = c.summary();
  CHECK(j.contains("radius"));
  FlowConfig cfg;
  cfg.t_end = 0.001;
  const auto ellipsoid = run(make_ellipsoid(2, Vec3(1.0, 0.8, 0.6)), cfg);
  try {
    compare(ellipsoid, SphereSolution{2, 1.0});
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }
}

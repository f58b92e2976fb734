// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcflow/error.hpp"
#include "mcflow/monitors.hpp"
#include "support.hpp"

using namespace mcflow;
using std::numbers::pi;

TEST_CASE("functional names round-trip") {
  for (const char* name : {"mixed:4,4", "mixed:6,6", "mixed:2.5,10", "sublog", "sublog1", "super", "supA"}) {
    const auto spec = FunctionalSpec::parse(name);
    CHECK(spec.name() == name);
    CHECK_NOTHROW(spec.validate());
  }
  CHECK_THROWS_AS(FunctionalSpec::parse("mixed:4"), Error);
  CHECK_THROWS_AS(FunctionalSpec::parse("nonsense"), Error);
  CHECK_THROWS_AS(FunctionalSpec::mixed(-1, 2).validate(), Error);
}

TEST_CASE("criticality of exponent pairs") {
  CHECK(criticality(2, 4, 4) == Criticality::Critical);
  CHECK(criticality(1, 3, 3) == Criticality::Critical);
  CHECK(criticality(2, 3, 6) == Criticality::Critical);
  CHECK(criticality(2, 6, 6) == Criticality::Supercritical);
  CHECK(criticality(2, 2, 2) == Criticality::Subcritical);
  CHECK_THROWS_AS(criticality(2, 0, 1), Error);
}

TEST_CASE("cumulative monitors use the left-endpoint rule") {
  const auto t = testing::synthetic_sphere_records();
  const auto m = monitor(t, FunctionalSpec::mixed(4, 4));
  double acc = 0.0;
  for (std::size_t k = 0; k < t.records.size(); ++k) {
    CHECK(m.cumulative[k] == doctest::Approx(acc).epsilon(1e-13));
    acc += t.records[k].power_integrals[3] * t.records[k].dt;
  }
  CHECK(std::pow(mixed_norm(t, 4, 4), 4) == doctest::Approx(m.final_cumulative()).epsilon(1e-12));
  // (p, q) = (2, 4): the L^2 norm raised to the 4th power, integrated in time.
  const auto m24 = monitor(t, FunctionalSpec::mixed(2, 4));
  for (std::size_t k = 0; k < t.records.size(); k += 50)
    CHECK(m24.instantaneous[k] == doctest::Approx(std::pow(t.records[k].power_integrals[1], 2.0)).epsilon(1e-13));
  const auto sup = monitor(t, FunctionalSpec::sup_a());
  CHECK(sup.instantaneous.front() == doctest::Approx(std::sqrt(2.0)));
  // Left-endpoint sums bound the increasing integrand from below.
  CHECK(m.cumulative_at(0.2) <= 4.0 * pi * std::log(5.0));
  CHECK(m.cumulative_at(0.2) == doctest::Approx(4.0 * pi * std::log(5.0)).epsilon(0.05));
}

TEST_CASE("growth fits separate divergent and bounded monitors on the exact sphere") {
  const auto t = testing::synthetic_sphere_records(0.97, 1e-7);
  const auto critical = monitor(t, FunctionalSpec::mixed(4, 4));
  REQUIRE(critical.divergence);
  CHECK(critical.divergence->divergent);
  CHECK(std::fabs(critical.divergence->decay) < 0.05);
  const auto g = subcritical_log(t);
  REQUIRE(g.divergence);
  CHECK(g.divergence->divergent);
  const auto sub = monitor(t, FunctionalSpec::mixed(2, 2));
  REQUIRE(sub.divergence);
  CHECK_FALSE(sub.divergence->divergent);
  CHECK(sub.divergence->decay == doctest::Approx(1.0).epsilon(0.05));
  // Growth faster than critical still reads as divergent.
  const auto super = monitor(t, FunctionalSpec::mixed(6, 6));
  REQUIRE(super.divergence);
  CHECK(super.divergence->decay < 0.0);
}

TEST_CASE("divergence fits need a singular trajectory") {
  const auto& t = testing::short_sphere();
  CHECK_FALSE(monitor(t, FunctionalSpec::mixed(4, 4)).divergence.has_value());
}

TEST_CASE("spatial integrals fall back to snapshots and report missing data") {
  const auto& t = testing::short_sphere();
  const double recorded = spatial_power_integral(t, 10, 4.0);
  CHECK(recorded == doctest::Approx(t.records[10].power_integrals[3]));
  const double recomputed = spatial_power_integral(t, 10, 7.0);
  CHECK(recomputed > 0.0);
  auto bare = testing::synthetic_sphere_records();
  try {
    spatial_power_integral(bare, 0, 7.0);
    FAIL("expected MissingMonitors");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingMonitors);
  }
  CHECK(spatial_power_integral(bare, 0, 5.0) == doctest::Approx(bare.records[0].supercritical_integral));
}

TEST_CASE("keybound ratio check") {
  const auto t = testing::synthetic_sphere_records();
  const auto r = keybound_check(t, 0.1, default_c_lambda(0.1));
  CHECK(r.max_ratio > 0.0);
  CHECK(r.exceeds == (r.max_ratio > r.c_lambda));
  CHECK(default_c_lambda(0.25, 1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(keybound_check(t, 0.0, 1.0), Error);
  CHECK_THROWS_AS(keybound_check(testing::short_sphere(), 0.5, 1.0), Error);
}

TEST_CASE("monitor reports serialize") {
  const auto& t = testing::short_sphere();
  const auto m = supercritical(t);
  const auto j = m.summary();
  CHECK(j.contains("final_cumulative"));
  const std::string csv = m.csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(t.records.size() + 1));
}

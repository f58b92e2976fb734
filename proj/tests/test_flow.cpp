// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "mcflow/error.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/mesh_gen.hpp"
#include "support.hpp"

using namespace mcflow;

namespace {

double mean_radius(const std::vector<Vec3>& x) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : x) c += p;
  c /= static_cast<double>(x.size());
  double r = 0.0;
  for (const auto& p : x) r += (p - c).norm();
  return r / static_cast<double>(x.size());
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("configuration validation") {
  FlowConfig c;
  CHECK_NOTHROW(c.validate());
  c.c_stab = 0.0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidArgument);
  c = FlowConfig{};
  c.dt_min = c.dt_max;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidArgument);
  c = FlowConfig{};
  c.snapshot_stride = 0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidArgument);
  CHECK(parse_scheme(to_string(Scheme::Explicit)) == Scheme::Explicit);
  CHECK(parse_status(to_string(TerminalStatus::StepUnderflow)) == TerminalStatus::StepUnderflow);
}

TEST_CASE("short sphere run follows the shrinking radius") {
  const auto& t = testing::short_sphere();
  CHECK(t.status == TerminalStatus::ReachedTEnd);
  CHECK(t.final_time() == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(t.has_all_snapshots());
  for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
    CHECK(t.records[k + 1].time > t.records[k].time);
    CHECK(t.records[k + 1].measure < t.records[k].measure);
    CHECK(t.records[k].dt == doctest::Approx(t.records[k + 1].time - t.records[k].time).epsilon(1e-12));
  }
  for (const auto& s : t.snapshots) {
    const double exact = std::sqrt(1.0 - 4.0 * s.time);
    CHECK(mean_radius(s.positions) == doctest::Approx(exact).epsilon(0.02));
  }
  CHECK(kind_of([&] { estimate_singular_time(t); }) == ErrorKind::InsufficientData);
}

TEST_CASE("shrinking circle blows up at one half with rate one half") {
  const auto& t = testing::singular_circle();
  CHECK(t.status == TerminalStatus::SingularityDetected);
  CHECK(t.singular_fit->singular_time == doctest::Approx(0.5).epsilon(0.02));
  CHECK(t.singular_fit->rate_exponent == doctest::Approx(0.5).epsilon(0.1));
  CHECK(t.records.back().sup_a >= t.a_max_threshold);
}

TEST_CASE("semi-implicit and explicit steps agree to first order") {
  const auto s = make_icosphere(3);
  auto diff = [&](double dt) {
    const auto a = step(s, dt, Scheme::SemiImplicit);
    const auto b = step(s, dt, Scheme::Explicit);
    double m = 0.0;
    for (std::size_t i = 0; i < s.vertex_count(); ++i) m = std::max(m, (a.positions()[i] - b.positions()[i]).norm());
    return m;
  };
  const double d1 = diff(1e-3), d2 = diff(5e-4), d3 = diff(2.5e-4);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(d2 / d3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("concentric spheres keep their ordering") {
  FlowConfig c;
  c.t_end = 0.1;
  const auto outer = run(make_icosphere(2, 1.0), c);
  const auto inner = run(make_icosphere(2, 0.8), c);
  const std::size_t count = std::min(outer.snapshots.size(), inner.snapshots.size());
  REQUIRE(count > 10);
  for (std::size_t k = 0; k < count; ++k) {
    REQUIRE(outer.snapshots[k].time == doctest::Approx(inner.snapshots[k].time));
    CHECK(mean_radius(outer.snapshots[k].positions) > mean_radius(inner.snapshots[k].positions));
  }
}

TEST_CASE("snapshot stride keeps the final state") {
  FlowConfig c;
  c.t_end = 0.01;
  c.snapshot_stride = 7;
  const auto t = run(make_circle(64), c);
  CHECK(!t.has_all_snapshots());
  CHECK(t.snapshots.front().record == 0);
  CHECK(t.snapshots.back().record == t.records.size() - 1);
  for (const auto& s : t.snapshots) CHECK((s.record % 7 == 0 || s.record == t.records.size() - 1));
}

TEST_CASE("recorded integrals match the snapshot geometry") {
  const auto& t = testing::short_sphere();
  for (std::size_t k = 0; k < t.records.size(); k += 37) {
    const auto s = t.snapshots[k].surface();
    const StateRecord r = measure_state(s, t.records[k].time, t.powers);
    for (std::size_t i = 0; i < t.powers.size(); ++i)
      CHECK(r.power_integrals[i] == doctest::Approx(t.records[k].power_integrals[i]).epsilon(1e-12));
    CHECK(r.sup_a == doctest::Approx(s.max_abs_a()).epsilon(1e-14));
  }
}

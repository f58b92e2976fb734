// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "mcflow/flow.hpp"
#include "mcflow/surface.hpp"

namespace testing {

/// Adaptive Simpson quadrature, independent of the library's integrators.
double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// Relative difference with an absolute floor.
inline double rel(double a, double b, double floor = 1e-300) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), floor});
}

/// Per-vertex 2 pi - (sum of incident triangle angles), computed from scratch.
std::vector<double> angle_defects(const mcflow::DiscreteHypersurface& mesh);

/// Exact shrinking-sphere records (n = 2, R0 = 1) on a grid whose gaps to
/// T = 1/4 shrink geometrically, for monitor and fit tests.
mcflow::FlowTrajectory synthetic_sphere_records(double ratio = 0.97, double stop_gap = 1e-6);

/// Small cached runs shared by several suites.
const mcflow::FlowTrajectory& short_sphere();         // icosphere level 2, t in [0, 0.05]
const mcflow::FlowTrajectory& singular_sphere();      // icosphere level 2 until singular
const mcflow::FlowTrajectory& singular_bumpy();       // bumpy sphere level 2 until singular
const mcflow::FlowTrajectory& singular_circle();      // 256-gon until singular

}  // namespace testing

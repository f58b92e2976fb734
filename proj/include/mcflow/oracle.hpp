// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/monitors.hpp"

namespace mcflow {

/// Round n-sphere of initial radius r0 shrinking under the flow:
/// R(t)^2 = r0^2 - 2 n t, extinct at T = r0^2 / (2n).
struct SphereSolution {
  int n = 2;
  double r0 = 1.0;

  void validate() const;
  double singular_time() const { return r0 * r0 / (2.0 * n); }
  double radius(double t) const;
  double mean_curvature(double t) const { return n / radius(t); }
  double a_norm(double t) const;
  double measure(double t) const;
  /// The same solution after x -> Q x, t -> Q^2 t.
  SphereSolution rescaled(double factor) const { return {n, factor * r0}; }
};

/// Area of the unit n-sphere (2 pi for n = 1, 4 pi for n = 2).
double unit_sphere_measure(int n);

/// Closed-form value of a monitored functional on the exact solution:
/// the instantaneous integrand at t, or its integral over [0, t]. The
/// subcritical-log cumulative value has no elementary antiderivative and is
/// integrated by adaptive Gauss-Kronrod quadrature. Throws OutOfRange unless
/// 0 <= t < T.
double sphere_functional(const SphereSolution& sphere, double t, const FunctionalSpec& spec, bool cumulative);

struct ErrorStats {
  double max = 0.0;
  double median = 0.0;
  std::size_t samples = 0;
};

struct OracleComparison {
  double horizon = 0.0;  // errors cover t in [0, horizon]
  std::vector<double> time;
  std::vector<double> radius_error;  // NaN where the snapshot was skipped
  std::vector<double> sup_a_error;
  std::vector<double> measure_error;
  ErrorStats radius;
  ErrorStats sup_a;
  ErrorStats measure;
  /// Cumulative functional name -> error statistics.
  std::vector<std::pair<std::string, ErrorStats>> cumulative;

  nlohmann::json summary() const;
};

/// Relative errors against the exact solution on t in [0, 0.8 T]. The radius
/// is the mean vertex distance to the centroid. Throws ShapeMismatch when
/// the initial state is not the oracle's sphere within 1%.
OracleComparison compare(const FlowTrajectory& trajectory, const SphereSolution& sphere);

}  // namespace mcflow

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mcflow/flow.hpp"

namespace mcflow {

enum class RescaleMode { Explicit, Normalizing, UnitTime };

std::string to_string(RescaleMode mode);

struct RescaleSpec {
  RescaleMode mode = RescaleMode::Explicit;
  double factor = 1.0;     // Explicit
  double c0 = 1.0;         // Normalizing
  double unit_time = 0.0;  // UnitTime; zero means the trajectory's final time
};

/// x -> Q x, t -> Q^2 t applied to stored snapshots; every record is
/// re-measured on the scaled geometry. Requires a snapshot for every record.
FlowTrajectory rescale_trajectory(const FlowTrajectory& trajectory, double factor);

/// Q = (1/c0) * integral_0^T integral |A|^(n+3), so the rescaled trajectory
/// carries supercritical mass exactly c0. Throws BelowThreshold when the
/// mass is already below c0.
double normalizing_factor(const FlowTrajectory& trajectory, double c0);

/// Q = T^(-1/2), mapping time T to 1.
double unit_time_factor(double unit_time);

/// Resolves a spec to its factor Q.
double resolve_factor(const FlowTrajectory& trajectory, const RescaleSpec& spec);

struct InvarianceReport {
  double factor = 1.0;
  double tolerance = 1e-10;
  /// Largest relative deviation of sup|A~|(Q^2 t) * Q / sup|A|(t) from 1.
  double sup_a_error = 0.0;
  /// Largest relative deviation of the rescaled time stamps from Q^2 t.
  double time_error = 0.0;
  /// Supercritical cumulative ratio at the end and its deviation from 1/Q.
  double supercritical_ratio = 1.0;
  double supercritical_error = 0.0;
  /// Critical pairs (p, q) checked and the ratio of mixed norms for each.
  std::vector<std::pair<double, double>> critical_pairs;
  std::vector<double> critical_ratios;
  double critical_error = 0.0;
  /// Ratio of the final subcritical-log cumulative values (not invariant).
  double subcritical_log_ratio = 1.0;
  bool pass = false;

  nlohmann::json summary() const;
};

/// Checks the exact scaling laws on the rescaled copy of the trajectory.
InvarianceReport invariance_report(const FlowTrajectory& trajectory, double factor, double tolerance = 1e-10);

/// Empirical bracket for the smallness constant c0: over windows
/// [t0, t0 + L] of the trajectory, viewed at scale Q = L^(-1/2) as flows on
/// [0, 1], S = rescaled supercritical mass and M = rescaled sup|A| on the
/// second half. Any admissible c0 must stay below S for windows with M > 1.
struct SmallnessWindow {
  double start = 0.0;
  double length = 0.0;
  double mass = 0.0;
  double peak = 0.0;
};

struct SmallnessScan {
  std::vector<SmallnessWindow> windows;
  /// Infimum of S over windows with M > 1 (infinity when none violate).
  double c0_upper = 0.0;
  /// Largest S among windows whose conclusion M <= 1 held.
  double c0_largest_satisfied = 0.0;

  nlohmann::json summary() const;
};

SmallnessScan smallness_scan(const FlowTrajectory& trajectory, int lengths = 24, int starts = 8);

}  // namespace mcflow

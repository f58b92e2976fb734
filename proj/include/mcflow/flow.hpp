// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcflow/surface.hpp"

namespace mcflow {

enum class Scheme { SemiImplicit, Explicit };

enum class TerminalStatus { ReachedTEnd, SingularityDetected, StepUnderflow };

std::string to_string(Scheme scheme);
std::string to_string(TerminalStatus status);
Scheme parse_scheme(const std::string& text);
TerminalStatus parse_status(const std::string& text);

struct RemeshPolicy {
  bool enabled = true;
  /// Target edge length as a multiple of the instantaneous minimum radius of
  /// curvature, measured as the high-moment ratio of |A|^9 to |A|^8 integrals
  /// (a noise-robust stand-in for 1/max|A|). The target never grows. Zero
  /// calibrates it from the initial surface so the initial edges sit inside
  /// the split/collapse band.
  double target_fraction = 0.0;
  double split_ratio = 4.0 / 3.0;
  double collapse_ratio = 4.0 / 5.0;
  int relax_iterations = 2;
  std::size_t max_vertices = 200000;
};

struct FlowConfig {
  Scheme scheme = Scheme::SemiImplicit;
  double c_stab = 0.1;
  double dt_max = 2.5e-4;
  double dt_min = 1e-12;
  /// Absolute curvature stop threshold; zero means a_max_factor * initial max|A|.
  double a_max = 0.0;
  double a_max_factor = 1e3;
  double t_end = std::numeric_limits<double>::infinity();
  RemeshPolicy remesh;
  int snapshot_stride = 1;
  /// Exponents p whose spatial integrals of |A|^p are recorded at every state.
  std::vector<double> powers{1, 2, 3, 4, 5, 6, 8};

  void validate() const;
};

/// Spatial quantities measured on one state M_t.
struct StateRecord {
  double time = 0.0;
  /// Step taken from this state to the next; zero on the last record.
  double dt = 0.0;
  std::size_t vertex_count = 0;
  double sup_a = 0.0;
  double sup_h = 0.0;
  double measure = 0.0;
  /// integral of |A|^p for each configured power, same order.
  std::vector<double> power_integrals;
  /// integral of |A|^(n+2) / ln(2 + |A|)
  double log2_integral = 0.0;
  /// integral of |A|^(n+2) / ln(1 + |A|), integrand taken as 0 where A = 0
  double log1_integral = 0.0;
  /// integral of |A|^(n+3)
  double supercritical_integral = 0.0;
  /// integral of |H|^(n+3)
  double h_integral = 0.0;
};

StateRecord measure_state(const DiscreteHypersurface& surface, double time, std::span<const double> powers);

/// Positions of one state; connectivity is shared between snapshots until
/// remeshing changes it.
struct Snapshot {
  std::size_t record = 0;
  double time = 0.0;
  std::vector<Vec3> positions;
  std::shared_ptr<const FaceList> faces;  // empty list for curves

  DiscreteHypersurface surface() const;
};

Snapshot make_snapshot(const DiscreteHypersurface& surface, std::size_t record, double time);

struct RemeshEvent {
  std::size_t record = 0;
  int splits = 0;
  int collapses = 0;
  std::size_t vertices_before = 0;
  std::size_t vertices_after = 0;
  std::vector<double> integrals_before;  // per configured power
  std::vector<double> integrals_after;
  /// Largest relative change of the recorded |A|^p integrals.
  double max_relative_change = 0.0;
};

struct SingularTimeFit {
  double singular_time = 0.0;
  double rate_exponent = 0.0;
  double log_prefactor = 0.0;
  double residual = 0.0;
  std::size_t samples = 0;
};

/// The family M_t sampled on the step grid, with per-state records.
struct FlowTrajectory {
  int dimension = 0;
  FlowConfig config;
  std::vector<double> powers;
  std::vector<StateRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<RemeshEvent> remesh_events;
  TerminalStatus status = TerminalStatus::ReachedTEnd;
  std::string status_detail;
  double a_max_threshold = 0.0;
  double remesh_target_fraction = 0.0;
  std::optional<SingularTimeFit> singular_fit;

  double final_time() const { return records.empty() ? 0.0 : records.back().time; }
  bool has_all_snapshots() const { return !records.empty() && snapshots.size() == records.size(); }
  /// Index into powers of an exponent, if recorded.
  std::optional<std::size_t> power_index(double p) const;
  /// Snapshot of a record, or null when the stride skipped it.
  const Snapshot* snapshot_of(std::size_t record) const;
};

/// One time step of dF/dt = -H nu.
///
/// Semi-implicit: (M + dt C) X_new = M X_old with C and M assembled on the
/// old surface (backward Euler at frozen metric). Explicit: X_new = X_old -
/// dt H nu. Throws SolveFailure if the linear solve misses 1e-10 relative
/// residual, Degenerate if the new surface is.
DiscreteHypersurface step(const DiscreteHypersurface& surface, double dt, Scheme scheme);

/// Runs the flow with dt = min(dt_max, c_stab / max|A|^2) until max|A|
/// crosses the threshold, dt would fall below dt_min, or t_end is reached.
FlowTrajectory run(const DiscreteHypersurface& initial, const FlowConfig& config);

/// Fits log sup|A| = -alpha log(T - t) + beta over the final decade of sup|A|.
/// Requires a SingularityDetected trajectory with at least 10 samples there.
SingularTimeFit estimate_singular_time(const FlowTrajectory& trajectory);

}  // namespace mcflow

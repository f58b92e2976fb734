// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflow/flow.hpp"

namespace mcflow {

enum class FunctionalKind { MixedNorm, SubcriticalLog, Supercritical, SupA };

/// Which logarithm weakens the subcritical integrand: ln(2 + |A|) (default)
/// or ln(1 + |A|).
enum class LogVariant { TwoPlus, OnePlus };

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::SupA;
  double p = 0.0;
  double q = 0.0;
  LogVariant log = LogVariant::TwoPlus;

  static FunctionalSpec mixed(double p, double q);
  static FunctionalSpec subcritical_log(LogVariant variant = LogVariant::TwoPlus);
  static FunctionalSpec supercritical();
  static FunctionalSpec sup_a();

  /// Accepts "mixed:P,Q", "sublog", "sublog1", "super", "supA".
  static FunctionalSpec parse(const std::string& text);
  std::string name() const;
  void validate() const;
};

enum class Criticality { Subcritical, Critical, Supercritical };

std::string to_string(Criticality c);

/// Critical iff n/p + 2/q = 1 within 1e-12; Supercritical below, Subcritical above.
Criticality criticality(int n, double p, double q);

/// Growth of a cumulative monitor I near the singular time. With
/// s = ln(1/(T - t)), the fit is ln(dI/ds) = -decay * s + intercept over the
/// final decade of sup|A|; the integral to T is finite iff decay > 0, and the
/// monitor is classified divergent when decay < threshold.
struct DivergenceFit {
  bool divergent = false;
  double decay = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  double threshold = 0.5;
  double singular_time = 0.0;
  std::size_t samples = 0;
};

struct MonitorReport {
  FunctionalSpec spec;
  int dimension = 0;
  std::vector<double> time;
  std::vector<double> instantaneous;
  /// Left-endpoint time integral of the instantaneous series.
  std::vector<double> cumulative;
  std::optional<DivergenceFit> divergence;

  double final_cumulative() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  /// Cumulative value at the last record with time <= t.
  double cumulative_at(double t) const;
  std::string csv() const;
  nlohmann::json summary() const;
};

/// Spatial integral of |A|^p at record k: read from the record when p was
/// recorded, else recomputed from the snapshot. Throws MissingMonitors.
double spatial_power_integral(const FlowTrajectory& trajectory, std::size_t k, double p);

/// Evaluates a functional on every record. The divergence fit is attached
/// when the trajectory ended at a detected singularity.
MonitorReport monitor(const FlowTrajectory& trajectory, const FunctionalSpec& spec, double slope_threshold = 0.5);

/// (sum_t (integral |A|^p)^(q/p) dt)^(1/q) with left-endpoint quadrature.
double mixed_norm(const FlowTrajectory& trajectory, double p, double q);
MonitorReport subcritical_log(const FlowTrajectory& trajectory, LogVariant variant = LogVariant::TwoPlus);
MonitorReport supercritical(const FlowTrajectory& trajectory);

/// Fits the growth model above; throws InsufficientData when the
/// trajectory did not end singular or the window is too short.
DivergenceFit fit_divergence(const FlowTrajectory& trajectory, const std::vector<double>& cumulative,
                             double threshold = 0.5);

struct KeyboundReport {
  double lambda = 0.0;
  double c_lambda = 0.0;
  std::vector<double> time;
  /// sup|A|(t) / (1 + integral_0^t integral |A|^(n+3))
  std::vector<double> ratio;
  double max_ratio = 0.0;
  bool exceeds = false;

  nlohmann::json summary() const;
};

/// c_lambda = lambda^(-1/2) (1 + 1/c0).
double default_c_lambda(double lambda, double c0 = 1.0);

/// Ratio series for t in [lambda, end]. Throws TrajectoryTooShort when the
/// trajectory ends before lambda, InvalidArgument unless 0 < lambda <= 1.
KeyboundReport keybound_check(const FlowTrajectory& trajectory, double lambda, double c_lambda);

}  // namespace mcflow

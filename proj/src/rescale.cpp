// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcflow/error.hpp"
#include "mcflow/monitors.hpp"
#include "mcflow/parallel.hpp"

namespace mcflow {

std::string to_string(RescaleMode mode) {
  switch (mode) {
    case RescaleMode::Explicit: return "explicit";
    case RescaleMode::Normalizing: return "normalize";
    case RescaleMode::UnitTime: return "unit-time";
  }
  return "unknown";
}

FlowTrajectory rescale_trajectory(const FlowTrajectory& t, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) raise(ErrorKind::InvalidArgument, "rescale factor must be positive");
  if (!t.has_all_snapshots()) raise(ErrorKind::InsufficientData, "rescaling needs a snapshot for every record");
  const double q2 = q * q;

  FlowTrajectory out;
  out.dimension = t.dimension;
  out.config = t.config;
  out.config.dt_max *= q2;
  out.config.dt_min *= q2;
  out.config.t_end *= q2;
  out.config.a_max /= q;
  out.powers = t.powers;
  out.status = t.status;
  out.status_detail = t.status_detail;
  out.a_max_threshold = t.a_max_threshold / q;
  out.remesh_target_fraction = t.remesh_target_fraction;

  const std::size_t count = t.records.size();
  out.records.resize(count);
  out.snapshots.resize(count);
  // Connectivity is validated once per distinct face list.
  std::vector<std::size_t> base_of(count);
  std::vector<DiscreteHypersurface> bases;
  for (std::size_t k = 0; k < count; ++k) {
    if (k == 0 || t.snapshots[k].faces != t.snapshots[k - 1].faces ||
        t.snapshots[k].positions.size() != bases.back().vertex_count())
      bases.push_back(t.snapshots[k].surface());
    base_of[k] = bases.size() - 1;
  }
  parallel_for(count, [&](std::size_t k) {
    const Snapshot& s = t.snapshots[k];
    std::vector<Vec3> positions = s.positions;
    for (Vec3& p : positions) p *= q;
    const DiscreteHypersurface scaled = bases[base_of[k]].with_positions(positions);
    StateRecord r = measure_state(scaled, q2 * t.records[k].time, t.powers);
    r.dt = q2 * t.records[k].dt;
    out.records[k] = std::move(r);
    out.snapshots[k] = Snapshot{s.record, q2 * s.time, std::move(positions), s.faces};
  });

  const int n = t.dimension;
  for (RemeshEvent e : t.remesh_events) {
    for (std::size_t i = 0; i < t.powers.size(); ++i) {
      const double scale = std::pow(q, n - t.powers[i]);
      e.integrals_before[i] *= scale;
      e.integrals_after[i] *= scale;
    }
    out.remesh_events.push_back(std::move(e));
  }
  if (t.singular_fit) {
    SingularTimeFit f = *t.singular_fit;
    f.singular_time *= q2;
    f.log_prefactor += (2.0 * f.rate_exponent - 1.0) * std::log(q);
    out.singular_fit = f;
  }
  return out;
}

double normalizing_factor(const FlowTrajectory& t, double c0) {
  if (!(c0 > 0.0)) raise(ErrorKind::InvalidArgument, "c0 must be positive");
  const double mass = supercritical(t).final_cumulative();
  if (mass < c0) raise(ErrorKind::BelowThreshold, "supercritical mass is below c0; no normalization needed");
  return mass / c0;
}

double unit_time_factor(double unit_time) {
  if (!(unit_time > 0.0)) raise(ErrorKind::InvalidArgument, "unit time must be positive");
  return 1.0 / std::sqrt(unit_time);
}

double resolve_factor(const FlowTrajectory& t, const RescaleSpec& spec) {
  switch (spec.mode) {
    case RescaleMode::Explicit: return spec.factor;
    case RescaleMode::Normalizing: return normalizing_factor(t, spec.c0);
    case RescaleMode::UnitTime: return unit_time_factor(spec.unit_time > 0.0 ? spec.unit_time : t.final_time());
  }
  return 1.0;
}

nlohmann::json InvarianceReport::summary() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < critical_pairs.size(); ++i)
    pairs.push_back({{"p", critical_pairs[i].first}, {"q", critical_pairs[i].second}, {"ratio", critical_ratios[i]}});
  return {{"factor", factor},
          {"tolerance", tolerance},
          {"sup_a_error", sup_a_error},
          {"time_error", time_error},
          {"supercritical_ratio", supercritical_ratio},
          {"supercritical_error", supercritical_error},
          {"critical", pairs},
          {"critical_error", critical_error},
          {"subcritical_log_ratio", subcritical_log_ratio},
          {"pass", pass}};
}

namespace {

double rel(double value, double expected) {
  if (expected == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::fabs(value / expected - 1.0);
}

}  // namespace

InvarianceReport invariance_report(const FlowTrajectory& t, double q, double tolerance) {
  const FlowTrajectory s = rescale_trajectory(t, q);
  InvarianceReport r;
  r.factor = q;
  r.tolerance = tolerance;
  for (std::size_t k = 0; k < t.records.size(); ++k) {
    r.sup_a_error = std::max(r.sup_a_error, rel(s.records[k].sup_a, t.records[k].sup_a / q));
    r.time_error = std::max(r.time_error, rel(s.records[k].time, q * q * t.records[k].time));
  }

  const double mass = supercritical(t).final_cumulative();
  const double mass_scaled = supercritical(s).final_cumulative();
  if (mass > 0.0) {
    r.supercritical_ratio = mass_scaled / mass;
    r.supercritical_error = rel(r.supercritical_ratio, 1.0 / q);
  }

  const int n = t.dimension;
  for (double p : t.powers) {
    if (!(p > n)) continue;
    const double qq = 2.0 / (1.0 - n / p);
    const double a = mixed_norm(t, p, qq);
    const double b = mixed_norm(s, p, qq);
    const double ratio = a > 0.0 ? b / a : 1.0;
    r.critical_pairs.emplace_back(p, qq);
    r.critical_ratios.push_back(ratio);
    r.critical_error = std::max(r.critical_error, rel(ratio, 1.0));
  }

  const double g = subcritical_log(t).final_cumulative();
  r.subcritical_log_ratio = g > 0.0 ? subcritical_log(s).final_cumulative() / g : 1.0;
  r.pass = r.sup_a_error <= tolerance && r.time_error <= tolerance && r.supercritical_error <= tolerance &&
           r.critical_error <= tolerance;
  return r;
}

nlohmann::json SmallnessScan::summary() const {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& x : windows)
    w.push_back({{"start", x.start}, {"length", x.length}, {"mass", x.mass}, {"peak", x.peak}});
  return {{"c0_upper", std::isfinite(c0_upper) ? nlohmann::json(c0_upper) : nlohmann::json(nullptr)},
          {"c0_largest_satisfied", c0_largest_satisfied},
          {"windows", w}};
}

SmallnessScan smallness_scan(const FlowTrajectory& t, int lengths, int starts) {
  if (t.records.size() < 2) raise(ErrorKind::InsufficientData, "trajectory too short for a window scan");
  if (lengths < 1 || starts < 1) raise(ErrorKind::InvalidArgument, "scan sizes must be positive");
  const MonitorReport mass = supercritical(t);
  const double end = t.final_time();
  auto cumulative = [&](double time) {
    // Piecewise-linear in time between records (exact for the left-endpoint rule).
    const auto& tt = mass.time;
    auto it = std::upper_bound(tt.begin(), tt.end(), time);
    if (it == tt.begin()) return 0.0;
    const std::size_t k = static_cast<std::size_t>(it - tt.begin()) - 1;
    return mass.cumulative[k] + mass.instantaneous[k] * std::min(time - tt[k], t.records[k].dt);
  };

  SmallnessScan scan;
  scan.c0_upper = std::numeric_limits<double>::infinity();
  const double shortest = std::max(end * 1e-4, 4.0 * t.records.front().dt);
  for (int i = 0; i < lengths; ++i) {
    const double length =
        lengths == 1 ? end : shortest * std::pow(end / shortest, static_cast<double>(i) / (lengths - 1));
    for (int j = 0; j < starts; ++j) {
      const double start = starts == 1 ? end - length : (end - length) * j / (starts - 1);
      SmallnessWindow w;
      w.start = start;
      w.length = length;
      const double root = std::sqrt(length);
      w.mass = root * (cumulative(start + length) - cumulative(start));
      for (const StateRecord& r : t.records)
        if (r.time >= start + 0.5 * length && r.time <= start + length) w.peak = std::max(w.peak, r.sup_a * root);
      if (w.peak > 1.0) scan.c0_upper = std::min(scan.c0_upper, w.mass);
      else scan.c0_largest_satisfied = std::max(scan.c0_largest_satisfied, w.mass);
      scan.windows.push_back(w);
    }
  }
  return scan;
}

}  // namespace mcflow

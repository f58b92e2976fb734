// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mcflow/error.hpp"

namespace mcflow {

FunctionalSpec FunctionalSpec::mixed(double p, double q) {
  FunctionalSpec s;
  s.kind = FunctionalKind::MixedNorm;
  s.p = p;
  s.q = q;
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::subcritical_log(LogVariant variant) {
  FunctionalSpec s;
  s.kind = FunctionalKind::SubcriticalLog;
  s.log = variant;
  return s;
}

FunctionalSpec FunctionalSpec::supercritical() {
  FunctionalSpec s;
  s.kind = FunctionalKind::Supercritical;
  return s;
}

FunctionalSpec FunctionalSpec::sup_a() { return FunctionalSpec{}; }

FunctionalSpec FunctionalSpec::parse(const std::string& text) {
  if (text == "sublog") return subcritical_log(LogVariant::TwoPlus);
  if (text == "sublog1") return subcritical_log(LogVariant::OnePlus);
  if (text == "super") return supercritical();
  if (text == "supA") return sup_a();
  if (text.rfind("mixed:", 0) == 0) {
    std::istringstream in(text.substr(6));
    double p = 0.0, q = 0.0;
    char comma = 0;
    if (in >> p >> comma >> q && comma == ',' && in.peek() == EOF) return mixed(p, q);
  }
  raise(ErrorKind::InvalidArgument, "unknown functional '" + text + "'");
}

std::string FunctionalSpec::name() const {
  switch (kind) {
    case FunctionalKind::MixedNorm: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "mixed:%g,%g", p, q);
      return buf;
    }
    case FunctionalKind::SubcriticalLog: return log == LogVariant::TwoPlus ? "sublog" : "sublog1";
    case FunctionalKind::Supercritical: return "super";
    case FunctionalKind::SupA: return "supA";
  }
  return "unknown";
}

void FunctionalSpec::validate() const {
  if (kind == FunctionalKind::MixedNorm && !(p > 0.0 && q > 0.0 && std::isfinite(p) && std::isfinite(q)))
    raise(ErrorKind::InvalidArgument, "mixed norm exponents must be positive and finite");
}

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::Subcritical: return "Subcritical";
    case Criticality::Critical: return "Critical";
    case Criticality::Supercritical: return "Supercritical";
  }
  return "Unknown";
}

Criticality criticality(int n, double p, double q) {
  if (!(p > 0.0 && q > 0.0)) raise(ErrorKind::InvalidArgument, "p and q must be positive");
  const double s = n / p + 2.0 / q;
  if (std::fabs(s - 1.0) <= 1e-12) return Criticality::Critical;
  return s < 1.0 ? Criticality::Supercritical : Criticality::Subcritical;
}

double MonitorReport::cumulative_at(double t) const {
  auto it = std::upper_bound(time.begin(), time.end(), t);
  if (it == time.begin()) return 0.0;
  return cumulative[static_cast<std::size_t>(it - time.begin()) - 1];
}

std::string MonitorReport::csv() const {
  std::string out = "t,instantaneous,cumulative\n";
  char buf[128];
  for (std::size_t k = 0; k < time.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", time[k], instantaneous[k], cumulative[k]);
    out += buf;
  }
  return out;
}

nlohmann::json MonitorReport::summary() const {
  nlohmann::json j;
  j["functional"] = spec.name();
  j["dimension"] = dimension;
  j["samples"] = time.size();
  j["final_time"] = time.empty() ? 0.0 : time.back();
  j["final_instantaneous"] = instantaneous.empty() ? 0.0 : instantaneous.back();
  j["final_cumulative"] = final_cumulative();
  if (spec.kind == FunctionalKind::MixedNorm) {
    j["p"] = spec.p;
    j["q"] = spec.q;
    j["criticality"] = to_string(criticality(dimension, spec.p, spec.q));
    j["mixed_norm"] = std::pow(final_cumulative(), 1.0 / spec.q);
  }
  if (divergence) {
    j["divergence"] = {{"divergent", divergence->divergent},   {"decay", divergence->decay},
                       {"intercept", divergence->intercept},   {"residual", divergence->residual},
                       {"threshold", divergence->threshold},   {"singular_time", divergence->singular_time},
                       {"samples", divergence->samples}};
  } else {
    j["divergence"] = nullptr;
  }
  return j;
}

double spatial_power_integral(const FlowTrajectory& trajectory, std::size_t k, double p) {
  const StateRecord& r = trajectory.records.at(k);
  if (auto i = trajectory.power_index(p)) return r.power_integrals.at(*i);
  if (p == trajectory.dimension + 3) return r.supercritical_integral;
  const Snapshot* snap = trajectory.snapshot_of(k);
  if (!snap) raise(ErrorKind::MissingMonitors, "power " + std::to_string(p) + " not recorded and snapshot missing");
  const DiscreteHypersurface s = snap->surface();
  return integrate(s, s.a_norm(), p);
}

namespace {

double instantaneous_value(const FlowTrajectory& trajectory, std::size_t k, const FunctionalSpec& spec) {
  const StateRecord& r = trajectory.records[k];
  switch (spec.kind) {
    case FunctionalKind::MixedNorm:
      return std::pow(spatial_power_integral(trajectory, k, spec.p), spec.q / spec.p);
    case FunctionalKind::SubcriticalLog:
      return spec.log == LogVariant::TwoPlus ? r.log2_integral : r.log1_integral;
    case FunctionalKind::Supercritical: return r.supercritical_integral;
    case FunctionalKind::SupA: return r.sup_a;
  }
  return 0.0;
}

std::size_t final_decade_start(const std::vector<StateRecord>& records) {
  const double last = records.back().sup_a;
  std::size_t first = records.size() - 1;
  while (first > 0 && records[first - 1].sup_a >= last / 10.0) --first;
  return first;
}

}  // namespace

DivergenceFit fit_divergence(const FlowTrajectory& trajectory, const std::vector<double>& cumulative,
                             double threshold) {
  if (cumulative.size() != trajectory.records.size())
    raise(ErrorKind::FieldMismatch, "cumulative series does not match the trajectory");
  const SingularTimeFit st =
      trajectory.singular_fit ? *trajectory.singular_fit : estimate_singular_time(trajectory);
  const auto& rec = trajectory.records;
  const std::size_t first = final_decade_start(rec);
  std::vector<double> xs, ys;
  for (std::size_t k = first; k + 1 < rec.size(); ++k) {
    const double di = cumulative[k + 1] - cumulative[k];
    const double s0 = -std::log(st.singular_time - rec[k].time);
    const double s1 = -std::log(st.singular_time - rec[k + 1].time);
    if (!(di > 0.0) || !(s1 > s0)) continue;
    xs.push_back(0.5 * (s0 + s1));
    ys.push_back(std::log(di / (s1 - s0)));
  }
  if (xs.size() < 5) raise(ErrorKind::InsufficientData, "too few increments in the final decade");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) raise(ErrorKind::InsufficientData, "degenerate fit window");
  DivergenceFit f;
  const double slope = sxy / sxx;
  f.decay = -slope;
  f.intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (slope * xs[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.threshold = threshold;
  f.singular_time = st.singular_time;
  f.samples = xs.size();
  f.divergent = f.decay < threshold;
  return f;
}

MonitorReport monitor(const FlowTrajectory& trajectory, const FunctionalSpec& spec, double slope_threshold) {
  spec.validate();
  MonitorReport m;
  m.spec = spec;
  m.dimension = trajectory.dimension;
  const std::size_t count = trajectory.records.size();
  m.time.resize(count);
  m.instantaneous.resize(count);
  m.cumulative.resize(count);
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    m.time[k] = trajectory.records[k].time;
    m.instantaneous[k] = instantaneous_value(trajectory, k, spec);
    m.cumulative[k] = acc;
    acc += m.instantaneous[k] * trajectory.records[k].dt;
  }
  if (trajectory.status == TerminalStatus::SingularityDetected) {
    try {
      m.divergence = fit_divergence(trajectory, m.cumulative, slope_threshold);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientData) throw;
    }
  }
  return m;
}

double mixed_norm(const FlowTrajectory& trajectory, double p, double q) {
  if (trajectory.records.empty()) raise(ErrorKind::InsufficientData, "empty trajectory");
  const auto spec = FunctionalSpec::mixed(p, q);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < trajectory.records.size(); ++k)
    acc += instantaneous_value(trajectory, k, spec) * trajectory.records[k].dt;
  return std::pow(acc, 1.0 / q);
}

MonitorReport subcritical_log(const FlowTrajectory& trajectory, LogVariant variant) {
  return monitor(trajectory, FunctionalSpec::subcritical_log(variant));
}

MonitorReport supercritical(const FlowTrajectory& trajectory) {
  return monitor(trajectory, FunctionalSpec::supercritical());
}

nlohmann::json KeyboundReport::summary() const {
  return {{"lambda", lambda},   {"c_lambda", c_lambda}, {"max_ratio", max_ratio},
          {"exceeds", exceeds}, {"samples", time.size()}};
}

double default_c_lambda(double lambda, double c0) {
  if (!(lambda > 0.0) || !(c0 > 0.0)) raise(ErrorKind::InvalidArgument, "lambda and c0 must be positive");
  return (1.0 + 1.0 / c0) / std::sqrt(lambda);
}

KeyboundReport keybound_check(const FlowTrajectory& trajectory, double lambda, double c_lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) raise(ErrorKind::InvalidArgument, "lambda must lie in (0, 1]");
  if (trajectory.records.empty() || trajectory.final_time() < lambda)
    raise(ErrorKind::TrajectoryTooShort, "trajectory ends before lambda");
  KeyboundReport r;
  r.lambda = lambda;
  r.c_lambda = c_lambda;
  double acc = 0.0;
  for (const StateRecord& rec : trajectory.records) {
    if (rec.time >= lambda) {
      const double ratio = rec.sup_a / (1.0 + acc);
      r.time.push_back(rec.time);
      r.ratio.push_back(ratio);
      r.max_ratio = std::max(r.max_ratio, ratio);
    }
    acc += rec.supercritical_integral * rec.dt;
  }
  r.exceeds = r.max_ratio > c_lambda;
  return r;
}

}  // namespace mcflow

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/flow.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcflow/error.hpp"
#include "mcflow/kernels.hpp"
#include "mcflow/remesh.hpp"

namespace mcflow {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::SemiImplicit ? "semi-implicit" : "explicit";
}

std::string to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::ReachedTEnd: return "ReachedTEnd";
    case TerminalStatus::SingularityDetected: return "SingularityDetected";
    case TerminalStatus::StepUnderflow: return "StepUnderflow";
  }
  return "Unknown";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "semi-implicit") return Scheme::SemiImplicit;
  if (text == "explicit") return Scheme::Explicit;
  raise(ErrorKind::InvalidArgument, "unknown scheme '" + text + "'");
}

TerminalStatus parse_status(const std::string& text) {
  if (text == "ReachedTEnd") return TerminalStatus::ReachedTEnd;
  if (text == "SingularityDetected") return TerminalStatus::SingularityDetected;
  if (text == "StepUnderflow") return TerminalStatus::StepUnderflow;
  raise(ErrorKind::InvalidArgument, "unknown status '" + text + "'");
}

void FlowConfig::validate() const {
  if (!(c_stab > 0.0)) raise(ErrorKind::InvalidArgument, "c_stab must be positive");
  if (!(dt_min > 0.0) || !(dt_max > dt_min)) raise(ErrorKind::InvalidArgument, "need 0 < dt_min < dt_max");
  if (a_max < 0.0 || !(a_max_factor > 0.0)) raise(ErrorKind::InvalidArgument, "curvature thresholds must be positive");
  if (!(t_end >= 0.0)) raise(ErrorKind::InvalidArgument, "t_end must be nonnegative");
  if (snapshot_stride < 1) raise(ErrorKind::InvalidArgument, "snapshot stride must be at least 1");
  if (remesh.target_fraction < 0.0 || !(remesh.split_ratio > 1.0) || !(remesh.collapse_ratio > 0.0) ||
      !(remesh.collapse_ratio < 1.0))
    raise(ErrorKind::InvalidArgument, "invalid remesh policy");
  for (double p : powers)
    if (!(p > 0.0)) raise(ErrorKind::InvalidArgument, "recorded powers must be positive");
}

std::optional<std::size_t> FlowTrajectory::power_index(double p) const {
  for (std::size_t i = 0; i < powers.size(); ++i)
    if (powers[i] == p) return i;
  return std::nullopt;
}

const Snapshot* FlowTrajectory::snapshot_of(std::size_t record) const {
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), record,
                             [](const Snapshot& s, std::size_t r) { return s.record < r; });
  if (it == snapshots.end() || it->record != record) return nullptr;
  return &*it;
}

StateRecord measure_state(const DiscreteHypersurface& surface, double time, std::span<const double> powers) {
  StateRecord r;
  r.time = time;
  r.vertex_count = surface.vertex_count();
  r.sup_a = surface.max_abs_a();
  r.sup_h = surface.max_abs_h();
  r.measure = surface.total_measure();
  const auto a = surface.a_norm();
  const auto w = surface.dual_area();
  r.power_integrals.reserve(powers.size());
  for (double p : powers) r.power_integrals.push_back(kernels::weighted_real_power_sum(a, w, p));
  const int n = surface.dimension();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    double num = std::pow(a[i], n + 2) * w[i];
    r.log2_integral += num / std::log(2.0 + a[i]);
    r.log1_integral += num / std::log1p(a[i]);
  }
  r.supercritical_integral = kernels::weighted_power_sum(a, w, n + 3);
  r.h_integral = kernels::weighted_power_sum(surface.mean_curvature(), w, n + 3);
  return r;
}

DiscreteHypersurface Snapshot::surface() const {
  if (!faces || faces->empty()) return DiscreteHypersurface::curve(positions);
  return DiscreteHypersurface::mesh(positions, *faces);
}

Snapshot make_snapshot(const DiscreteHypersurface& surface, std::size_t record, double time) {
  return Snapshot{record, time, surface.positions(), surface.shared_faces()};
}

DiscreteHypersurface step(const DiscreteHypersurface& surface, double dt, Scheme scheme) {
  if (!(dt > 0.0)) raise(ErrorKind::InvalidArgument, "time step must be positive");
  const auto n = static_cast<Eigen::Index>(surface.vertex_count());
  Eigen::MatrixX3d x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = surface.positions()[i].transpose();

  Eigen::MatrixX3d next(n, 3);
  if (scheme == Scheme::Explicit) {
    Eigen::MatrixX3d hn(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) hn.row(i) = surface.mean_curvature_vectors()[i].transpose();
    next = x;
    kernels::axpy(-dt, std::span<const double>(hn.data(), hn.size()), std::span<double>(next.data(), next.size()));
  } else {
    Eigen::Map<const Eigen::VectorXd> w(surface.dual_area().data(), n);
    Eigen::SparseMatrix<double> system = dt * surface.stiffness_matrix();
    for (Eigen::Index i = 0; i < n; ++i) system.coeffRef(i, i) += w[i];
    Eigen::MatrixX3d rhs(n, 3);
    for (int c = 0; c < 3; ++c)
      kernels::multiply(std::span<const double>(x.col(c).data(), n), surface.dual_area(),
                        std::span<double>(rhs.col(c).data(), n));
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(system);
    if (solver.info() != Eigen::Success) raise(ErrorKind::SolveFailure, "factorization failed");
    next = solver.solve(rhs);
    if (solver.info() != Eigen::Success) raise(ErrorKind::SolveFailure, "back substitution failed");
    double residual = (system * next - rhs).norm();
    double scale = rhs.norm();
    if (!(residual <= 1e-10 * scale))
      raise(ErrorKind::SolveFailure, "relative residual " + std::to_string(residual / scale));
  }
  std::vector<Vec3> positions(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) positions[i] = next.row(i).transpose();
  if (surface.dimension() == 1)
    for (auto& p : positions) p.z() = 0.0;
  return surface.with_positions(std::move(positions));
}

namespace {

double relative_change(double before, double after) {
  double scale = std::max(std::fabs(before), std::fabs(after));
  return scale > 0.0 ? std::fabs(after - before) / scale : 0.0;
}

// High-moment curvature scale (integral |A|^9 / integral |A|^8). Tracks
// max|A| on concentrating regions without following single-vertex noise.
double sizing_curvature(const DiscreteHypersurface& surface) {
  const auto a = surface.a_norm();
  const auto w = surface.dual_area();
  double num = kernels::weighted_power_sum(a, w, 9);
  double den = kernels::weighted_power_sum(a, w, 8);
  return den > 0.0 ? num / den : surface.max_abs_a();
}

}  // namespace

FlowTrajectory run(const DiscreteHypersurface& initial, const FlowConfig& config) {
  config.validate();
  FlowTrajectory traj;
  traj.dimension = initial.dimension();
  traj.config = config;
  traj.powers = config.powers;

  DiscreteHypersurface surface = initial;
  double t = 0.0;
  traj.records.push_back(measure_state(surface, t, traj.powers));
  traj.snapshots.push_back(make_snapshot(surface, 0, t));

  const double a0 = surface.max_abs_a();
  traj.a_max_threshold = config.a_max > 0.0 ? config.a_max : config.a_max_factor * a0;

  RemeshParams remesh_params;
  remesh_params.split_ratio = config.remesh.split_ratio;
  remesh_params.collapse_ratio = config.remesh.collapse_ratio;
  remesh_params.relax_iterations = config.remesh.relax_iterations;
  remesh_params.max_vertices = config.remesh.max_vertices;
  double fraction = config.remesh.target_fraction;
  if (config.remesh.enabled && fraction <= 0.0) {
    auto edges = initial.edge_lengths();
    auto [lo, hi] = std::minmax_element(edges.begin(), edges.end());
    fraction = std::sqrt(*lo * *hi) * sizing_curvature(initial);
  }
  traj.remesh_target_fraction = config.remesh.enabled ? fraction : 0.0;

  for (;;) {
    const double a = surface.max_abs_a();
    if (a >= traj.a_max_threshold) {
      traj.status = TerminalStatus::SingularityDetected;
      traj.status_detail = "max|A| crossed threshold";
      break;
    }
    if (t >= config.t_end) {
      traj.status = TerminalStatus::ReachedTEnd;
      break;
    }
    const double dt_curvature = config.c_stab / (a * a);
    if (dt_curvature < config.dt_min) {
      traj.status = TerminalStatus::SingularityDetected;
      traj.status_detail = "curvature step fell below dt_min";
      break;
    }
    double dt = std::min(config.dt_max, dt_curvature);
    double t_next = t + dt;
    if (t_next >= config.t_end) {
      dt = config.t_end - t;
      t_next = config.t_end;
    }
    try {
      surface = step(surface, dt, config.scheme);
    } catch (const Error& e) {
      traj.status = TerminalStatus::StepUnderflow;
      traj.status_detail = e.what();
      break;
    }
    traj.records.back().dt = t_next - t;
    t = t_next;
    const std::size_t index = traj.records.size();

    if (config.remesh.enabled) {
      // The target only shrinks, so split/collapse cannot oscillate.
      const double target = fraction / sizing_curvature(surface);
      remesh_params.target_edge =
          remesh_params.target_edge > 0.0 ? std::min(remesh_params.target_edge, target) : target;
      if (needs_remesh(surface, remesh_params)) {
        try {
          RemeshResult r = remesh(surface, remesh_params);
          if (r.splits + r.collapses > 0) {
            RemeshEvent ev;
            ev.record = index;
            ev.splits = r.splits;
            ev.collapses = r.collapses;
            ev.vertices_before = surface.vertex_count();
            ev.vertices_after = r.surface.vertex_count();
            const auto before = measure_state(surface, t, traj.powers);
            const auto after = measure_state(r.surface, t, traj.powers);
            ev.integrals_before = before.power_integrals;
            ev.integrals_after = after.power_integrals;
            for (std::size_t k = 0; k < traj.powers.size(); ++k)
              ev.max_relative_change = std::max(
                  ev.max_relative_change, relative_change(ev.integrals_before[k], ev.integrals_after[k]));
            traj.remesh_events.push_back(std::move(ev));
            surface = std::move(r.surface);
          }
        } catch (const Error&) {
          // Keep the unremeshed surface; the next step retries.
        }
      }
    }

    traj.records.push_back(measure_state(surface, t, traj.powers));
    if (index % static_cast<std::size_t>(config.snapshot_stride) == 0)
      traj.snapshots.push_back(make_snapshot(surface, index, t));
  }
  const std::size_t last = traj.records.size() - 1;
  if (traj.snapshots.back().record != last) traj.snapshots.push_back(make_snapshot(surface, last, t));
  return traj;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

SingularTimeFit estimate_singular_time(const FlowTrajectory& trajectory) {
  if (trajectory.status != TerminalStatus::SingularityDetected)
    raise(ErrorKind::InsufficientData, "trajectory did not end at a detected singularity");
  const auto& rec = trajectory.records;
  if (rec.size() < 2) raise(ErrorKind::InsufficientData, "too few records");
  const double last = rec.back().sup_a;
  std::size_t first = rec.size() - 1;
  while (first > 0 && rec[first - 1].sup_a >= last / 10.0) --first;
  const std::size_t count = rec.size() - first;
  if (count < 10) raise(ErrorKind::InsufficientData, "fewer than 10 samples in the final decade of sup|A|");

  std::vector<double> t(count), y(count), x(count);
  for (std::size_t k = 0; k < count; ++k) {
    t[k] = rec[first + k].time;
    y[k] = std::log(rec[first + k].sup_a);
  }
  const double t_last = t.back();
  const double span = t_last - t.front();
  if (!(span > 0.0)) raise(ErrorKind::InsufficientData, "final decade has zero duration");

  // For fixed T the model is linear in (alpha, beta); search T on a log grid
  // of offsets past the last sample, then refine by golden section.
  auto objective = [&](double log_offset) {
    const double singular = t_last + std::exp(log_offset);
    for (std::size_t k = 0; k < count; ++k) x[k] = std::log(singular - t[k]);
    return fit_line(x, y);
  };
  const double lo = std::log(1e-10 * span);
  const double hi = std::log(10.0 * span);
  const int grid = 400;
  int best = 0;
  double best_rms = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= grid; ++g) {
    double u = lo + (hi - lo) * g / grid;
    double rms = objective(u).rms;
    if (rms < best_rms) {
      best_rms = rms;
      best = g;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / grid;
  double b = lo + (hi - lo) * std::min(best + 1, grid) / grid;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = objective(c).rms;
  double fd = objective(d).rms;
  for (int it = 0; it < 100; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = objective(c).rms;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = objective(d).rms;
    }
  }
  const double u = 0.5 * (a + b);
  LineFit f = objective(u);
  SingularTimeFit out;
  out.singular_time = t_last + std::exp(u);
  out.rate_exponent = -f.slope;
  out.log_prefactor = f.intercept;
  out.residual = f.rms;
  out.samples = count;
  return out;
}

}  // namespace mcflow

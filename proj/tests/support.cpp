// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>

#include "mcflow/mesh_gen.hpp"

namespace testing {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

std::vector<double> angle_defects(const mcflow::DiscreteHypersurface& mesh) {
  std::vector<double> d(mesh.vertex_count(), 2.0 * std::numbers::pi);
  const auto& x = mesh.positions();
  for (const auto& f : mesh.faces())
    for (int k = 0; k < 3; ++k) {
      const auto& p = x[f[k]];
      const mcflow::Vec3 u = x[f[(k + 1) % 3]] - p;
      const mcflow::Vec3 v = x[f[(k + 2) % 3]] - p;
      d[f[k]] -= std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
    }
  return d;
}

mcflow::FlowTrajectory synthetic_sphere_records(double ratio, double stop_gap) {
  using std::numbers::pi;
  mcflow::FlowTrajectory t;
  t.dimension = 2;
  t.powers = {1, 2, 3, 4, 5, 6, 8};
  t.status = mcflow::TerminalStatus::SingularityDetected;
  std::vector<double> times;
  for (double gap = 0.25; gap > stop_gap; gap *= ratio) times.push_back(0.25 - gap);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double r2 = 1.0 - 4.0 * times[k];
    const double r = std::sqrt(r2);
    const double a = std::sqrt(2.0) / r;
    const double area = 4.0 * pi * r2;
    mcflow::StateRecord rec;
    rec.time = times[k];
    rec.dt = k + 1 < times.size() ? times[k + 1] - times[k] : times[k] - times[k - 1];
    rec.vertex_count = 0;
    rec.sup_a = a;
    rec.sup_h = 2.0 / r;
    rec.measure = area;
    for (double p : t.powers) rec.power_integrals.push_back(std::pow(a, p) * area);
    rec.log2_integral = std::pow(a, 4) / std::log(2.0 + a) * area;
    rec.log1_integral = std::pow(a, 4) / std::log(1.0 + a) * area;
    rec.supercritical_integral = std::pow(a, 5) * area;
    rec.h_integral = std::pow(2.0 / r, 5) * area;
    t.records.push_back(rec);
  }
  t.singular_fit = mcflow::SingularTimeFit{0.25, 0.5, -0.5 * std::log(2.0), 0.0, times.size()};
  return t;
}

const mcflow::FlowTrajectory& short_sphere() {
  static const mcflow::FlowTrajectory t = [] {
    mcflow::FlowConfig c;
    c.t_end = 0.05;
    return mcflow::run(mcflow::make_icosphere(2), c);
  }();
  return t;
}

const mcflow::FlowTrajectory& singular_sphere() {
  static const mcflow::FlowTrajectory t = [] {
    auto r = mcflow::run(mcflow::make_icosphere(2), mcflow::FlowConfig{});
    r.singular_fit = mcflow::estimate_singular_time(r);
    return r;
  }();
  return t;
}

const mcflow::FlowTrajectory& singular_bumpy() {
  static const mcflow::FlowTrajectory t = [] {
    auto r = mcflow::run(mcflow::make_bumpy_sphere(2, 1.0, 0.05, 3), mcflow::FlowConfig{});
    r.singular_fit = mcflow::estimate_singular_time(r);
    return r;
  }();
  return t;
}

const mcflow::FlowTrajectory& singular_circle() {
  static const mcflow::FlowTrajectory t = [] {
    auto r = mcflow::run(mcflow::make_circle(256), mcflow::FlowConfig{});
    r.singular_fit = mcflow::estimate_singular_time(r);
    return r;
  }();
  return t;
}

}  // namespace testing

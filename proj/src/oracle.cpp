// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcflow/error.hpp"

namespace mcflow {

void SphereSolution::validate() const {
  if (n < 1) raise(ErrorKind::InvalidArgument, "sphere dimension must be at least 1");
  if (!(r0 > 0.0) || !std::isfinite(r0)) raise(ErrorKind::InvalidArgument, "sphere radius must be positive");
}

double SphereSolution::radius(double t) const {
  if (!(t >= 0.0) || !(t < singular_time())) raise(ErrorKind::OutOfRange, "time outside [0, T)");
  return std::sqrt(r0 * r0 - 2.0 * n * t);
}

double SphereSolution::a_norm(double t) const { return std::sqrt(static_cast<double>(n)) / radius(t); }

double SphereSolution::measure(double t) const { return unit_sphere_measure(n) * std::pow(radius(t), n); }

double unit_sphere_measure(int n) {
  const double k = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

namespace {

// Value of each functional at radius R.
double instantaneous_at_radius(const SphereSolution& s, double r, const FunctionalSpec& spec) {
  const int n = s.n;
  const double omega = unit_sphere_measure(n);
  const double a = std::sqrt(static_cast<double>(n)) / r;
  switch (spec.kind) {
    case FunctionalKind::MixedNorm:
      return std::pow(omega * std::pow(r, n) * std::pow(a, spec.p), spec.q / spec.p);
    case FunctionalKind::SubcriticalLog: {
      const double l = spec.log == LogVariant::TwoPlus ? std::log(2.0 + a) : std::log1p(a);
      return omega * std::pow(r, n) * std::pow(a, n + 2) / l;
    }
    case FunctionalKind::Supercritical: return omega * std::pow(r, n) * std::pow(a, n + 3);
    case FunctionalKind::SupA: return a;
  }
  return 0.0;
}

// integral_0^t (r0^2 - 2 n s)^e ds
double power_of_square_radius_integral(const SphereSolution& s, double t, double e) {
  const double x0 = s.r0 * s.r0;
  const double x1 = x0 - 2.0 * s.n * t;
  if (std::fabs(e + 1.0) < 1e-14) return std::log(x0 / x1) / (2.0 * s.n);
  return (std::pow(x0, e + 1.0) - std::pow(x1, e + 1.0)) / (2.0 * s.n * (e + 1.0));
}

}  // namespace

double sphere_functional(const SphereSolution& s, double t, const FunctionalSpec& spec, bool cumulative) {
  s.validate();
  spec.validate();
  const double r = s.radius(t);
  if (!cumulative) return instantaneous_at_radius(s, r, spec);

  const int n = s.n;
  const double omega = unit_sphere_measure(n);
  const double rn = std::sqrt(static_cast<double>(n));
  switch (spec.kind) {
    case FunctionalKind::MixedNorm: {
      // (omega n^(p/2))^(q/p) R^((n-p) q / p), with R^2 linear in t.
      const double k = std::pow(omega * std::pow(rn, spec.p), spec.q / spec.p);
      return k * power_of_square_radius_integral(s, t, 0.5 * (n - spec.p) * spec.q / spec.p);
    }
    case FunctionalKind::Supercritical:
      return omega * std::pow(rn, n + 3) * power_of_square_radius_integral(s, t, -1.5);
    case FunctionalKind::SupA: return rn * power_of_square_radius_integral(s, t, -0.5);
    case FunctionalKind::SubcriticalLog: {
      // s = T (1 - e^-u) maps [0, t] to [0, U]; ds = (T - s) du removes the
      // 1/(T - s) growth of the integrand.
      const double big_t = s.singular_time();
      const double upper = -std::log1p(-t / big_t);
      if (upper == 0.0) return 0.0;
      auto f = [&](double u) {
        const double remaining = big_t * std::exp(-u);
        const double rad = std::sqrt(2.0 * n * remaining);
        return instantaneous_at_radius(s, rad, spec) * remaining;
      };
      double err = 0.0;
      return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 12, 1e-12, &err);
    }
  }
  return 0.0;
}

nlohmann::json OracleComparison::summary() const {
  auto stats = [](const ErrorStats& e) {
    return nlohmann::json{{"max", e.max}, {"median", e.median}, {"samples", e.samples}};
  };
  nlohmann::json j{{"horizon", horizon}, {"radius", stats(radius)}, {"sup_a", stats(sup_a)}, {"measure", stats(measure)}};
  j["cumulative"] = nlohmann::json::object();
  for (const auto& [name, e] : cumulative) j["cumulative"][name] = stats(e);
  return j;
}

namespace {

ErrorStats summarize(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values)
    if (std::isfinite(x)) v.push_back(x);
  ErrorStats e;
  e.samples = v.size();
  if (v.empty()) return e;
  e.max = *std::max_element(v.begin(), v.end());
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  e.median = *mid;
  return e;
}

double relative(double value, double exact) { return std::fabs(value - exact) / std::fabs(exact); }

double mean_radius(const DiscreteHypersurface& s) {
  const Vec3 c = s.centroid();
  double acc = 0.0;
  for (const Vec3& p : s.positions()) acc += (p - c).norm();
  return acc / static_cast<double>(s.vertex_count());
}

}  // namespace

OracleComparison compare(const FlowTrajectory& t, const SphereSolution& sphere) {
  sphere.validate();
  if (t.records.empty() || t.snapshots.empty() || t.snapshots.front().record != 0)
    raise(ErrorKind::InsufficientData, "trajectory has no initial snapshot");
  if (t.dimension != sphere.n) raise(ErrorKind::ShapeMismatch, "dimension differs from the oracle");
  {
    const DiscreteHypersurface s0 = t.snapshots.front().surface();
    const Vec3 c = s0.centroid();
    for (const Vec3& p : s0.positions())
      if (relative((p - c).norm(), sphere.r0) > 0.01)
        raise(ErrorKind::ShapeMismatch, "initial surface is not a sphere of radius r0 within 1%");
  }

  OracleComparison out;
  out.horizon = 0.8 * sphere.singular_time();
  const std::vector<FunctionalSpec> specs{FunctionalSpec::mixed(t.dimension + 2, t.dimension + 2),
                                          FunctionalSpec::supercritical(), FunctionalSpec::subcritical_log()};
  std::vector<MonitorReport> reports;
  for (const auto& spec : specs) reports.push_back(monitor(t, spec));
  std::vector<std::vector<double>> cum_errors(specs.size());

  for (std::size_t k = 0; k < t.records.size(); ++k) {
    const StateRecord& r = t.records[k];
    if (r.time > out.horizon) break;
    out.time.push_back(r.time);
    const Snapshot* snap = t.snapshot_of(k);
    out.radius_error.push_back(snap ? relative(mean_radius(snap->surface()), sphere.radius(r.time))
                                    : std::numeric_limits<double>::quiet_NaN());
    out.sup_a_error.push_back(relative(r.sup_a, sphere.a_norm(r.time)));
    out.measure_error.push_back(relative(r.measure, sphere.measure(r.time)));
    for (std::size_t f = 0; f < specs.size(); ++f) {
      const double exact = sphere_functional(sphere, r.time, specs[f], true);
      cum_errors[f].push_back(exact > 0.0 ? relative(reports[f].cumulative[k], exact)
                                          : std::numeric_limits<double>::quiet_NaN());
    }
  }
  out.radius = summarize(out.radius_error);
  out.sup_a = summarize(out.sup_a_error);
  out.measure = summarize(out.measure_error);
  for (std::size_t f = 0; f < specs.size(); ++f) out.cumulative.emplace_back(specs[f].name(), summarize(cum_errors[f]));
  return out;
}

}  // namespace mcflow

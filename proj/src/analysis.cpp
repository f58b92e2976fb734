// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mcflow/error.hpp"
#include "mcflow/monitors.hpp"
#include "mcflow/parallel.hpp"

namespace mcflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(const ScalarField& field) {
  for (double v : field.values())
    if (v < 0.0) raise(ErrorKind::InvalidArgument, "field must be nonnegative");
}

void require_size(const DiscreteHypersurface& s, const ScalarField& f) {
  if (f.size() != s.vertex_count()) raise(ErrorKind::FieldMismatch, "field size differs from vertex count");
}

}  // namespace

SobolevExponents SobolevExponents::make(int n, double q_sob_for_n2) {
  if (n < 2) raise(ErrorKind::UnsupportedDimension, "Sobolev exponents need n >= 2");
  SobolevExponents e;
  e.n = n;
  if (n == 2) {
    if (!(q_sob_for_n2 > 1.0) || !std::isfinite(q_sob_for_n2))
      raise(ErrorKind::InvalidArgument, "Q_sob must be finite and > 1");
    e.q_sob = q_sob_for_n2;
    e.m = 0.5 * (1.0 + e.q_sob);
  } else {
    e.q_sob = static_cast<double>(n) / (n - 2);
    e.m = static_cast<double>((n - 1) * (n + 3)) / ((n - 2) * (n + 2));
  }
  e.alpha = e.q_sob * (e.m - 1.0) / (e.q_sob - e.m);
  e.beta_par = 2.0 * (n + 2) / n;
  return e;
}

double michael_simon_ratio(const DiscreteHypersurface& s, const ScalarField& f) {
  const int n = s.dimension();
  if (n < 2) raise(ErrorKind::UnsupportedDimension, "the Michael-Simon inequality needs n >= 2");
  require_size(s, f);
  require_nonnegative(f);
  const double exponent = static_cast<double>(n) / (n - 1);
  const double top = integrate(s, f, exponent);
  if (!(top > 0.0)) raise(ErrorKind::InvalidArgument, "field vanishes identically");
  const double lhs = std::pow(top, 1.0 / exponent);
  const auto h = s.mean_curvature();
  const auto w = s.dual_area();
  double hf = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) hf += std::fabs(h[i]) * f[i] * w[i];
  const double rhs = gradient_l1(s, f) + hf;
  if (!(rhs > 0.0)) raise(ErrorKind::ZeroDenominator, "gradient and mean curvature terms both vanish");
  return lhs / rhs;
}

double Lemma21Terms::minimal_constant() const {
  if (lhs == 0.0) return 0.0;
  const double r = rhs_unit();
  return r > 0.0 ? lhs / r : kInf;
}

Lemma21Terms lemma21_terms(const DiscreteHypersurface& s, const ScalarField& f, double q_sob) {
  if (s.dimension() != 2) raise(ErrorKind::UnsupportedDimension, "the mean-curvature Sobolev check is implemented for n = 2");
  require_size(s, f);
  const auto e = SobolevExponents::make(2, q_sob);
  const int n = 2;
  Lemma21Terms t;
  t.lhs = std::pow(integrate(s, f, 2.0 * e.q_sob), 1.0 / e.q_sob);
  t.gradient = dirichlet_energy(s, f);
  t.h_factor = std::pow(integrate(s, s.mean_curvature(), n + 3), 2.0 / 3.0);
  t.l2_squared = integrate(s, f, 2.0);
  return t;
}

double lemma21_gap(const DiscreteHypersurface& s, const ScalarField& f, double c_n, double q_sob) {
  return lemma21_terms(s, f, q_sob).gap(c_n);
}

InterpolationTerms interpolation_terms(const DiscreteHypersurface& surf, const ScalarField& f, double eps, double r,
                                       double s, double t) {
  if (!(t > 0.0) || !(t < r) || !(r < s)) raise(ErrorKind::ExponentOrder, "need 0 < t < r < s");
  if (!(eps > 0.0)) raise(ErrorKind::InvalidArgument, "eps must be positive");
  require_size(surf, f);
  const double mu_m = surf.total_measure();
  auto norm = [&](double p) { return std::pow(integrate(surf, f, p) / mu_m, 1.0 / p); };
  InterpolationTerms out;
  out.norm_r = norm(r);
  out.norm_s = norm(s);
  out.norm_t = norm(t);
  out.mu = (1.0 / t - 1.0 / r) / (1.0 / r - 1.0 / s);
  out.gap = eps * out.norm_s + std::pow(eps, -out.mu) * out.norm_t - out.norm_r;
  return out;
}

double interpolation_gap(const DiscreteHypersurface& surf, const ScalarField& f, double eps, double r, double s,
                         double t) {
  return interpolation_terms(surf, f, eps, r, s, t).gap;
}

double ParabolicSobolevTerms::minimal_constant() const {
  if (lhs == 0.0) return 0.0;
  const double r = rhs_unit();
  return r > 0.0 ? lhs / r : kInf;
}

std::vector<DiscreteHypersurface> snapshot_surfaces(const FlowTrajectory& t) {
  std::vector<DiscreteHypersurface> out;
  out.reserve(t.snapshots.size());
  for (std::size_t k = 0; k < t.snapshots.size(); ++k) {
    const Snapshot& s = t.snapshots[k];
    if (k > 0 && s.faces == t.snapshots[k - 1].faces) out.push_back(out.back().with_positions(s.positions));
    else out.push_back(s.surface());
  }
  return out;
}

namespace {

// Snapshot k carries weight t_(k+1) - t_k, clipped to [t_lo, t_hi].
std::vector<double> snapshot_weights(const FlowTrajectory& t, double t_lo, double t_hi) {
  const auto& snaps = t.snapshots;
  std::vector<double> w(snaps.size(), 0.0);
  for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
    const double a = std::max(snaps[k].time, t_lo);
    const double b = std::min(snaps[k + 1].time, t_hi);
    if (snaps[k].time >= t_lo && snaps[k].time <= t_hi && b > a) w[k] = b - a;
  }
  return w;
}

ParabolicSobolevTerms parabolic_terms_on(const FlowTrajectory& t, const std::vector<DiscreteHypersurface>& surfaces,
                                         const FieldSeries& fields) {
  if (t.dimension != 2) raise(ErrorKind::UnsupportedDimension, "parabolic Sobolev check is implemented for n = 2");
  if (fields.size() != surfaces.size()) raise(ErrorKind::FieldMismatch, "need one field per snapshot");
  const int n = t.dimension;
  const double beta = 2.0 * (n + 2) / n;
  const auto w = snapshot_weights(t, 0.0, kInf);
  ParabolicSobolevTerms out;
  for (std::size_t k = 0; k < surfaces.size(); ++k) {
    const DiscreteHypersurface& s = surfaces[k];
    require_size(s, fields[k]);
    const double l2 = integrate(s, fields[k], 2.0);
    out.max_l2_squared = std::max(out.max_l2_squared, l2);
    if (w[k] > 0.0) {
      out.lhs += w[k] * integrate(s, fields[k], beta);
      out.gradient += w[k] * dirichlet_energy(s, fields[k]);
      out.h_mixed += w[k] * std::pow(integrate(s, s.mean_curvature(), n + 3), 2.0 / 3.0);
    }
  }
  out.max_l2_power = std::pow(out.max_l2_squared, 2.0 / n);
  return out;
}

}  // namespace

ParabolicSobolevTerms parabolic_sobolev_terms(const FlowTrajectory& t, const FieldSeries& fields) {
  if (t.dimension != 2) raise(ErrorKind::UnsupportedDimension, "parabolic Sobolev check is implemented for n = 2");
  return parabolic_terms_on(t, snapshot_surfaces(t), fields);
}

double parabolic_sobolev_gap(const FlowTrajectory& t, const FieldSeries& fields, double c_n) {
  return parabolic_sobolev_terms(t, fields).gap(c_n);
}

FieldSeries a_norm_series(const FlowTrajectory& t) {
  FieldSeries out;
  for (const auto& s : snapshot_surfaces(t))
    out.emplace_back(std::vector<double>(s.a_norm().begin(), s.a_norm().end()));
  return out;
}

double MoserConstants::big_lambda(double beta) const { return 100.0 * beta; }

double MoserConstants::log_c_b(double beta) const {
  if (!(beta >= 2.0)) raise(ErrorKind::InvalidArgument, "C_b needs beta >= 2");
  const double inner = std::log(4.0) + (1.0 + nu) * std::log(lambda_m) + log_c_z + (1.0 + nu) * std::log(beta);
  return n * n / beta * inner;
}

double MoserConstants::c_b(double beta) const { return std::exp(log_c_b(beta)); }

double MoserConstants::c_b_cn_exponent(double beta) const { return (2.0 + nu) * n * n / beta; }

nlohmann::json MoserConstants::to_json(std::optional<double> beta) const {
  nlohmann::json j{{"n", n},       {"q", q},       {"c_n", c_n},         {"C0", c0},           {"C1", c1},
                   {"nu", nu},     {"lambda", lambda_m}, {"C_a", c_a},   {"C_z", c_z},         {"log_C_a", log_c_a},
                   {"log_C_z", log_c_z}};
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j["C_a"] = finite(c_a);
  j["C_z"] = finite(c_z);
  j["log_C_a"] = finite(log_c_a);
  j["log_C_z"] = finite(log_c_z);
  if (beta) {
    j["beta"] = *beta;
    j["Lambda"] = big_lambda(*beta);
    j["C_b"] = finite(c_b(*beta));
    j["log_C_b"] = finite(log_c_b(*beta));
  }
  return j;
}

MoserConstants moser_constants(int n, double q, double c0, double c1, double c_n) {
  if (n < 1) raise(ErrorKind::InvalidArgument, "n must be positive");
  if (!(q > 0.5 * (n + 2))) raise(ErrorKind::SubcriticalExponent, "q must exceed (n + 2)/2");
  if (!(c0 >= 0.0) || !(c1 >= 0.0) || !(c_n > 0.0))
    raise(ErrorKind::InvalidArgument, "constants must be nonnegative and c_n positive");
  MoserConstants m;
  m.n = n;
  m.q = q;
  m.c_n = c_n;
  m.c0 = c0;
  m.c1 = c1;
  m.nu = (n + 2) / (2.0 * q - (n + 2));
  m.lambda_m = (n + 2.0) / n;
  m.log_c_a = (1.0 + m.nu) * (std::log(2.0) + std::log(c_n) + std::log(c0) + std::log(c1));
  m.log_c_z = std::log(16.0) + (1.0 + m.nu) * std::log(100.0) + std::log(c_n) + m.log_c_a;
  m.c_a = std::exp(m.log_c_a);
  m.c_z = std::exp(m.log_c_z);
  return m;
}

nlohmann::json C1Bound::to_json() const { return {{"C0", c0}, {"C1", c1}, {"bound", bound}, {"pass", pass}}; }

C1Bound c1_from_c0_bound(const FlowTrajectory& t) {
  if (t.records.empty()) raise(ErrorKind::InsufficientData, "empty trajectory");
  const int n = t.dimension;
  const double q = 0.5 * (n + 3);
  double f_acc = 0.0;
  double h_acc = 0.0;
  for (const StateRecord& r : t.records) {
    // |2|A|^2|^q = 2^q |A|^(n+3)
    f_acc += std::pow(2.0, q) * r.supercritical_integral * r.dt;
    h_acc += std::pow(r.h_integral, 2.0 / 3.0) * r.dt;
  }
  C1Bound b;
  b.c0 = std::pow(f_acc, 1.0 / q);
  const double e = static_cast<double>(n) / (n + 2);
  b.c1 = std::pow(1.0 + h_acc, e);
  b.bound = std::pow(1.0 + std::pow(b.c0, n + 3), e);
  b.pass = b.c1 <= b.bound;
  return b;
}

std::vector<SpacetimeRegion::Sample> SpacetimeRegion::extract(const FlowTrajectory& t) const {
  std::vector<Sample> out;
  const double slack = 1e-12 * std::max(1.0, std::fabs(t_hi));
  for (std::size_t k = 0; k < t.snapshots.size(); ++k) {
    const Snapshot& s = t.snapshots[k];
    if (s.time < t_lo - slack || s.time > t_hi + slack) continue;
    for (std::size_t i = 0; i < s.positions.size(); ++i)
      if ((s.positions[i] - center).norm() < radius) out.push_back({k, i});
  }
  return out;
}

nlohmann::json HarnackReport::to_json() const {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"center", {center.x(), center.y(), center.z()}},
          {"beta", beta},
          {"q", q},
          {"c_n", c_n},
          {"sup_inner", sup_inner},
          {"norm_outer", norm_outer},
          {"inner_samples", inner_samples},
          {"outer_samples", outer_samples},
          {"constants", constants.to_json(beta)},
          {"log_C_b", finite(log_c_b)},
          {"log_margin", finite(log_margin)},
          {"pass", pass},
          {"minimal_c_n", finite(minimal_c_n)},
          {"caveat", caveat}};
}

HarnackReport harnack_check(const FlowTrajectory& t, const Vec3& center, double beta, double q, double c_n) {
  return harnack_check(t, snapshot_surfaces(t), center, beta, q, c_n);
}

HarnackReport harnack_check(const FlowTrajectory& t, const std::vector<DiscreteHypersurface>& surfaces,
                            const Vec3& center, double beta, double q, double c_n) {
  if (!(beta >= 2.0)) raise(ErrorKind::InvalidArgument, "beta must be at least 2");
  const int n = t.dimension;
  if (!(q > 0.5 * (n + 2))) raise(ErrorKind::SubcriticalExponent, "q must exceed (n + 2)/2");
  if (t.records.empty() || t.snapshots.empty() || t.snapshots.front().time != 0.0 || t.final_time() < 1.0 - 1e-9)
    raise(ErrorKind::TrajectoryRange, "trajectory must cover [0, 1]; rescale it first");
  if (surfaces.size() != t.snapshots.size()) raise(ErrorKind::FieldMismatch, "one surface per snapshot expected");

  HarnackReport r;
  r.center = center;
  r.beta = beta;
  r.q = q;
  r.c_n = c_n;
  r.caveat = "sup over the inner region is a maximum over vertex samples at snapshot times";

  const SpacetimeRegion outer = SpacetimeRegion::outer(center);
  const SpacetimeRegion inner = SpacetimeRegion::inner(center);
  const auto inner_set = inner.extract(t);
  if (inner_set.empty()) raise(ErrorKind::EmptyRegion, "no vertex sample lies in the inner region");
  const auto outer_set = outer.extract(t);
  r.inner_samples = inner_set.size();
  r.outer_samples = outer_set.size();

  for (const auto& smp : inner_set) r.sup_inner = std::max(r.sup_inner, surfaces[smp.snapshot].a_squared()[smp.vertex]);
  const auto w = snapshot_weights(t, outer.t_lo, outer.t_hi);
  double acc = 0.0;
  for (const auto& smp : outer_set) {
    if (w[smp.snapshot] == 0.0) continue;
    const DiscreteHypersurface& s = surfaces[smp.snapshot];
    acc += w[smp.snapshot] * std::pow(s.a_squared()[smp.vertex], beta) * s.dual_area()[smp.vertex];
  }
  r.norm_outer = std::pow(acc, 1.0 / beta);

  // C0 = ||2|A|^2||_(L^q) and C1 over M x [0, 1), from the records.
  double f_acc = 0.0;
  double h_acc = 0.0;
  for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
    const double a = t.records[k].time;
    const double b = std::min(t.records[k + 1].time, 1.0);
    if (!(b > a)) continue;
    f_acc += (b - a) * std::pow(2.0, q) * spatial_power_integral(t, k, 2.0 * q);
    h_acc += (b - a) * std::pow(t.records[k].h_integral, 2.0 / 3.0);
  }
  const double c0 = std::pow(f_acc, 1.0 / q);
  const double c1 = std::pow(1.0 + h_acc, static_cast<double>(n) / (n + 2));
  r.constants = moser_constants(n, q, c0, c1, c_n);
  r.log_c_b = r.constants.log_c_b(beta);
  const double log_sup = std::log(r.sup_inner);
  const double log_norm = std::log(r.norm_outer);
  r.log_margin = r.log_c_b + log_norm - log_sup;
  if (r.sup_inner == 0.0) r.log_margin = kInf;
  r.pass = r.log_margin >= 0.0;
  // log C_b is affine in log c_n.
  const double e = r.constants.c_b_cn_exponent(beta);
  r.minimal_c_n = r.sup_inner == 0.0 ? 0.0 : c_n * std::exp(-r.log_margin / e);
  return r;
}

namespace {

// Polynomial in coordinates (x - center) / scale.
struct Polynomial {
  std::vector<std::array<int, 3>> exponents;
  std::vector<double> coefficients;
  Vec3 center = Vec3::Zero();
  double scale = 1.0;

  double operator()(const Vec3& x) const {
    const Vec3 u = (x - center) / scale;
    double v = 0.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      double m = coefficients[i];
      for (int a = 0; a < 3; ++a)
        for (int e = 0; e < exponents[i][a]; ++e) m *= u[a];
      v += m;
    }
    return v;
  }
};

double mean_radius(const DiscreteHypersurface& s, const Vec3& c) {
  double acc = 0.0;
  for (const Vec3& p : s.positions()) acc += (p - c).norm();
  return acc / static_cast<double>(s.vertex_count());
}

Polynomial random_polynomial(const DiscreteHypersurface& s, std::mt19937_64& rng, int degree) {
  Polynomial p;
  p.center = s.centroid();
  p.scale = mean_radius(s, p.center);
  const int dims = s.dimension() == 1 ? 2 : 3;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      for (int c = 0; a + b + c <= degree; ++c) {
        if (dims == 2 && c > 0) continue;
        p.exponents.push_back({a, b, c});
        p.coefficients.push_back(normal(rng));
      }
  return p;
}

// Shifts values so the minimum is offset * range above zero.
void shift_positive(std::vector<double>& v, double offset) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double low = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    std::fill(v.begin(), v.end(), 1.0);
    return;
  }
  for (double& x : v) x = x - low + offset * range;
}

BatteryResult finish(std::vector<double> values) {
  BatteryResult r;
  r.values = std::move(values);
  if (!r.values.empty()) {
    r.min = *std::min_element(r.values.begin(), r.values.end());
    r.max = *std::max_element(r.values.begin(), r.values.end());
  }
  return r;
}

}  // namespace

ScalarField random_field(const DiscreteHypersurface& s, std::mt19937_64& rng, int degree) {
  const Polynomial p = random_polynomial(s, rng, degree);
  std::uniform_real_distribution<double> offset(0.05, 1.0);
  const double shift = offset(rng);
  std::vector<double> v(s.vertex_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p(s.positions()[i]);
  shift_positive(v, shift);
  return ScalarField(std::move(v));
}

FieldSeries random_field_series(const FlowTrajectory& t, std::mt19937_64& rng, int degree) {
  if (t.snapshots.empty()) raise(ErrorKind::InsufficientData, "trajectory has no snapshots");
  const DiscreteHypersurface first = t.snapshots.front().surface();
  const Polynomial p = random_polynomial(first, rng, degree);
  std::uniform_real_distribution<double> offset(0.05, 1.0);
  const double shift = offset(rng);
  std::vector<double> all;
  for (const Snapshot& s : t.snapshots)
    for (const Vec3& x : s.positions) all.push_back(p(x));
  shift_positive(all, shift);
  FieldSeries out;
  std::size_t at = 0;
  for (const Snapshot& s : t.snapshots) {
    out.emplace_back(std::vector<double>(all.begin() + static_cast<std::ptrdiff_t>(at),
                                         all.begin() + static_cast<std::ptrdiff_t>(at + s.positions.size())));
    at += s.positions.size();
  }
  return out;
}

nlohmann::json BatteryResult::to_json() const { return {{"trials", trials()}, {"min", min}, {"max", max}}; }

namespace {

// Fields are drawn sequentially so results do not depend on the thread count.
template <class Eval>
BatteryResult surface_battery(const std::vector<DiscreteHypersurface>& surfaces, int trials, std::uint64_t seed,
                              std::size_t outputs_per_trial, Eval eval) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, ScalarField>> work;
  for (std::size_t s = 0; s < surfaces.size(); ++s)
    for (int k = 0; k < trials; ++k) work.emplace_back(s, random_field(surfaces[s], rng));
  std::vector<double> values(work.size() * outputs_per_trial);
  parallel_for(work.size(), [&](std::size_t i) {
    eval(surfaces[work[i].first], work[i].second, &values[i * outputs_per_trial]);
  });
  return finish(std::move(values));
}

}  // namespace

BatteryResult michael_simon_battery(const std::vector<DiscreteHypersurface>& surfaces, int trials, std::uint64_t seed) {
  return surface_battery(surfaces, trials, seed, 1, [](const DiscreteHypersurface& s, const ScalarField& f, double* out) {
    *out = michael_simon_ratio(s, f);
  });
}

BatteryResult lemma21_battery(const std::vector<DiscreteHypersurface>& surfaces, int trials, double q_sob,
                              std::uint64_t seed) {
  return surface_battery(surfaces, trials, seed, 1,
                         [q_sob](const DiscreteHypersurface& s, const ScalarField& f, double* out) {
                           *out = lemma21_terms(s, f, q_sob).minimal_constant();
                         });
}

BatteryResult interpolation_battery(const std::vector<DiscreteHypersurface>& surfaces, int trials,
                                    const std::vector<double>& eps, double r, double s, double t, std::uint64_t seed) {
  if (eps.empty()) raise(ErrorKind::InvalidArgument, "empty eps sweep");
  return surface_battery(surfaces, trials, seed, eps.size(),
                         [&](const DiscreteHypersurface& surf, const ScalarField& f, double* out) {
                           for (std::size_t k = 0; k < eps.size(); ++k) {
                             const auto terms = interpolation_terms(surf, f, eps[k], r, s, t);
                             out[k] = terms.gap / terms.norm_r;
                           }
                         });
}

BatteryResult parabolic_sobolev_battery(const std::vector<const FlowTrajectory*>& trajectories, int trials,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> values;
  for (const FlowTrajectory* t : trajectories) {
    const auto surfaces = snapshot_surfaces(*t);
    std::vector<FieldSeries> work;
    for (int k = 0; k < trials; ++k) work.push_back(random_field_series(*t, rng));
    FieldSeries a;
    for (const auto& s : surfaces) a.emplace_back(std::vector<double>(s.a_norm().begin(), s.a_norm().end()));
    work.push_back(std::move(a));
    std::vector<double> local(work.size());
    parallel_for(work.size(), [&](std::size_t i) {
      local[i] = parabolic_terms_on(*t, surfaces, work[i]).minimal_constant();
    });
    values.insert(values.end(), local.begin(), local.end());
  }
  return finish(std::move(values));
}

}  // namespace mcflow

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

// One PASS/FAIL line per acceptance criterion. Reference values are computed
// here from closed forms, independently of the oracle module.

#include <Eigen/Geometry>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mcflow/analysis.hpp"
#include "mcflow/error.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/gronwall.hpp"
#include "mcflow/mesh_gen.hpp"
#include "mcflow/monitors.hpp"
#include "mcflow/rescale.hpp"
#include "mcflow/surface.hpp"
#include "support.hpp"

using namespace mcflow;
using std::numbers::pi;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Runs a criterion, turning an unexpected exception into FAIL.
void guarded(int id, const std::string& title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, title, std::string("exception: ") + e.what());
  }
}

struct Runs {
  FlowTrajectory sphere;
  double sphere_seconds = 0.0;
  FlowTrajectory circle;
};

Runs& runs() {
  static Runs r = [] {
    Runs out;
    const auto t0 = Clock::now();
    out.sphere = run(make_icosphere(4), FlowConfig{});
    out.sphere.singular_fit = estimate_singular_time(out.sphere);
    out.sphere_seconds = seconds_since(t0);
    out.circle = run(make_circle(2000), FlowConfig{});
    out.circle.singular_fit = estimate_singular_time(out.circle);
    return out;
  }();
  return r;
}

void sphere_accuracy() {
  const auto& r = runs();
  const auto& t = r.sphere;
  const double T = t.singular_fit->singular_time;
  double worst = 0.0;
  for (const Snapshot& s : t.snapshots) {
    if (s.time > 0.2) break;
    Vec3 c = Vec3::Zero();
    for (const Vec3& v : s.positions) c += v;
    c /= static_cast<double>(s.positions.size());
    double mean = 0.0;
    for (const Vec3& v : s.positions) mean += (v - c).norm();
    mean /= static_cast<double>(s.positions.size());
    worst = std::max(worst, rel(mean, std::sqrt(1.0 - 4.0 * s.time)));
  }
  const bool pass = T >= 0.245 && T <= 0.255 && worst <= 0.01 && r.sphere_seconds <= 120.0;
  report(1, pass, "sphere flow accuracy",
         fmt("T=%.5f in [0.245,0.255], max radius error on [0,0.2]=%.3e (<=1e-2), run %.1fs (<=120s), %zu vertices",
             T, worst, r.sphere_seconds, t.records.front().vertex_count));
}

void circle_accuracy() {
  const auto& fit = *runs().circle.singular_fit;
  const bool pass = fit.singular_time >= 0.49 && fit.singular_time <= 0.51 && std::fabs(fit.rate_exponent - 0.5) <= 0.05;
  report(2, pass, "circle flow accuracy",
         fmt("T=%.5f in [0.49,0.51], alpha=%.4f (0.5 +- 0.05)", fit.singular_time, fit.rate_exponent));
}

void critical_oracle() {
  const double sphere_ref = 4.0 * pi * std::log(5.0);
  const double circle_ref = pi * std::log(5.0);
  const double s = monitor(runs().sphere, FunctionalSpec::mixed(4, 4)).cumulative_at(0.2);
  const double c = monitor(runs().circle, FunctionalSpec::mixed(3, 3)).cumulative_at(0.4);
  const bool pass = rel(s, sphere_ref) <= 0.05 && rel(c, circle_ref) <= 0.05;
  report(3, pass, "critical functional oracle",
         fmt("sphere %.4f vs %.4f (rel %.2e), circle %.4f vs %.4f (rel %.2e), tol 5%%", s, sphere_ref,
             rel(s, sphere_ref), c, circle_ref, rel(c, circle_ref)));
}

void supercritical_oracle() {
  const double ref = std::pow(2.0, 3.5) * pi * (std::sqrt(5.0) - 1.0);
  const double v = supercritical(runs().sphere).cumulative_at(0.2);
  report(4, rel(v, ref) <= 0.05, "supercritical oracle", fmt("%.4f vs %.4f (rel %.2e), tol 5%%", v, ref, rel(v, ref)));
}

void divergence_dichotomy() {
  const auto& t = runs().sphere;
  const auto crit = monitor(t, FunctionalSpec::mixed(4, 4)).divergence;
  const auto sublog = subcritical_log(t).divergence;
  const auto super = monitor(t, FunctionalSpec::mixed(6, 6)).divergence;
  if (!crit || !sublog || !super) {
    report(5, false, "divergence dichotomy", "missing growth-rate fit");
    return;
  }
  const bool pass = crit->divergent && sublog->divergent && !super->divergent;
  report(5, pass, "divergence dichotomy",
         fmt("critical decay %.3f (%s), sublog decay %.3f (%s), (6,6) decay %.3f (%s; bounded expected)", crit->decay,
             crit->divergent ? "divergent" : "bounded", sublog->decay, sublog->divergent ? "divergent" : "bounded",
             super->decay, super->divergent ? "divergent" : "bounded"));
}

void rescaling_suite() {
  const auto& t = runs().sphere;
  const auto t0 = Clock::now();
  bool pass = true;
  double worst = 0.0;
  for (double q : {1.0 / 3.0, 1.0, 2.0, 7.0}) {
    const auto r = invariance_report(t, q);
    pass = pass && r.pass;
    worst = std::max({worst, r.sup_a_error, r.time_error, r.supercritical_error, r.critical_error});
    if (r.critical_pairs.empty()) pass = false;
  }
  const auto two = rescale_trajectory(rescale_trajectory(t, 2.0), 7.0);
  const auto one = rescale_trajectory(t, 14.0);
  double composition = 0.0;
  for (std::size_t k = 0; k < t.records.size(); ++k) {
    composition = std::max(composition, rel(two.records[k].sup_a, one.records[k].sup_a));
    composition = std::max(composition, rel(two.records[k].measure, one.records[k].measure));
  }
  for (std::size_t k = 0; k < t.snapshots.size(); ++k)
    for (std::size_t i = 0; i < t.snapshots[k].positions.size(); ++i)
      composition = std::max(composition, (two.snapshots[k].positions[i] - one.snapshots[k].positions[i]).norm() /
                                              one.snapshots[k].positions[i].norm());
  const double elapsed = seconds_since(t0);
  pass = pass && composition <= 1e-10 && elapsed <= 10.0;
  report(6, pass, "exact rescaling",
         fmt("max invariant error %.2e, composition error %.2e (tol 1e-10), %.2fs", worst, composition, elapsed));
}

void constants_suite() {
  bool pass = true;
  for (int n = 1; n <= 8; ++n) {
    const auto m = moser_constants(n, 0.5 * (n + 3), 1.3, 1.7, 2.1);
    if (1.0 + m.nu != n + 3.0) pass = false;
    if (rel(m.c_a, std::pow(2.0 * 2.1 * 1.3 * 1.7, n + 3)) > 1e-12) pass = false;
  }
  const std::vector<double> values{1.0, 2.0, 5.0};
  const std::vector<double> qs{2.5, 3.0, 4.0};
  const double beta = 5.0;
  int checked = 0, violations = 0;
  auto strictly = [&](const MoserConstants& a, const MoserConstants& b) {
    ++checked;
    if (!(b.log_c_a > a.log_c_a && b.log_c_z > a.log_c_z && b.log_c_b(beta) > a.log_c_b(beta))) ++violations;
  };
  for (double q : qs)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
          const auto base = moser_constants(2, q, values[i], values[j], values[k]);
          if (i + 1 < 3) strictly(base, moser_constants(2, q, values[i + 1], values[j], values[k]));
          if (j + 1 < 3) strictly(base, moser_constants(2, q, values[i], values[j + 1], values[k]));
          if (k + 1 < 3) strictly(base, moser_constants(2, q, values[i], values[j], values[k + 1]));
        }
  pass = pass && violations == 0;
  report(7, pass, "constants suite",
         fmt("nu and C_a identities for n=1..8, %d monotonicity comparisons on a 3^4 grid, %d violations", checked,
             violations));
}

double battery_c_n = 0.0;

void inequality_batteries() {
  const std::vector<DiscreteHypersurface> surfaces{make_icosphere(3), make_ellipsoid(3, Vec3(1.0, 0.7, 0.4)),
                                                   make_bumpy_sphere(3, 1.0, 0.15, 7),
                                                   make_ellipsoid(2, Vec3(2.0, 1.0, 1.0))};
  const auto ms = michael_simon_battery(surfaces, 250, 1);
  const auto l1 = lemma21_battery(surfaces, 100, 10.0, 1);
  const auto l2 = lemma21_battery(surfaces, 100, 10.0, 2);
  std::vector<const FlowTrajectory*> trajs{&testing::singular_sphere(), &testing::singular_bumpy()};
  const auto p1 = parabolic_sobolev_battery(trajs, 20, 1);
  const auto p2 = parabolic_sobolev_battery(trajs, 20, 2);
  std::vector<double> eps;
  for (int k = -6; k <= 6; ++k) eps.push_back(std::pow(10.0, k / 2.0));
  const auto in = interpolation_battery(surfaces, 50, eps, 4, 8, 2, 3);
  auto stable = [](const BatteryResult& a, const BatteryResult& b) {
    return std::isfinite(a.max) && std::isfinite(b.max) && a.max > 0.0 && b.max > 0.0 && a.max <= 2.0 * b.max &&
           b.max <= 2.0 * a.max;
  };
  battery_c_n = std::max(l1.max, l2.max);
  const bool pass = ms.trials() >= 1000 && ms.max <= 1.0 && stable(l1, l2) && stable(p1, p2) && in.min >= -1e-9;
  report(8, pass, "inequality batteries",
         fmt("Michael-Simon max ratio %.4f over %zu trials; mean-curvature Sobolev c_n %.4g / %.4g; parabolic c_n "
             "%.4g / %.4g; interpolation min scaled gap %.3e over %zu trials",
             ms.max, ms.trials(), l1.max, l2.max, p1.max, p2.max, in.min, in.trials()));
}

void harnack_end_to_end() {
  if (!(battery_c_n > 0.0)) battery_c_n = lemma21_battery({make_icosphere(3)}, 100, 10.0, 1).max;
  auto ellipsoid = run(make_ellipsoid(2, Vec3(1.0, 0.9, 0.8)), FlowConfig{});
  const std::vector<const FlowTrajectory*> sources{&testing::singular_sphere(), &testing::singular_bumpy(), &ellipsoid};
  std::mt19937_64 rng(2026);
  int centers = 0, passed = 0, trajectories = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  bool nesting = true;
  for (const FlowTrajectory* src : sources) {
    const auto t = rescale_trajectory(*src, unit_time_factor(0.8 * src->final_time()));
    ++trajectories;
    const auto surfaces = snapshot_surfaces(t);
    std::size_t mid = 0;
    for (std::size_t k = 0; k < t.snapshots.size(); ++k)
      if (std::fabs(t.snapshots[k].time - 0.5) < std::fabs(t.snapshots[mid].time - 0.5)) mid = k;
    const auto& pos = t.snapshots[mid].positions;
    std::uniform_int_distribution<std::size_t> pick(0, pos.size() - 1);
    for (int c = 0; c < 10; ++c) {
      const Vec3 center = pos[pick(rng)];
      const auto inner = SpacetimeRegion::inner(center).extract(t);
      const auto outer = SpacetimeRegion::outer(center).extract(t);
      if (!std::includes(outer.begin(), outer.end(), inner.begin(), inner.end())) nesting = false;
      const auto r = harnack_check(t, surfaces, center, t.dimension + 3.0, 0.5 * (t.dimension + 3), battery_c_n);
      ++centers;
      if (r.pass) ++passed;
      worst_margin = std::min(worst_margin, r.log_margin);
    }
  }
  bool empty_region = false;
  try {
    const auto t = rescale_trajectory(testing::singular_sphere(), unit_time_factor(0.8 * testing::singular_sphere().final_time()));
    harnack_check(t, Vec3(1e3, 0, 0), 5.0, 2.5, battery_c_n);
  } catch (const Error& e) {
    empty_region = e.kind() == ErrorKind::EmptyRegion;
  }
  const bool pass = trajectories >= 3 && centers >= 10 && passed == centers && nesting && empty_region;
  report(9, pass, "Harnack end-to-end",
         fmt("%d/%d centers pass on %d unit-time trajectories at c_n=%.4g, min log margin %.3g; nesting %s; "
             "EmptyRegion %s",
             passed, centers, trajectories, battery_c_n, worst_margin, nesting ? "ok" : "violated",
             empty_region ? "raised" : "missing"));
}

void gronwall_suite() {
  std::vector<double> time, f, g;
  for (int k = 0; k <= 2000; ++k) {
    time.push_back(k * 5e-4);
    f.push_back(1.0);
    g.push_back(1.0);
  }
  const auto s = h_bound(time, f, g, 1.0, 0.0);
  double synthetic = 0.0;
  for (std::size_t k = 0; k < time.size(); ++k)
    synthetic = std::max(synthetic, std::fabs(s.h[k] - (1.0 + time[k] * std::log(3.0))));
  double additivity = 0.0;
  for (double z : {1.5, 7.0, 300.0, 4e4})
    additivity = std::max(additivity, std::fabs(psi_tilde(1e8, 1.0) - psi_tilde(z, 1.0) - psi_tilde(1e8, z)));
  const double growth = psi_tilde(1e10, 1.0) - psi_tilde(1e2, 1.0);
  const auto chain = h_bound(runs().sphere, 0.0, 0.05);
  const bool pass = synthetic <= 1e-12 && additivity <= 1e-9 && growth >= 1.0 && chain.f_below_h && chain.chain_holds;
  report(10, pass, "Gronwall comparison",
         fmt("synthetic error %.2e, additivity %.2e, growth 1e2->1e10 %.4f, sphere f<=h %s (max excess %.2e), chain %s "
             "(max excess %.2e)",
             synthetic, additivity, growth, chain.f_below_h ? "yes" : "no", chain.max_f_excess,
             chain.chain_holds ? "holds" : "fails", chain.max_chain_excess));
}

void geometry_suite() {
  const std::vector<DiscreteHypersurface> meshes{make_icosphere(3), make_ellipsoid(3, Vec3(1.0, 0.7, 0.4)),
                                                 make_bumpy_sphere(3, 1.0, 0.2, 5)};
  double gauss_bonnet = 0.0, identity = 0.0, rigid = 0.0, dilation = 0.0;
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.9, Vec3(-1, 2, 0.5).normalized()).toRotationMatrix();
  const double k = 2.5;
  for (const auto& m : meshes) {
    const auto defects = testing::angle_defects(m);
    double total = 0.0;
    for (double d : defects) total += d;
    gauss_bonnet = std::max(gauss_bonnet, std::fabs(total - 2.0 * pi * m.euler_characteristic()));
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      const double h = m.mean_curvature()[i], kk = m.gauss_curvature()[i];
      identity = std::max(identity, std::fabs(m.a_squared()[i] - std::max(h * h - 2.0 * kk, 0.0)) /
                                        std::max(1.0, m.a_squared()[i]));
    }
    const auto moved = transformed(m, rot, Vec3(0.4, -3.0, 1.0));
    const auto big = transformed(m, Eigen::Matrix3d::Identity(), Vec3::Zero(), k);
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      rigid = std::max(rigid, rel(moved.a_norm()[i] + 1e-300, m.a_norm()[i] + 1e-300));
      rigid = std::max(rigid, rel(moved.dual_area()[i], m.dual_area()[i]));
      dilation = std::max(dilation, rel(big.a_norm()[i] * k + 1e-300, m.a_norm()[i] + 1e-300));
      dilation = std::max(dilation, rel(big.dual_area()[i], k * k * m.dual_area()[i]));
    }
  }
  const bool pass = gauss_bonnet <= 1e-9 && identity <= 1e-12 && rigid <= 1e-10 && dilation <= 1e-12;
  report(11, pass, "geometry suite",
         fmt("Gauss-Bonnet %.2e (1e-9), |A|^2 identity %.2e, rigid motion %.2e (1e-10), dilation %.2e (1e-12)",
             gauss_bonnet, identity, rigid, dilation));
}

}  // namespace

int main() {
  guarded(1, "sphere flow accuracy", sphere_accuracy);
  guarded(2, "circle flow accuracy", circle_accuracy);
  guarded(3, "critical functional oracle", critical_oracle);
  guarded(4, "supercritical oracle", supercritical_oracle);
  guarded(5, "divergence dichotomy", divergence_dichotomy);
  guarded(6, "exact rescaling", rescaling_suite);
  guarded(7, "constants suite", constants_suite);
  guarded(8, "inequality batteries", inequality_batteries);
  guarded(9, "Harnack end-to-end", harnack_end_to_end);
  guarded(10, "Gronwall comparison", gronwall_suite);
  guarded(11, "geometry suite", geometry_suite);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

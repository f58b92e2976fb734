// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/gronwall.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcflow/error.hpp"

namespace mcflow {

double psi(double s) {
  if (!(s >= 0.0)) raise(ErrorKind::DomainError, "psi needs s >= 0");
  return s * std::log(2.0 + s);
}

double psi_tilde(double y, double c) {
  if (!(c > 0.0)) raise(ErrorKind::DomainError, "psi_tilde needs c > 0");
  if (!(y >= c)) raise(ErrorKind::DomainError, "psi_tilde needs y >= c");
  if (y == c) return 0.0;
  // ds / (s ln(2 + s)) = du / ln(2 + e^u)
  auto f = [](double u) {
    const double l = u > 40.0 ? u + std::log1p(2.0 * std::exp(-u)) : std::log(2.0 + std::exp(u));
    return 1.0 / l;
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, std::log(c), std::log(y), 12, 1e-12,
                                                                       &err);
}

double psi_tilde_inverse(double value, double c) {
  if (!(value >= 0.0)) raise(ErrorKind::DomainError, "psi_tilde_inverse needs a nonnegative value");
  if (value == 0.0) return c;
  double lo = std::log(c);
  double hi = std::log(std::numeric_limits<double>::max());
  if (psi_tilde(std::numeric_limits<double>::max(), c) < value) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi_tilde(std::exp(mid), c) < value) lo = mid;
    else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

nlohmann::json GronwallState::summary() const {
  return {{"c", c},
          {"tau1", tau1},
          {"start", start},
          {"samples", time.size()},
          {"time", time},
          {"f", f},
          {"G", g},
          {"h", h},
          {"psi_tilde_h", psi_tilde_h},
          {"chain_lhs", chain_lhs},
          {"chain_rhs", chain_rhs},
          {"f_below_h", f_below_h},
          {"chain_holds", chain_holds},
          {"max_f_excess", max_f_excess},
          {"max_chain_excess", max_chain_excess}};
}

GronwallState h_bound(const std::vector<double>& time, const std::vector<double>& f, const std::vector<double>& g,
                      double c, double tau1) {
  if (time.empty()) raise(ErrorKind::MissingMonitors, "no samples");
  if (f.size() != time.size() || g.size() != time.size()) raise(ErrorKind::FieldMismatch, "series lengths differ");
  if (!(c > 0.0)) raise(ErrorKind::InvalidArgument, "c must be positive");
  GronwallState s;
  s.c = c;
  s.tau1 = tau1;
  s.time = time;
  s.f = f;
  s.g = g;
  const std::size_t count = time.size();
  s.h.resize(count);
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    s.h[k] = c * (1.0 + acc);
    if (k + 1 < count) acc += psi(f[k]) * g[k] * (time[k + 1] - time[k]);
  }
  s.psi_tilde_h.resize(count);
  for (std::size_t k = 0; k < count; ++k) s.psi_tilde_h[k] = psi_tilde(s.h[k], c);

  s.start = static_cast<std::size_t>(std::lower_bound(time.begin(), time.end(), tau1) - time.begin());
  double g_acc = 0.0;
  for (std::size_t k = s.start; k < count; ++k) {
    const double excess = (f[k] - s.h[k]) / s.h[k];
    if (excess > 1e-12) s.f_below_h = false;
    s.max_f_excess = std::max(s.max_f_excess, excess);
    const double lhs = psi_tilde(s.h[k], s.h[s.start]);
    const double rhs = c * g_acc;
    s.chain_lhs.push_back(lhs);
    s.chain_rhs.push_back(rhs);
    const double chain = rhs > 0.0 ? (lhs - rhs) / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (chain > kChainTolerance) s.chain_holds = false;
    s.max_chain_excess = std::max(s.max_chain_excess, chain);
    if (k + 1 < count) g_acc += g[k] * (time[k + 1] - time[k]);
  }
  return s;
}

double keybound_constant(const FlowTrajectory& t, double tau1) {
  if (t.records.empty()) raise(ErrorKind::MissingMonitors, "empty trajectory");
  double best = 0.0;
  double acc = 0.0;
  for (const StateRecord& r : t.records) {
    if (r.time >= tau1) best = std::max(best, r.sup_a / (1.0 + acc));
    acc += r.supercritical_integral * r.dt;
  }
  if (!(best > 0.0)) return default_c_lambda(std::min(std::max(tau1, 1e-12), 1.0));
  return best;
}

GronwallState h_bound(const FlowTrajectory& t, double c, double tau1) {
  if (t.records.empty()) raise(ErrorKind::MissingMonitors, "empty trajectory");
  if (!(c > 0.0)) c = keybound_constant(t, tau1);
  std::vector<double> time, f, g;
  for (const StateRecord& r : t.records) {
    time.push_back(r.time);
    f.push_back(r.sup_a);
    g.push_back(r.log2_integral);
  }
  return h_bound(time, f, g, c, tau1);
}

std::string to_string(Verdict v) { return v == Verdict::Extendable ? "Extendable" : "SubcriticalDiverges"; }

nlohmann::json ExtensionReport::summary() const {
  nlohmann::json j{{"verdict", to_string(verdict)}, {"c", c}, {"tau1", tau1}, {"g_integral", g_integral}};
  if (divergence)
    j["divergence"] = {{"divergent", divergence->divergent}, {"decay", divergence->decay},
                       {"threshold", divergence->threshold}, {"residual", divergence->residual},
                       {"singular_time", divergence->singular_time}, {"samples", divergence->samples}};
  else
    j["divergence"] = nullptr;
  j["bound"] = bound && std::isfinite(*bound) ? nlohmann::json(*bound) : nlohmann::json(nullptr);
  j["gronwall"] = state.summary();
  return j;
}

ExtensionReport extension_verdict(const FlowTrajectory& t, double c, double tau1, double slope_threshold) {
  if (t.records.size() < 2) raise(ErrorKind::MissingMonitors, "trajectory has no monitor samples");
  ExtensionReport r;
  r.state = h_bound(t, c, tau1);
  r.c = r.state.c;
  r.tau1 = tau1;
  const MonitorReport g = monitor(t, FunctionalSpec::subcritical_log(), slope_threshold);
  r.g_integral = g.final_cumulative();
  r.divergence = g.divergence;
  if (r.divergence && r.divergence->divergent) {
    r.verdict = Verdict::SubcriticalDiverges;
    return r;
  }
  r.verdict = Verdict::Extendable;
  const std::size_t start = std::min(r.state.start, r.state.h.size() - 1);
  r.bound = psi_tilde_inverse(psi_tilde(r.state.h[start], r.c) + r.c * r.g_integral, r.c);
  return r;
}

}  // namespace mcflow

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/monitors.hpp"

namespace mcflow {

/// s ln(2 + s)
double psi(double s);

/// integral_c^y ds / psi(s), by adaptive Gauss-Kronrod in u = ln s. Throws
/// DomainError unless y >= c > 0.
double psi_tilde(double y, double c);

/// The y >= c with psi_tilde(y, c) = value, by bisection in ln y. Returns
/// infinity when value exceeds psi_tilde(DBL_MAX, c).
double psi_tilde_inverse(double value, double c);

/// Sampled comparison function h(t) = c (1 + integral_0^t psi(f) G ds) with
/// f = sup|A| and G the subcritical-log integral, plus the two chain checks
/// from the first sample at or after tau1:
///   (i)  f(t) <= h(t)
///   (ii) psi_tilde(h(t)) - psi_tilde(h(tau1)) <= c integral_tau1^t G.
struct GronwallState {
  double c = 0.0;
  double tau1 = 0.0;
  std::size_t start = 0;  // index of the first sample with t >= tau1
  std::vector<double> time;
  std::vector<double> f;
  std::vector<double> g;
  std::vector<double> h;
  /// psi_tilde(h(t), c)
  std::vector<double> psi_tilde_h;
  /// psi_tilde(h(t)) - psi_tilde(h(tau1)) and c integral_tau1^t G, from start on.
  std::vector<double> chain_lhs;
  std::vector<double> chain_rhs;
  bool f_below_h = true;
  bool chain_holds = true;
  double max_f_excess = 0.0;      // max (f - h) / h over t >= tau1, clipped at 0
  double max_chain_excess = 0.0;  // max (lhs - rhs) relative, clipped at 0

  nlohmann::json summary() const;
};

/// Relative slack allowed in check (ii) for quadrature error.
inline constexpr double kChainTolerance = 1e-8;

/// Left-endpoint quadrature on the sample grid (the last sample's step is unused).
GronwallState h_bound(const std::vector<double>& time, const std::vector<double>& f, const std::vector<double>& g,
                      double c, double tau1);

/// c <= 0 selects the keybound estimate: the largest sup|A| / (1 + integral
/// |A|^(n+3)) ratio for t >= tau1. Throws MissingMonitors on an empty trajectory.
GronwallState h_bound(const FlowTrajectory& trajectory, double c, double tau1 = 0.05);

/// The keybound estimate of c described above.
double keybound_constant(const FlowTrajectory& trajectory, double tau1);

enum class Verdict { Extendable, SubcriticalDiverges };

std::string to_string(Verdict v);

struct ExtensionReport {
  Verdict verdict = Verdict::Extendable;
  double c = 0.0;
  double tau1 = 0.0;
  double g_integral = 0.0;  // c-free integral_0^end G
  std::optional<DivergenceFit> divergence;
  /// psi_tilde^-1(psi_tilde(h(tau1)) + c integral G); set when Extendable.
  std::optional<double> bound;
  GronwallState state;

  nlohmann::json summary() const;
};

/// SubcriticalDiverges when the growth fit of the cumulative subcritical-log
/// monitor classifies it divergent; Extendable with the bound otherwise.
ExtensionReport extension_verdict(const FlowTrajectory& trajectory, double c = 0.0, double tau1 = 0.05,
                                  double slope_threshold = 0.5);

}  // namespace mcflow

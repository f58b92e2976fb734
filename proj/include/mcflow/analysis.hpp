// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/surface.hpp"

namespace mcflow {

/// Exponents of the hypersurface Sobolev inequality and its parabolic form.
struct SobolevExponents {
  int n = 2;
  /// n/(n-2) for n > 2; the configured finite value for n = 2.
  double q_sob = 10.0;
  /// Interpolation exponent with 1 < m < q_sob. For n = 2 the closed form
  /// degenerates and m is taken as (1 + q_sob) / 2.
  double m = 0.0;
  /// q_sob (m - 1) / (q_sob - m)
  double alpha = 0.0;
  /// 2 (n + 2) / n
  double beta_par = 0.0;

  /// Throws UnsupportedDimension for n < 2, InvalidArgument for q_sob <= 1.
  static SobolevExponents make(int n, double q_sob_for_n2 = 10.0);
};

/// (integral f^(n/(n-1)))^((n-1)/n) / integral (|grad f| + |H| f). Throws
/// UnsupportedDimension for n = 1, InvalidArgument for negative or zero
/// fields, ZeroDenominator when the denominator vanishes.
double michael_simon_ratio(const DiscreteHypersurface& surface, const ScalarField& field);

struct Lemma21Terms {
  double lhs = 0.0;            // ||v||^2 in L^(2Q)
  double gradient = 0.0;       // ||grad v||^2 in L^2
  double h_factor = 0.0;       // ||H||^(2(n+3)/3) in L^(n+3)
  double l2_squared = 0.0;     // ||v||^2 in L^2
  double rhs_unit() const { return gradient + h_factor * l2_squared; }
  double gap(double c_n) const { return c_n * rhs_unit() - lhs; }
  /// Smallest c_n with gap >= 0 (zero when lhs = 0).
  double minimal_constant() const;
};

/// Throws UnsupportedDimension unless n = 2.
Lemma21Terms lemma21_terms(const DiscreteHypersurface& surface, const ScalarField& field, double q_sob = 10.0);
double lemma21_gap(const DiscreteHypersurface& surface, const ScalarField& field, double c_n, double q_sob = 10.0);

/// Norms against the normalized measure dmu / mu(M).
struct InterpolationTerms {
  double norm_r = 0.0;
  double norm_s = 0.0;
  double norm_t = 0.0;
  double mu = 0.0;
  double gap = 0.0;
};

/// eps ||v||_s + eps^(-mu) ||v||_t - ||v||_r with mu = (1/t - 1/r)/(1/r - 1/s).
/// Throws ExponentOrder unless t < r < s.
InterpolationTerms interpolation_terms(const DiscreteHypersurface& surface, const ScalarField& field, double eps,
                                       double r, double s, double t);
double interpolation_gap(const DiscreteHypersurface& surface, const ScalarField& field, double eps, double r,
                         double s, double t);

struct ParabolicSobolevTerms {
  double lhs = 0.0;              // ||v||^beta in L^beta over spacetime
  double max_l2_power = 0.0;     // max_t ||v||^(4/n) in L^2
  double gradient = 0.0;         // ||grad v||^2 over spacetime
  double max_l2_squared = 0.0;   // max_t ||v||^2 in L^2
  double h_mixed = 0.0;          // ||H||^(2(n+3)/3) in L^(n+3, 2(n+3)/3)
  double rhs_unit() const { return max_l2_power * (gradient + max_l2_squared * h_mixed); }
  double gap(double c_n) const { return c_n * rhs_unit() - lhs; }
  double minimal_constant() const;
};

/// One field per snapshot, in snapshot order.
using FieldSeries = std::vector<ScalarField>;

/// Time integrals weight snapshot k by t_(k+1) - t_k. Throws
/// UnsupportedDimension unless n = 2, FieldMismatch on size mismatch.
ParabolicSobolevTerms parabolic_sobolev_terms(const FlowTrajectory& trajectory, const FieldSeries& fields);
double parabolic_sobolev_gap(const FlowTrajectory& trajectory, const FieldSeries& fields, double c_n);

/// v = |A| on every snapshot.
FieldSeries a_norm_series(const FlowTrajectory& trajectory);

/// Closed-form constants of the reverse Holder / Moser iteration chain.
struct MoserConstants {
  int n = 2;
  double q = 0.0;
  double c_n = 1.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double nu = 0.0;
  double lambda_m = 0.0;  // (n + 2) / n
  double c_a = 0.0;
  double c_z = 0.0;
  /// Natural logarithms; finite even when the constants overflow.
  double log_c_a = 0.0;
  double log_c_z = 0.0;

  /// Lambda(beta) = 100 beta.
  double big_lambda(double beta) const;
  /// C_b(beta) = (4 lambda_m^(1+nu) C_z beta^(1+nu))^(n^2/beta); beta >= 2.
  double c_b(double beta) const;
  double log_c_b(double beta) const;
  /// d log C_b / d log c_n = (2 + nu) n^2 / beta.
  double c_b_cn_exponent(double beta) const;

  nlohmann::json to_json(std::optional<double> beta = std::nullopt) const;
};

/// Throws SubcriticalExponent when q <= (n + 2)/2.
MoserConstants moser_constants(int n, double q, double c0, double c1, double c_n);

struct C1Bound {
  double c0 = 0.0;  // ||2|A|^2|| in L^((n+3)/2) over spacetime
  double c1 = 0.0;  // (1 + ||H||^(2(n+3)/3) in L^(n+3, 2(n+3)/3))^(n/(n+2))
  double bound = 0.0;  // (1 + c0^(n+3))^(n/(n+2))
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Evaluates c0 and c1 on the records and compares c1 with the bound.
C1Bound c1_from_c0_bound(const FlowTrajectory& trajectory);

/// Vertex-time samples with t in [t_lo, t_hi] and |x - center| < radius.
struct SpacetimeRegion {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double t_lo = 0.0;
  double t_hi = 1.0;

  static SpacetimeRegion outer(const Vec3& center) { return {center, 1.0, 0.0, 1.0}; }
  static SpacetimeRegion inner(const Vec3& center) { return {center, 0.5, 1.0 / 12.0, 1.0}; }

  struct Sample {
    std::size_t snapshot;
    std::size_t vertex;
    bool operator<(const Sample& o) const {
      return snapshot != o.snapshot ? snapshot < o.snapshot : vertex < o.vertex;
    }
    bool operator==(const Sample& o) const = default;
  };
  std::vector<Sample> extract(const FlowTrajectory& trajectory) const;
};

struct HarnackReport {
  Vec3 center = Vec3::Zero();
  double beta = 0.0;
  double q = 0.0;
  double c_n = 1.0;
  double sup_inner = 0.0;   // max of v = |A|^2 over inner samples
  double norm_outer = 0.0;  // ||v|| in L^beta over the outer region
  std::size_t inner_samples = 0;
  std::size_t outer_samples = 0;
  MoserConstants constants;
  double log_c_b = 0.0;
  /// log(C_b ||v||) - log(sup v); PASS iff >= 0.
  double log_margin = 0.0;
  bool pass = false;
  /// Smallest c_n for which the inequality holds with these data.
  double minimal_c_n = 0.0;
  std::string caveat;

  nlohmann::json to_json() const;
};

/// Snapshot geometry in snapshot order; connectivity checks run once per
/// distinct face list.
std::vector<DiscreteHypersurface> snapshot_surfaces(const FlowTrajectory& trajectory);

/// v = |A|^2, f = 2|A|^2. The trajectory must cover [0, 1]. Throws
/// TrajectoryRange, EmptyRegion, SubcriticalExponent, InvalidArgument (beta < 2).
HarnackReport harnack_check(const FlowTrajectory& trajectory, const Vec3& center, double beta, double q, double c_n);
/// Same, with snapshot geometry already built by snapshot_surfaces.
HarnackReport harnack_check(const FlowTrajectory& trajectory, const std::vector<DiscreteHypersurface>& surfaces,
                            const Vec3& center, double beta, double q, double c_n);

// Randomized batteries.

/// Random polynomial of total degree <= degree in coordinates normalized by
/// the centroid and mean radius, shifted so its minimum is a positive
/// fraction of its range.
ScalarField random_field(const DiscreteHypersurface& surface, std::mt19937_64& rng, int degree = 3);

/// The same polynomial evaluated on every snapshot of a trajectory (space
/// normalized by the initial snapshot).
FieldSeries random_field_series(const FlowTrajectory& trajectory, std::mt19937_64& rng, int degree = 3);

struct BatteryResult {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  std::size_t trials() const { return values.size(); }
  nlohmann::json to_json() const;
};

/// Ratios over trials_per_surface random fields on each surface.
BatteryResult michael_simon_battery(const std::vector<DiscreteHypersurface>& surfaces, int trials_per_surface,
                                    std::uint64_t seed);
/// Minimal constants; the smallest all-PASS c_n is the maximum.
BatteryResult lemma21_battery(const std::vector<DiscreteHypersurface>& surfaces, int trials_per_surface,
                              double q_sob, std::uint64_t seed);
/// Gaps divided by ||v||_r over every (surface, field, eps) triple.
BatteryResult interpolation_battery(const std::vector<DiscreteHypersurface>& surfaces, int trials_per_surface,
                                    const std::vector<double>& eps, double r, double s, double t,
                                    std::uint64_t seed);
/// Minimal constants over random field series (plus v = |A|) per trajectory.
BatteryResult parabolic_sobolev_battery(const std::vector<const FlowTrajectory*>& trajectories,
                                        int trials_per_trajectory, std::uint64_t seed);

}  // namespace mcflow

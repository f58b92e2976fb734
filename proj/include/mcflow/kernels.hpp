// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the geometry, monitor and analysis code.
//
// Each kernel has a scalar reference implementation and vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked once at startup
// from the host CPU; MCFLOW_SIMD=scalar forces the reference path. Vector
// variants reorder floating-point sums, so results agree with the reference
// to rounding, not bitwise.

namespace mcflow::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  /// sum_i |v_i|^p * w_i for integer p >= 0 (p = 0 gives sum_i w_i).
  double (*weighted_power_sum)(const double* v, const double* w, std::size_t n, int p);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*max_abs)(const double* v, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// out_i = a_i * b_i
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
};

bool isa_available(Isa isa);
const KernelTable& table(Isa isa);

Isa active_isa();
/// Overrides the runtime choice; throws if the ISA is unavailable on this host.
void set_active_isa(Isa isa);

double weighted_power_sum(std::span<const double> values, std::span<const double> weights, int p);
/// Real exponent; integral p in [0, 64] takes the vectorized path.
double weighted_real_power_sum(std::span<const double> values, std::span<const double> weights,
                               double p);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> values);
void axpy(double a, std::span<const double> x, std::span<double> y);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace mcflow::kernels

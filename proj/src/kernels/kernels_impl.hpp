// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mcflow/kernels.hpp"

namespace mcflow::kernels {

namespace scalar {
double weighted_power_sum(const double* v, const double* w, std::size_t n, int p);
double dot(const double* a, const double* b, std::size_t n);
double max_abs(const double* v, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void multiply(const double* a, const double* b, double* out, std::size_t n);
}  // namespace scalar

// Null when the variant was not compiled for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Power by repeated squaring; the vector variants follow the same sequence of
// multiplications per lane.
inline double ipow(double x, int p) {
  double result = 1.0;
  double base = x;
  while (p > 0) {
    if (p & 1) result *= base;
    base *= base;
    p >>= 1;
  }
  return result;
}

}  // namespace mcflow::kernels

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace mcflow::kernels {
namespace {

inline float64x2_t ipow_f64(float64x2_t x, int p) {
  float64x2_t result = vdupq_n_f64(1.0);
  float64x2_t base = x;
  while (p > 0) {
    if (p & 1) result = vmulq_f64(result, base);
    base = vmulq_f64(base, base);
    p >>= 1;
  }
  return result;
}

double weighted_power_sum(const double* v, const double* w, std::size_t n, int p) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, ipow_f64(vabsq_f64(vld1q_f64(v + i)), p), vld1q_f64(w + i));
    acc1 = vfmaq_f64(acc1, ipow_f64(vabsq_f64(vld1q_f64(v + i + 2)), p), vld1q_f64(w + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += ipow(std::fabs(v[i]), p) * w[i];
  return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double max_abs(const double* v, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(v + i)));
  double out = vmaxvq_f64(m);
  for (; i < n; ++i) out = std::max(out, std::fabs(v[i]));
  return out;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

const KernelTable kTable{Isa::Neon, &weighted_power_sum, &dot, &max_abs, &axpy, &multiply};

}  // namespace

const KernelTable* neon_table() { return &kTable; }

}  // namespace mcflow::kernels

#else

namespace mcflow::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace mcflow::kernels

#endif

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/kernels.hpp"

namespace mcflow::kernels {
const KernelTable* avx2_table();
}

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

// Everything here stays in an anonymous namespace and avoids shared inline or
// template helpers: a COMDAT copy built with -mavx2 could otherwise be picked
// by the linker for callers on the scalar path.

namespace mcflow::kernels {
namespace {

inline double max_lane(double a, double b) { return a < b ? b : a; }

inline double ipow_scalar(double x, int p) {
  double result = 1.0;
  double base = x;
  while (p > 0) {
    if (p & 1) result *= base;
    base *= base;
    p >>= 1;
  }
  return result;
}

inline __m256d abs_pd(__m256d x) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, x);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline __m256d ipow_pd(__m256d x, int p) {
  __m256d result = _mm256_set1_pd(1.0);
  __m256d base = x;
  while (p > 0) {
    if (p & 1) result = _mm256_mul_pd(result, base);
    base = _mm256_mul_pd(base, base);
    p >>= 1;
  }
  return result;
}

double weighted_power_sum(const double* v, const double* w, std::size_t n, int p) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d x0 = ipow_pd(abs_pd(_mm256_loadu_pd(v + i)), p);
    __m256d x1 = ipow_pd(abs_pd(_mm256_loadu_pd(v + i + 4)), p);
    acc0 = _mm256_fmadd_pd(x0, _mm256_loadu_pd(w + i), acc0);
    acc1 = _mm256_fmadd_pd(x1, _mm256_loadu_pd(w + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d x0 = ipow_pd(abs_pd(_mm256_loadu_pd(v + i)), p);
    acc0 = _mm256_fmadd_pd(x0, _mm256_loadu_pd(w + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += ipow_scalar(std::fabs(v[i]), p) * w[i];
  return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double max_abs(const double* v, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(v + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = max_lane(max_lane(lanes[0], lanes[1]), max_lane(lanes[2], lanes[3]));
  for (; i < n; ++i) out = max_lane(out, std::fabs(v[i]));
  return out;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

const KernelTable kTable{Isa::Avx2, &weighted_power_sum, &dot, &max_abs, &axpy, &multiply};

}  // namespace

const KernelTable* avx2_table() { return &kTable; }

}  // namespace mcflow::kernels

#else

namespace mcflow::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace mcflow::kernels

#endif

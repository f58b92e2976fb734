// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "mcflow/error.hpp"

namespace mcflow::kernels {
namespace {

const KernelTable kScalarTable{Isa::Scalar,   &scalar::weighted_power_sum, &scalar::dot,
                               &scalar::max_abs, &scalar::axpy,            &scalar::multiply};

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("MCFLOW_SIMD")) {
    std::string forced(env);
    if (forced == "scalar") return Isa::Scalar;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> active{&table(detect())};
  return active;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) raise(ErrorKind::FieldMismatch, "kernel operands differ in length");
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return avx2_table() != nullptr && cpu_has_avx2();
    case Isa::Neon: return neon_table() != nullptr;
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa))
    raise(ErrorKind::InvalidArgument, "kernel ISA not available: " + std::string(to_string(isa)));
  switch (isa) {
    case Isa::Avx2: return *avx2_table();
    case Isa::Neon: return *neon_table();
    case Isa::Scalar: break;
  }
  return kScalarTable;
}

Isa active_isa() { return current().load()->isa; }

void set_active_isa(Isa isa) { current().store(&table(isa)); }

double weighted_power_sum(std::span<const double> values, std::span<const double> weights, int p) {
  check_sizes(values.size(), weights.size());
  if (p < 0) raise(ErrorKind::InvalidArgument, "negative integer exponent");
  return current().load()->weighted_power_sum(values.data(), weights.data(), values.size(), p);
}

double weighted_real_power_sum(std::span<const double> values, std::span<const double> weights,
                               double p) {
  check_sizes(values.size(), weights.size());
  if (p >= 0.0 && p <= 64.0 && p == std::floor(p))
    return weighted_power_sum(values, weights, static_cast<int>(p));
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    acc += std::pow(std::fabs(values[i]), p) * weights[i];
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return current().load()->dot(a.data(), b.data(), a.size());
}

double max_abs(std::span<const double> values) {
  return current().load()->max_abs(values.data(), values.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  current().load()->axpy(a, x.data(), y.data(), x.size());
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  check_sizes(a.size(), b.size());
  check_sizes(a.size(), out.size());
  current().load()->multiply(a.data(), b.data(), out.data(), a.size());
}

}  // namespace mcflow::kernels

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mcflow/error.hpp"
#include "mcflow/kernels.hpp"
#include "support.hpp"

using namespace mcflow;
namespace k = mcflow::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

std::vector<k::Isa> vector_isas() {
  std::vector<k::Isa> out;
  for (k::Isa isa : {k::Isa::Avx2, k::Isa::Neon})
    if (k::isa_available(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 rng(1);
  const auto& s = k::table(k::Isa::Scalar);
  const auto v = random_vector(101, rng, -3.0, 3.0);
  const auto w = random_vector(101, rng, 0.0, 1.0);
  for (int p = 0; p <= 9; ++p) {
    double ref = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) ref += std::pow(std::fabs(v[i]), p) * w[i];
    CHECK(testing::rel(s.weighted_power_sum(v.data(), w.data(), v.size(), p), ref) < 1e-13);
  }
  double ref = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) ref += std::pow(std::fabs(v[i]), 2.5) * w[i];
  CHECK(testing::rel(k::weighted_real_power_sum(v, w, 2.5), ref) < 1e-13);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto isas = vector_isas();
  if (isas.empty()) {
    MESSAGE("no vector ISA available on this host; scalar only");
    return;
  }
  std::mt19937_64 rng(7);
  const auto& ref = k::table(k::Isa::Scalar);
  for (k::Isa isa : isas) {
    const auto& vec = k::table(isa);
    CHECK(vec.isa == isa);
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 1000, 4099}) {
      const auto a = random_vector(n, rng, -2.0, 2.0);
      const auto b = random_vector(n, rng, 0.0, 1.0);
      for (int p = 1; p <= 8; ++p) {
        const double x = ref.weighted_power_sum(a.data(), b.data(), n, p);
        const double y = vec.weighted_power_sum(a.data(), b.data(), n, p);
        CHECK(testing::rel(x, y, 1e-300) < 1e-12);
      }
      CHECK(testing::rel(ref.dot(a.data(), b.data(), n), vec.dot(a.data(), b.data(), n), 1e-12) < 1e-12);
      CHECK(ref.max_abs(a.data(), n) == vec.max_abs(a.data(), n));
      std::vector<double> y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      vec.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-15 * (1.0 + std::fabs(y1[i])));
      std::vector<double> m1(n), m2(n);
      ref.multiply(a.data(), b.data(), m1.data(), n);
      vec.multiply(a.data(), b.data(), m2.data(), n);
      CHECK(m1 == m2);
    }
  }
}

TEST_CASE("runtime selection switches tables and rejects unavailable ISAs") {
  const k::Isa original = k::active_isa();
  std::mt19937_64 rng(3);
  const auto a = random_vector(257, rng, -1.0, 1.0);
  const auto w = random_vector(257, rng, 0.0, 1.0);
  k::set_active_isa(k::Isa::Scalar);
  CHECK(k::active_isa() == k::Isa::Scalar);
  const double scalar = k::weighted_power_sum(a, w, 4);
  for (k::Isa isa : vector_isas()) {
    k::set_active_isa(isa);
    CHECK(testing::rel(k::weighted_power_sum(a, w, 4), scalar) < 1e-12);
  }
  for (k::Isa isa : {k::Isa::Avx2, k::Isa::Neon})
    if (!k::isa_available(isa)) CHECK_THROWS_AS(k::set_active_isa(isa), Error);
  k::set_active_isa(original);
  CHECK_THROWS_AS(k::dot(a, std::span<const double>(w.data(), 3)), Error);
}

// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "mcflow/surface.hpp"

namespace mcflow {

struct RemeshParams {
  double target_edge = 0.0;
  double split_ratio = 4.0 / 3.0;     // split edges longer than split_ratio * target
  double collapse_ratio = 4.0 / 5.0;  // collapse edges shorter than collapse_ratio * target
  int relax_iterations = 2;
  double relax_strength = 0.5;
  std::size_t max_vertices = 200000;
  std::size_t min_vertices = 8;
};

struct RemeshResult {
  DiscreteHypersurface surface;
  int splits = 0;
  int collapses = 0;
};

/// True when some edge lies outside [collapse_ratio, split_ratio] * target.
bool needs_remesh(const DiscreteHypersurface& surface, const RemeshParams& params);

/// Edge splits, then edge collapses, then tangential relaxation of the
/// vertices touched by either. New and merged vertices are placed on the
/// cubic (PN-triangle style) edge curve through the endpoints and their
/// normals. No per-vertex data is carried over; caches are recomputed.
RemeshResult remesh(const DiscreteHypersurface& surface, const RemeshParams& params);

}  // namespace mcflow

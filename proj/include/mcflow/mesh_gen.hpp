// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "mcflow/surface.hpp"

namespace mcflow {

/// Subdivided icosahedron projected onto the sphere: 10 * 4^level + 2 vertices.
DiscreteHypersurface make_icosphere(int level, double radius = 1.0, const Vec3& center = Vec3::Zero());

/// Icosphere with vertices scaled by the semi-axes.
DiscreteHypersurface make_ellipsoid(int level, const Vec3& semi_axes);

/// Star-shaped perturbation r = radius * (1 + amplitude * b(x)) of an
/// icosphere, where b is a random combination of degree 2..4 harmonics
/// normalized to max |b| = 1.
DiscreteHypersurface make_bumpy_sphere(int level, double radius, double amplitude, std::uint64_t seed);

/// Regular polygon inscribed in the circle of the given radius.
DiscreteHypersurface make_circle(int vertex_count, double radius = 1.0);

/// Polygon through equally spaced parameter samples of an ellipse.
DiscreteHypersurface make_ellipse(int vertex_count, double semi_x, double semi_y);

}  // namespace mcflow

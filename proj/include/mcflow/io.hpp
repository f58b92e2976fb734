// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "mcflow/surface.hpp"

namespace mcflow::io {

/// ASCII Wavefront OBJ: `v x y z` and triangular `f a b c` records (1-based,
/// `a/b/c` index forms accepted). Other records are ignored.
DiscreteHypersurface read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const DiscreteHypersurface& mesh);

/// JSON array of [x, y] points; the loop closes implicitly.
DiscreteHypersurface read_curve_json(const std::filesystem::path& path);
void write_curve_json(const std::filesystem::path& path, const DiscreteHypersurface& curve);

/// Dispatches on extension: `.obj` meshes, `.json` curves.
DiscreteHypersurface read_surface(const std::filesystem::path& path);
void write_surface(const std::filesystem::path& path, const DiscreteHypersurface& surface);
/// `.obj` or `.curve.json`, matching write_surface.
std::string surface_extension(int dimension);

/// One value per line, vertex order.
ScalarField read_field_csv(const std::filesystem::path& path);
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace mcflow::io

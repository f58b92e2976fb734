// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mcflow/flow.hpp"

namespace mcflow::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 420;
};

/// Self-contained SVG line chart. The data table is embedded as a comment
/// (one "name,x,y" row per point). Non-finite points and, with log_y,
/// nonpositive points are skipped.
std::string line_chart(const std::vector<Series>& series, const ChartOptions& options);

/// Outlines of the given snapshots in the xy plane: the polygon for curves,
/// the cross-section with the plane z = z_centroid(initial) for meshes.
std::string silhouettes(const FlowTrajectory& trajectory, const std::vector<std::size_t>& snapshot_indices,
                        const std::string& title);

}  // namespace mcflow::svg

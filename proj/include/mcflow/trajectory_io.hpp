// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflow/flow.hpp"

namespace mcflow {

inline constexpr const char* kToolVersion = "0.3.0";

/// Constants the analysis stages read from a run.
struct AnalysisParams {
  double c_n = 1.0;
  double c0 = 1.0;
  /// Gronwall constant; zero means "take the keybound estimate".
  double c = 0.0;
  double tau1 = 0.05;
  double q_sob = 10.0;
};

struct InputFile {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  AnalysisParams analysis;
  std::vector<std::string> functionals{"mixed:4,4", "sublog", "super"};
  std::vector<InputFile> inputs;
  /// Free-form origin notes (rescale source, factor, mode, seed).
  std::map<std::string, std::string> provenance;
};

nlohmann::json to_json(const FlowConfig& config);
FlowConfig flow_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnalysisParams& params);
AnalysisParams analysis_params_from_json(const nlohmann::json& j);

/// The manifest document without snapshot geometry.
nlohmann::json manifest_json(const FlowTrajectory& trajectory, const RunManifest& manifest);

/// Writes manifest.json, snapshots/t_<record>.obj (or .curve.json) and
/// series.csv under dir.
void write_trajectory(const std::filesystem::path& dir, const FlowTrajectory& trajectory,
                      const RunManifest& manifest);

struct LoadedTrajectory {
  FlowTrajectory trajectory;
  RunManifest manifest;
};

/// Inverse of write_trajectory. Consecutive snapshots with identical
/// connectivity share one face list.
LoadedTrajectory read_trajectory(const std::filesystem::path& dir);

/// Per-record table: t, dt, vertices, sup_a, sup_h, measure, one column per
/// recorded power, the log and supercritical integrals.
std::string series_csv(const FlowTrajectory& trajectory);

/// Exclusive ownership of an output directory for one invocation. Creates
/// the directory and a lock file; throws Io when already locked.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path lock_path_;
  int fd_ = -1;
};

}  // namespace mcflow

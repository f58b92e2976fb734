// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcflow {

enum class ErrorKind {
  NonManifold,
  Degenerate,
  FieldMismatch,
  SolveFailure,
  InsufficientData,
  TrajectoryTooShort,
  ZeroDenominator,
  UnsupportedDimension,
  ExponentOrder,
  SubcriticalExponent,
  EmptyRegion,
  TrajectoryRange,
  BelowThreshold,
  DomainError,
  MissingMonitors,
  OutOfRange,
  ShapeMismatch,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI)
/// can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace mcflow

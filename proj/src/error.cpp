// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/error.hpp"

namespace mcflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonManifold: return "NonManifold";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::FieldMismatch: return "FieldMismatch";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::TrajectoryTooShort: return "TrajectoryTooShort";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::ExponentOrder: return "ExponentOrder";
    case ErrorKind::SubcriticalExponent: return "SubcriticalExponent";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::TrajectoryRange: return "TrajectoryRange";
    case ErrorKind::BelowThreshold: return "BelowThreshold";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::MissingMonitors: return "MissingMonitors";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace mcflow

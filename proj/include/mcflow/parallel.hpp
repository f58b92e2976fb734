// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace mcflow {

/// Worker count: hardware concurrency, capped by MCFLOW_THREADS when set.
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. The first
/// exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mcflow

// Copyright 2026 The bcclust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace bcc {

/// Worker count used by parallel loops. Resolution order: a value set with
/// set_worker_count(), then the BC_THREADS environment variable, then the
/// hardware concurrency. 0 in either place means "auto".
std::size_t worker_count();

/// Overrides the worker count for this process; 0 restores the default.
void set_worker_count(std::size_t workers);

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on each,
/// possibly concurrently. Callers must not depend on chunk boundaries.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 512);

}  // namespace bcc

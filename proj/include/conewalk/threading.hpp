// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace conewalk {

// Worker count: explicit value, else CONEWALK_THREADS, else hardware concurrency.
int resolve_threads(int requested);

// Runs fn(chunk) for every chunk in [0, nchunks). Chunk-to-worker assignment is
// dynamic, so fn must write only chunk-indexed slots; callers combine results
// in chunk order. That contract makes every caller schedule-independent.
void parallel_chunks(std::size_t nchunks,
                     int threads,
                     std::function<void(std::size_t)> const& fn);

}  // namespace conewalk

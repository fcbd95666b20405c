#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace pitchtrack {

using Rng = std::mt19937_64;

// Worker-pool bound: PITCHTRACK_THREADS when set, hardware concurrency
// otherwise, never less than 1.
int worker_count();

// Runs fn(i) for i in [0, n). Fans out across worker_count() threads when
// it pays off; callers must only write to disjoint, index-addressed slots.
void parallel_for(int n, const std::function<void(int)>& fn);

// `git describe --always --dirty` of the working tree, or "unknown".
std::string git_describe();

std::string timestamp_utc();

}  // namespace pitchtrack

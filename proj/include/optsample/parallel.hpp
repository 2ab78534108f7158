#pragma once

#include <cstddef>
#include <functional>

namespace optsample {

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// hardware default.
void set_max_threads(std::size_t threads);
std::size_t max_threads();

/// Runs body(i) for i in [0, count). Each index must write only to its own
/// output slot; results are then independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace optsample

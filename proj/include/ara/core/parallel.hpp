#pragma once

#include <cstddef>
#include <functional>

namespace ara {

// Runs fn(i) for i in [0, count). Work is handed out through an atomic
// counter; fn must write only to its own slot. The first exception thrown
// by any worker is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

std::size_t default_workers();

}  // namespace ara

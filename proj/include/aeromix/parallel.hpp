#pragma once

#include <cstddef>
#include <functional>

namespace aeromix {

// Process-wide worker cap for parallel_for. The thread count never changes
// results: the index range is partitioned deterministically and each task
// must write only to its own output slot.
void set_max_threads(int n);
int max_threads();

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace aeromix

#pragma once

#include <cstddef>
#include <functional>

namespace kir {

// Worker count used by parallel_for. Defaults to the KIR_THREADS
// environment variable if set, otherwise hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t n);  // 0 restores the default

// Runs fn(i) for i in [begin, end) on a static block partition.
// Callers must write results into per-index slots: outputs may not depend
// on scheduling, so any reduction happens in index order afterwards.
// Nested calls run serially to avoid oversubscription.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace kir

#pragma once

#include <cstddef>
#include <functional>

namespace thermo {

// Thread count resolution: explicit value if positive, otherwise the
// THERMO_THREADS environment variable, otherwise hardware concurrency.
unsigned resolve_threads(int requested);

// Runs body(i) for i in [0, n) on up to `threads` workers with a static
// contiguous partition.  Callers write results into slot i so the output is
// independent of scheduling.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

// Pairwise (tree) summation; the result does not depend on thread count.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace thermo

#ifndef TRAPFORGE_PARALLEL_HPP
#define TRAPFORGE_PARALLEL_HPP

#include <functional>

namespace trapforge {

/// Worker cap: min(hardware_concurrency, TRAP_FORGE_THREADS when set).
int max_threads();

/// Run fn(i) for i in [0, count), on up to max_threads() workers by
/// default or `workers` when positive. Iterations must be independent;
/// results are deterministic because each index writes only its own
/// output.
void parallel_for(int count, const std::function<void(int)>& fn, int workers = 0);

}  // namespace trapforge

#endif

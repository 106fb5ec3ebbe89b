#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace fpfv {

/// Number of worker threads used by the numerical kernels (default 1).
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(begin, end) over [0, n) split into contiguous blocks, one per
/// worker. Bodies must write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Block size used by deterministic reductions. Partial sums are formed per
/// block and then added in block order, so the result does not depend on the
/// thread count.
inline constexpr std::size_t kReductionBlock = 4096;

/// Deterministic sum of term(i) for i in [0, n).
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Deterministic sum of a span.
double deterministic_sum(std::span<const double> values);

}  // namespace fpfv

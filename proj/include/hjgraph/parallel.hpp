#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace hjgraph::parallel {

/// Worker count used by parallel_for. Clamped to >= 1.
void set_threads(int count);
int threads();

/// Runs body(begin, end) over disjoint contiguous chunks of [0, n). Bodies must
/// only write to indices inside their own chunk.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (tree) summation in a fixed order; the result does not depend on
/// the worker count.
double pairwise_sum(std::span<const double> values);

}  // namespace hjgraph::parallel

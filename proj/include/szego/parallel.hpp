#pragma once

// Data-parallel inner loops. Each kernel has a serial reference with the same
// signature; both produce bit-identical results for any thread count because
// work is split into fixed chunks whose partial results are combined in chunk
// order.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "szego/convex_geometry.hpp"

namespace szego::kernels {

inline constexpr std::size_t kMonteCarloChunk = 1u << 14;

/// Number of uniform samples of the box [-radius, radius]^n inside s.
std::size_t count_inside_serial(const SublevelSet& s, double radius, std::size_t samples,
                                std::uint64_t seed);
std::size_t count_inside_parallel(const SublevelSet& s, double radius, std::size_t samples,
                                  std::uint64_t seed);

/// Evaluates fn(i) for i in [0, count) into out[i]. Rows are independent.
void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& fn);
void for_each_index_parallel(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Sets the OpenMP thread count; n <= 0 leaves the runtime default.
void set_threads(int n);
int max_threads();

}  // namespace szego::kernels

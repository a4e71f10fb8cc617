#include "szego/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>

#include "szego/random.hpp"

namespace szego::kernels {

namespace {

std::size_t count_chunk(const SublevelSet& s, double radius, std::size_t chunk, std::size_t begin,
                        std::size_t end, std::uint64_t seed) {
  CounterRng rng(seed, chunk);
  const int n = s.dim();
  Vec v(n);
  std::size_t hits = 0;
  for (std::size_t k = begin; k < end; ++k) {
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(-radius, radius);
    if (s.g(v) <= s.level) ++hits;
  }
  return hits;
}

}  // namespace

std::size_t count_inside_serial(const SublevelSet& s, double radius, std::size_t samples,
                                std::uint64_t seed) {
  const std::size_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::size_t hits = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * kMonteCarloChunk;
    const std::size_t end = std::min(samples, begin + kMonteCarloChunk);
    hits += count_chunk(s, radius, c, begin, end, seed);
  }
  return hits;
}

std::size_t count_inside_parallel(const SublevelSet& s, double radius, std::size_t samples,
                                  std::uint64_t seed) {
  const long long chunks = static_cast<long long>((samples + kMonteCarloChunk - 1) / kMonteCarloChunk);
  std::size_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (long long c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kMonteCarloChunk;
    const std::size_t end = std::min(samples, begin + kMonteCarloChunk);
    hits += count_chunk(s, radius, static_cast<std::size_t>(c), begin, end, seed);
  }
  return hits;
}

void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < count; ++i) fn(i);
}

void for_each_index_parallel(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(szego_for_each_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace szego::kernels

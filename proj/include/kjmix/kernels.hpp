#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace kjmix::kernels {

/// Execution policy for the data-parallel kernels. The serial path runs the
/// exact same block decomposition and fold order as the OpenMP path, so the
/// two produce bit-identical results; it is kept as the reference
/// implementation for tests and the benchmark.
enum class Exec { parallel, serial };

/// Fixed block width. Summation order depends only on this constant, never on
/// the thread count, which keeps reductions bit-reproducible.
inline constexpr std::size_t block_width = 4096;

/// Sum of term(i) for i in [0, n), blocked pairwise: per-block serial sums,
/// then a serial fold of the block partials in index order.
template <class F>
double blocked_sum(std::size_t n, F&& term, Exec exec = Exec::parallel) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + block_width - 1) / block_width;
  std::vector<double> partial(nblocks);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * block_width;
      const std::size_t hi = lo + block_width < n ? lo + block_width : n;
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += term(i);
      partial[static_cast<std::size_t>(b)] = s;
    }
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t lo = b * block_width;
      const std::size_t hi = lo + block_width < n ? lo + block_width : n;
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += term(i);
      partial[b] = s;
    }
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// As blocked_sum but with K accumulators; term(i) returns std::array<double, K>.
template <std::size_t K, class F>
std::array<double, K> blocked_sum_array(std::size_t n, F&& term, Exec exec = Exec::parallel) {
  std::array<double, K> total{};
  if (n == 0) return total;
  const std::size_t nblocks = (n + block_width - 1) / block_width;
  std::vector<std::array<double, K>> partial(nblocks);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * block_width;
      const std::size_t hi = lo + block_width < n ? lo + block_width : n;
      std::array<double, K> s{};
      for (std::size_t i = lo; i < hi; ++i) {
        const std::array<double, K> t = term(i);
        for (std::size_t k = 0; k < K; ++k) s[k] += t[k];
      }
      partial[static_cast<std::size_t>(b)] = s;
    }
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t lo = b * block_width;
      const std::size_t hi = lo + block_width < n ? lo + block_width : n;
      std::array<double, K> s{};
      for (std::size_t i = lo; i < hi; ++i) {
        const std::array<double, K> t = term(i);
        for (std::size_t k = 0; k < K; ++k) s[k] += t[k];
      }
      partial[b] = s;
    }
  }
  for (const auto& p : partial)
    for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
  return total;
}

/// Independent per-element writes; fine-grained, statically scheduled.
/// body(i) must not throw.
template <class F>
void parallel_for(std::size_t n, F&& body, Exec exec = Exec::parallel) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
      body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

/// Independent coarse tasks (multi-start fits, study replicates); dynamically
/// scheduled. Each task writes only to its own output slot, so scheduling
/// never affects results. body(i) must not throw; record failures per slot.
template <class F>
void parallel_tasks(std::size_t n, F&& body, Exec exec = Exec::parallel) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
      body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace kjmix::kernels

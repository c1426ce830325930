#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

namespace genbound {

namespace detail {

inline constexpr std::size_t kPairwiseLeaf = 8;

inline double pairwise_sum(const double* data, std::size_t count) {
  if (count <= kPairwiseLeaf) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

}  // namespace detail

/// Fixed-shape pairwise (tree) summation. The tree depends only on the length
/// of the input, so the result is a pure function of the ordered values.
inline double deterministic_sum(std::span<const double> values) {
  return detail::pairwise_sum(values.data(), values.size());
}

/// Evaluates `fn(i)` for i in [0, count) and stores the results in index
/// order. Work is split into contiguous blocks across `threads` workers; the
/// output does not depend on the thread count.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using T = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<T> out(count);
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count / 64, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace genbound

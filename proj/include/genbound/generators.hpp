#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "genbound/errors.hpp"
#include "genbound/random.hpp"
#include "genbound/types.hpp"

namespace genbound {

/// m x n class with entries uniform in [-b, b].
inline EvaluatedClass random_class(std::size_t m, std::size_t n, double envelope, std::uint64_t seed) {
  StreamRng rng(seed, 0x636c617373ULL);
  std::vector<double> buf(m * n);
  for (auto& v : buf) v = envelope * (2.0 * rng.uniform() - 1.0);
  return EvaluatedClass(m, n, std::move(buf), envelope);
}

/// Random probability vector on `size` atoms (normalized exponentials), with
/// the last atom absorbing rounding so the total is 1 to within an ulp.
inline std::vector<double> random_probabilities(std::size_t size, std::uint64_t seed) {
  if (size == 0) throw InvalidArgument("support must be nonempty");
  StreamRng rng(seed, 0x70726f6273ULL);
  std::vector<double> p(size);
  double total = 0.0;
  for (auto& v : p) {
    v = -std::log(rng.uniform_positive()) + 0.05;
    total += v;
  }
  double head = 0.0;
  for (std::size_t s = 0; s + 1 < size; ++s) {
    p[s] /= total;
    head += p[s];
  }
  p.back() = 1.0 - head;
  return p;
}

/// Tabulated class of m functions on `support` atoms with values uniform in
/// [-b, b] and random atom probabilities.
inline SupportTable random_table(std::size_t support, std::size_t m, double envelope,
                                 std::uint64_t seed) {
  StreamRng rng(seed, 0x7461626c65ULL);
  std::vector<std::vector<double>> values(m, std::vector<double>(support));
  for (auto& row : values)
    for (auto& v : row) v = envelope * (2.0 * rng.uniform() - 1.0);
  return SupportTable(std::move(values), random_probabilities(support, seed), envelope);
}

}  // namespace genbound

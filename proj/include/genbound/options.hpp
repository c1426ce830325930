#pragma once

#include <cstddef>
#include <cstdint>

namespace genbound {

/// Caps on exhaustive computations. Exceeding one raises ExactEnumerationLimit.
struct Limits {
  unsigned max_sign_bits = 20;                  // 2^20 sign vectors
  std::uint64_t max_product_tuples = 1'000'000; // |support|^n
  std::size_t max_exact_cover_rows = 16;
  std::uint64_t max_grid_functions = 1u << 20;
};

struct Tolerances {
  double exact_equality = 1e-10;  // identities checked by full enumeration
  double inequality = 1e-10;      // lhs <= rhs + tol
  double invariant = 1e-12;       // type invariants and bounded differences
};

struct Options {
  Limits limits{};
  Tolerances tolerances{};
  unsigned threads = 1;
};

}  // namespace genbound

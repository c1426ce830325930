#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "genbound/errors.hpp"
#include "genbound/options.hpp"
#include "genbound/types.hpp"

namespace genbound {

/// One sign vector sigma in {-1,+1}^n packed into a word: bit k set means
/// sigma_k = -1. Word 0 is the all-plus vector.
struct SignAssignment {
  std::uint64_t bits = 0;
  unsigned n = 0;

  int operator[](unsigned k) const noexcept { return ((bits >> k) & 1u) ? -1 : 1; }

  std::vector<int> decode() const {
    std::vector<int> out(n);
    for (unsigned k = 0; k < n; ++k) out[k] = (*this)[k];
    return out;
  }

  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;
};

/// All 2^n sign vectors in ascending bit-word order.
class SignRange {
 public:
  class iterator {
   public:
    using value_type = SignAssignment;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(std::uint64_t word, unsigned n) : word_(word), n_(n) {}

    SignAssignment operator*() const noexcept { return {word_, n_}; }
    iterator& operator++() noexcept {
      ++word_;
      return *this;
    }
    iterator operator++(int) noexcept {
      auto tmp = *this;
      ++word_;
      return tmp;
    }
    friend bool operator==(const iterator&, const iterator&) = default;

   private:
    std::uint64_t word_ = 0;
    unsigned n_ = 0;
  };

  explicit SignRange(unsigned n) : n_(n) {}

  iterator begin() const { return {0, n_}; }
  iterator end() const { return {std::uint64_t{1} << n_, n_}; }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << n_; }
  unsigned length() const noexcept { return n_; }

 private:
  unsigned n_;
};

namespace detail {

inline void require_sign_cap(std::size_t n, const Limits& limits) {
  const unsigned cap = limits.max_sign_bits < 63 ? limits.max_sign_bits : 62;
  if (n > cap)
    throw ExactEnumerationLimit("sign enumeration over n=" + std::to_string(n) + " coordinates", n,
                                cap);
}

/// base^exp, saturating at UINT64_MAX.
inline std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

inline void require_tuple_cap(const std::string& what, std::uint64_t tuples, const Limits& limits) {
  if (tuples > limits.max_product_tuples)
    throw ExactEnumerationLimit(what, tuples, limits.max_product_tuples);
}

/// Mixed-radix decode: coordinate k of tuple `index` is digit k (least
/// significant first) in base `support`.
inline void decode_tuple(std::uint64_t index, std::size_t support, std::span<std::size_t> out) {
  for (auto& digit : out) {
    digit = static_cast<std::size_t>(index % support);
    index /= support;
  }
}

inline double tuple_weight(std::span<const std::size_t> tuple, std::span<const double> probs) {
  double w = 1.0;
  for (std::size_t s : tuple) w *= probs[s];
  return w;
}

}  // namespace detail

inline SignRange enumerate_signs(unsigned n, const Limits& limits = {}) {
  if (n == 0) throw InvalidArgument("sign enumeration needs n >= 1");
  detail::require_sign_cap(n, limits);
  return SignRange(n);
}

struct ProductTuple {
  std::vector<std::size_t> indices;  // support index per coordinate
  double weight = 0.0;               // product of coordinate probabilities
};

/// All |support|^n tuples of the product measure, coordinate 0 varying fastest.
class ProductRange {
 public:
  class iterator {
   public:
    using value_type = ProductTuple;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const ProductRange* range, std::uint64_t index) : range_(range), index_(index) {}

    ProductTuple operator*() const { return range_->at(index_); }
    iterator& operator++() noexcept {
      ++index_;
      return *this;
    }
    iterator operator++(int) noexcept {
      auto tmp = *this;
      ++index_;
      return tmp;
    }
    friend bool operator==(const iterator& a, const iterator& b) noexcept {
      return a.index_ == b.index_;
    }

   private:
    const ProductRange* range_ = nullptr;
    std::uint64_t index_ = 0;
  };

  ProductRange(std::vector<double> probs, std::size_t n, std::uint64_t count)
      : probs_(std::move(probs)), n_(n), count_(count) {}

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, count_}; }
  std::uint64_t size() const noexcept { return count_; }
  std::size_t length() const noexcept { return n_; }

  ProductTuple at(std::uint64_t index) const {
    ProductTuple t;
    t.indices.resize(n_);
    detail::decode_tuple(index, probs_.size(), t.indices);
    t.weight = detail::tuple_weight(t.indices, probs_);
    return t;
  }

 private:
  std::vector<double> probs_;
  std::size_t n_;
  std::uint64_t count_;
};

inline ProductRange enumerate_product(std::span<const double> probs, std::size_t n,
                                      const Limits& limits = {}) {
  if (n == 0) throw InvalidArgument("product enumeration needs n >= 1");
  const std::uint64_t count = detail::saturating_pow(probs.size(), n);
  detail::require_tuple_cap("product enumeration over |support|^n tuples", count, limits);
  return ProductRange(std::vector<double>(probs.begin(), probs.end()), n, count);
}

inline ProductRange enumerate_product(const DiscreteDistribution& dist, std::size_t n,
                                      const Limits& limits = {}) {
  return enumerate_product(dist.probs(), n, limits);
}

}  // namespace genbound

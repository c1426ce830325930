#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "genbound/errors.hpp"
#include "genbound/types.hpp"

namespace genbound {

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream. Stream `index` under `seed` is a fixed
/// sequence, so draws and trials can be handed to any worker in any order.
/// Satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t index) noexcept
      : state_(detail::mix64(seed ^ detail::mix64(index + 0x9e3779b97f4a7c15ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_positive() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Index in [0, bound) by multiply-shift (bias < 2^-64 * bound).
  std::size_t below(std::size_t bound) noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

  double normal() {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(*this);
  }

 private:
  std::uint64_t state_;
};

/// Draws support indices of a discrete distribution by inverse CDF.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> probs) {
    cumulative_.resize(probs.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) {
      acc += probs[s];
      cumulative_[s] = acc;
    }
    last_positive_ = 0;
    for (std::size_t s = 0; s < probs.size(); ++s)
      if (probs[s] > 0.0) last_positive_ = s;
  }

  std::size_t index(StreamRng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto s = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(s, last_positive_);
  }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

// Point samplers for the Monte Carlo paths. Each is a callable
// `Point(StreamRng&)`.

class DiscretePointSampler {
 public:
  explicit DiscretePointSampler(DiscreteDistribution dist)
      : dist_(std::move(dist)), sampler_(dist_.probs()) {}
  Point operator()(StreamRng& rng) const { return dist_.support()[sampler_.index(rng)]; }

 private:
  DiscreteDistribution dist_;
  DiscreteSampler sampler_;
};

class PointMassSampler {
 public:
  explicit PointMassSampler(Point x) : x_(std::move(x)) {}
  Point operator()(StreamRng&) const { return x_; }

 private:
  Point x_;
};

/// Uniform on the axis-aligned box [low, high]^d.
class UniformBoxSampler {
 public:
  UniformBoxSampler(std::size_t d, double low, double high) : d_(d), low_(low), high_(high) {
    if (d == 0) throw InvalidArgument("dimension must be >= 1");
    if (!(low < high)) throw InvalidArgument("box requires low < high");
  }
  Point operator()(StreamRng& rng) const {
    Point x(d_);
    for (auto& v : x) v = low_ + (high_ - low_) * rng.uniform();
    return x;
  }

 private:
  std::size_t d_;
  double low_, high_;
};

class GaussianSampler {
 public:
  GaussianSampler(std::size_t d, double sigma) : d_(d), sigma_(sigma) {
    if (d == 0) throw InvalidArgument("dimension must be >= 1");
    if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be nonnegative");
  }
  Point operator()(StreamRng& rng) const {
    std::normal_distribution<double> g(0.0, 1.0);
    Point x(d_);
    for (auto& v : x) v = sigma_ * g(rng);
    return x;
  }

 private:
  std::size_t d_;
  double sigma_;
};

/// Uniform on the sphere of the given radius.
class SphereSampler {
 public:
  SphereSampler(std::size_t d, double radius) : d_(d), radius_(radius) {
    if (d == 0) throw InvalidArgument("dimension must be >= 1");
    if (!(radius >= 0.0)) throw InvalidArgument("radius must be nonnegative");
  }
  Point operator()(StreamRng& rng) const {
    std::normal_distribution<double> g(0.0, 1.0);
    Point x(d_);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& v : x) {
        v = g(rng);
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double scale = radius_ / std::sqrt(norm2);
    for (auto& v : x) v *= scale;
    return x;
  }

 private:
  std::size_t d_;
  double radius_;
};

template <class S>
concept PointSampler = requires(const S& s, StreamRng& rng) {
  { s(rng) } -> std::convertible_to<Point>;
};

}  // namespace genbound

#pragma once

#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "genbound/errors.hpp"
#include "genbound/types.hpp"

namespace genbound {

/// A finite indexed family {f_i : X -> R} with a uniform envelope.
template <class F>
concept FunctionFamily = requires(const F& f, std::size_t i, const Point& x) {
  { f.size() } -> std::convertible_to<std::size_t>;
  { f.envelope() } -> std::convertible_to<double>;
  { f(i, x) } -> std::convertible_to<double>;
};

/// Builds the evaluated class of a sample: a callable
/// `EvaluatedClass(std::span<const Point>)`.
template <class B>
concept ClassBuilder = requires(const B& b, std::span<const Point> sample) {
  { b(sample) } -> std::convertible_to<EvaluatedClass>;
};

/// f_i(x) = <w_i, x>.
class LinearFamily {
 public:
  LinearFamily(std::vector<Point> weights, double envelope)
      : weights_(std::move(weights)), envelope_(envelope) {
    if (weights_.empty()) throw InvalidArgument("linear family needs at least one weight vector");
    for (const auto& w : weights_)
      if (w.size() != weights_.front().size())
        throw DimensionMismatch("weight vectors have differing dimensions");
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double envelope() const noexcept { return envelope_; }
  const std::vector<Point>& weights() const noexcept { return weights_; }

  double operator()(std::size_t i, const Point& x) const {
    const auto& w = weights_[i];
    if (x.size() != w.size()) throw DimensionMismatch("input and weight dimensions differ");
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * x[j];
    return acc;
  }

 private:
  std::vector<Point> weights_;
  double envelope_;
};

/// Adapts a callable `double(std::size_t i, const Point& x)`.
template <class Fn>
class LambdaFamily {
 public:
  LambdaFamily(std::size_t m, double envelope, Fn fn) : m_(m), envelope_(envelope), fn_(std::move(fn)) {
    if (m_ == 0) throw InvalidArgument("family must contain at least one function");
  }
  std::size_t size() const noexcept { return m_; }
  double envelope() const noexcept { return envelope_; }
  double operator()(std::size_t i, const Point& x) const { return fn_(i, x); }

 private:
  std::size_t m_;
  double envelope_;
  Fn fn_;
};

template <FunctionFamily F>
EvaluatedClass evaluate(const F& family, std::span<const Point> sample,
                        std::optional<std::vector<double>> population_means = std::nullopt) {
  const std::size_t m = family.size();
  const std::size_t n = sample.size();
  std::vector<double> buf(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k) buf[i * n + k] = family(i, sample[k]);
  return EvaluatedClass(m, n, std::move(buf), family.envelope(), std::move(population_means));
}

template <FunctionFamily F>
EvaluatedClass evaluate(const F& family, const Sample& sample,
                        std::optional<std::vector<double>> population_means = std::nullopt) {
  return evaluate(family, sample.points(), std::move(population_means));
}

/// Tabulates the family on the support of `dist`; population means become
/// exact weighted sums.
template <FunctionFamily F>
SupportTable tabulate(const F& family, const DiscreteDistribution& dist) {
  std::vector<std::vector<double>> values(family.size(), std::vector<double>(dist.size()));
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t s = 0; s < dist.size(); ++s) values[i][s] = family(i, dist.support()[s]);
  return SupportTable(std::move(values), dist.probs(), family.envelope());
}

/// A ClassBuilder that evaluates `family` on each sample, attaching fixed
/// population means when given.
template <FunctionFamily F>
auto builder_for(F family, std::optional<std::vector<double>> population_means = std::nullopt) {
  return [family = std::move(family), means = std::move(population_means)](
             std::span<const Point> sample) { return evaluate(family, sample, means); };
}

}  // namespace genbound

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "genbound/errors.hpp"
#include "genbound/reduce.hpp"

namespace genbound {

using Point = std::vector<double>;

inline constexpr double kInvariantSlack = 1e-12;
inline constexpr double kProbabilitySumTolerance = 1e-12;

/// Ordered sample of n >= 1 points of a common dimension.
class Sample {
 public:
  explicit Sample(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidArgument("sample must contain at least one point");
    for (const auto& p : points_) {
      if (p.size() != points_.front().size())
        throw DimensionMismatch("sample points have differing dimensions");
    }
  }

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dimension() const noexcept { return points_.front().size(); }
  const Point& operator[](std::size_t k) const { return points_[k]; }
  std::span<const Point> points() const noexcept { return points_; }

 private:
  std::vector<Point> points_;
};

/// Non-owning row-major view of an m x n evaluation matrix.
struct ClassView {
  std::span<const double> data;
  std::size_t m = 0;
  std::size_t n = 0;

  double operator()(std::size_t i, std::size_t k) const { return data[i * n + k]; }
  std::span<const double> row(std::size_t i) const { return data.subspan(i * n, n); }
};

/// A hypothesis class restricted to a sample: evals(i, k) = f_i(S_k), with a
/// uniform envelope |f_i| <= b and optional population means E[f_i(X)].
class EvaluatedClass {
 public:
  EvaluatedClass(std::vector<std::vector<double>> rows, double envelope,
                 std::optional<std::vector<double>> population_means = std::nullopt)
      : envelope_(envelope), means_(std::move(population_means)) {
    if (rows.empty()) throw InvalidArgument("class must contain at least one function (m >= 1)");
    m_ = rows.size();
    n_ = rows.front().size();
    if (n_ == 0) throw InvalidArgument("class must be evaluated on n >= 1 points");
    data_.reserve(m_ * n_);
    for (const auto& r : rows) {
      if (r.size() != n_) throw DimensionMismatch("class rows have differing lengths");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    validate();
  }

  EvaluatedClass(std::size_t m, std::size_t n, std::vector<double> row_major, double envelope,
                 std::optional<std::vector<double>> population_means = std::nullopt)
      : data_(std::move(row_major)), m_(m), n_(n), envelope_(envelope),
        means_(std::move(population_means)) {
    if (m_ == 0) throw InvalidArgument("class must contain at least one function (m >= 1)");
    if (n_ == 0) throw InvalidArgument("class must be evaluated on n >= 1 points");
    if (data_.size() != m_ * n_) throw DimensionMismatch("evaluation buffer is not m x n");
    validate();
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  double envelope() const noexcept { return envelope_; }
  double operator()(std::size_t i, std::size_t k) const { return data_[i * n_ + k]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * n_, n_);
  }
  std::span<const double> data() const noexcept { return data_; }
  ClassView view() const noexcept { return {data_, m_, n_}; }

  const std::optional<std::vector<double>>& population_means() const noexcept { return means_; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(m_);
    for (std::size_t i = 0; i < m_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
  }

  /// Returns a copy scaled by c (envelope scaled by |c|).
  EvaluatedClass scaled(double c) const {
    std::vector<double> d(data_);
    for (auto& v : d) v *= c;
    std::optional<std::vector<double>> mu = means_;
    if (mu) {
      for (auto& v : *mu) v *= c;
    }
    return EvaluatedClass(m_, n_, std::move(d), std::abs(c) * envelope_, std::move(mu));
  }

 private:
  void validate() const {
    if (!(envelope_ >= 0.0) || !std::isfinite(envelope_))
      throw InvalidEnvelope("envelope must be finite and nonnegative");
    for (double v : data_) {
      if (!std::isfinite(v)) throw InvalidArgument("class evaluations must be finite");
      if (std::abs(v) > envelope_ + kInvariantSlack)
        throw InvalidEnvelope("evaluation " + std::to_string(v) + " exceeds envelope " +
                              std::to_string(envelope_));
    }
    if (means_) {
      if (means_->size() != m_) throw DimensionMismatch("population_means must have length m");
      for (double v : *means_) {
        if (std::abs(v) > envelope_ + kInvariantSlack)
          throw InvalidEnvelope("population mean exceeds envelope");
      }
    }
  }

  std::vector<double> data_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  double envelope_ = 0.0;
  std::optional<std::vector<double>> means_;
};

namespace detail {

inline void validate_probabilities(std::span<const double> probs) {
  if (probs.empty()) throw InvalidArgument("distribution support must be nonempty");
  for (double p : probs) {
    if (!(p >= 0.0) || p > 1.0) throw InvalidArgument("probabilities must lie in [0, 1]");
  }
  const double total = deterministic_sum(probs);
  if (std::abs(total - 1.0) > kProbabilitySumTolerance)
    throw InvalidArgument("probabilities must sum to 1 (got " + std::to_string(total) + ")");
}

}  // namespace detail

/// Finite-support probability measure.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<Point> support, std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {
    if (support_.size() != probs_.size())
      throw DimensionMismatch("support and probability lists differ in length");
    detail::validate_probabilities(probs_);
    for (const auto& p : support_) {
      if (p.size() != support_.front().size())
        throw DimensionMismatch("support points have differing dimensions");
    }
  }

  static DiscreteDistribution point_mass(Point x) { return {{std::move(x)}, {1.0}}; }

  static DiscreteDistribution uniform(std::vector<Point> support) {
    const std::size_t s = support.size();
    if (s == 0) throw InvalidArgument("distribution support must be nonempty");
    return {std::move(support), std::vector<double>(s, 1.0 / static_cast<double>(s))};
  }

  std::size_t size() const noexcept { return support_.size(); }
  const std::vector<Point>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  std::vector<Point> support_;
  std::vector<double> probs_;
};

/// A finite class tabulated on the support of a discrete distribution:
/// value(i, s) = f_i(support[s]). This is the exact-oracle form of a class
/// builder: the class realized on a tuple of support indices is the matching
/// columns of the table.
///
/// The envelope is the declared bound b and is not enforced; see
/// envelope_holds().
class SupportTable {
 public:
  SupportTable(std::vector<std::vector<double>> values, std::vector<double> probs,
               double envelope)
      : probs_(std::move(probs)), envelope_(envelope) {
    if (values.empty()) throw InvalidArgument("class must contain at least one function (m >= 1)");
    detail::validate_probabilities(probs_);
    if (!(envelope_ >= 0.0) || !std::isfinite(envelope_))
      throw InvalidEnvelope("envelope must be finite and nonnegative");
    m_ = values.size();
    s_ = probs_.size();
    values_.reserve(m_ * s_);
    for (const auto& r : values) {
      if (r.size() != s_) throw DimensionMismatch("table rows must have one value per support point");
      for (double v : r) {
        if (!std::isfinite(v)) throw InvalidArgument("table values must be finite");
      }
      values_.insert(values_.end(), r.begin(), r.end());
    }
    means_.resize(m_);
    std::vector<double> terms(s_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t s = 0; s < s_; ++s) terms[s] = probs_[s] * value(i, s);
      means_[i] = deterministic_sum(terms);
    }
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t support_size() const noexcept { return s_; }
  double envelope() const noexcept { return envelope_; }
  double value(std::size_t i, std::size_t s) const { return values_[i * s_ + s]; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<double>& population_means() const noexcept { return means_; }

  /// True when every tabulated value respects the declared envelope.
  bool envelope_holds() const {
    for (double v : values_) {
      if (std::abs(v) > envelope_ + kInvariantSlack) return false;
    }
    return true;
  }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(m_);
    for (std::size_t i = 0; i < m_; ++i)
      out[i].assign(values_.begin() + static_cast<std::ptrdiff_t>(i * s_),
                    values_.begin() + static_cast<std::ptrdiff_t>((i + 1) * s_));
    return out;
  }

  /// Writes the m x n evaluation matrix of the sample given by support indices.
  void gather(std::span<const std::size_t> sample, std::span<double> out) const {
    const std::size_t n = sample.size();
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t k = 0; k < n; ++k) out[i * n + k] = value(i, sample[k]);
  }

  /// The evaluated class on a sample of support indices (envelope-checked).
  EvaluatedClass realize(std::span<const std::size_t> sample) const {
    std::vector<double> buf(m_ * sample.size());
    gather(sample, buf);
    return EvaluatedClass(m_, sample.size(), std::move(buf), envelope_, means_);
  }

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> means_;
  std::size_t m_ = 0;
  std::size_t s_ = 0;
  double envelope_ = 0.0;
};

}  // namespace genbound

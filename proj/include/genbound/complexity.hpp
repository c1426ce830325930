#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genbound/enumerate.hpp"
#include "genbound/errors.hpp"
#include "genbound/families.hpp"
#include "genbound/options.hpp"
#include "genbound/random.hpp"
#include "genbound/reduce.hpp"
#include "genbound/serialize.hpp"
#include "genbound/types.hpp"

namespace genbound {

enum class Method { ExactEnumeration, MonteCarlo };

inline std::string_view to_string(Method m) {
  return m == Method::ExactEnumeration ? "exact" : "monte_carlo";
}

struct ComplexityResult {
  double value = 0.0;
  Method method = Method::ExactEnumeration;
  std::uint64_t draws = 0;  // 0 for exact
  double std_error = 0.0;   // 0 for exact
  std::uint64_t seed = 0;   // 0 for exact
};

inline constexpr std::uint64_t kMinMonteCarloDraws = 100;

namespace detail {

inline int sign_at(std::span<const std::uint64_t> words, std::size_t k) noexcept {
  return ((words[k / 64] >> (k % 64)) & 1u) ? -1 : 1;
}

/// Index of the first function attaining max_i g((1/n) sum_k sigma_k f_i(S_k)),
/// with g = |.| or identity, together with the maximal value.
inline std::pair<std::size_t, double> sign_supremum(const ClassView& cls,
                                                    std::span<const std::uint64_t> sigma,
                                                    bool absolute) noexcept {
  const double inv_n = 1.0 / static_cast<double>(cls.n);
  std::size_t best_i = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cls.m; ++i) {
    const auto row = cls.row(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < cls.n; ++k) acc += sign_at(sigma, k) * row[k];
    double v = acc * inv_n;
    if (absolute) v = std::abs(v);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  return {best_i, best};
}

inline double sign_supremum_value(const ClassView& cls, std::uint64_t bits, bool absolute) noexcept {
  return sign_supremum(cls, std::span<const std::uint64_t>(&bits, 1), absolute).second;
}

/// Exact average over all 2^n sign vectors of the per-sign supremum.
inline double sign_average(const ClassView& cls, bool absolute, const Options& opts) {
  require_sign_cap(cls.n, opts.limits);
  const std::uint64_t count = std::uint64_t{1} << cls.n;
  const auto values = parallel_map(static_cast<std::size_t>(count), opts.threads,
                                   [&](std::size_t bits) {
                                     return sign_supremum_value(cls, bits, absolute);
                                   });
  return deterministic_sum(values) / static_cast<double>(count);
}

inline void draw_signs(StreamRng& rng, std::size_t n, std::vector<std::uint64_t>& words) {
  words.resize((n + 63) / 64);
  for (auto& w : words) w = rng();
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanAndError mean_and_error(const std::vector<double>& values) {
  const auto count = static_cast<double>(values.size());
  const double shift = values.front();
  std::vector<double> centered(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) centered[i] = values[i] - shift;
  const double offset = deterministic_sum(centered) / count;
  for (auto& d : centered) {
    d -= offset;
    d *= d;
  }
  const double variance = values.size() > 1 ? deterministic_sum(centered) / (count - 1.0) : 0.0;
  return {shift + offset, std::sqrt(variance / count)};
}

inline void require_draws(std::uint64_t draws) {
  if (draws < kMinMonteCarloDraws)
    throw InvalidArgument("Monte Carlo estimators need at least " +
                          std::to_string(kMinMonteCarloDraws) + " draws");
}

}  // namespace detail

/// Exact empirical Rademacher complexity
///   (1/2^n) sum_sigma max_i |(1/n) sum_k sigma_k f_i(S_k)|.
inline ComplexityResult empirical_rademacher(const EvaluatedClass& cls, const Options& opts = {}) {
  return {detail::sign_average(cls.view(), true, opts), Method::ExactEnumeration, 0, 0.0, 0};
}

/// Same average with the absolute value dropped inside the supremum.
inline ComplexityResult empirical_rademacher_without_abs(const EvaluatedClass& cls,
                                                         const Options& opts = {}) {
  return {detail::sign_average(cls.view(), false, opts), Method::ExactEnumeration, 0, 0.0, 0};
}

/// Lowest-index function attaining the supremum for one sign vector.
inline std::size_t supremum_witness(const EvaluatedClass& cls, const SignAssignment& sigma,
                                    bool absolute = true) {
  if (sigma.n != cls.n()) throw DimensionMismatch("sign vector length differs from sample size");
  return detail::sign_supremum(cls.view(), std::span<const std::uint64_t>(&sigma.bits, 1), absolute)
      .first;
}

/// Sampled estimator of the empirical Rademacher complexity. Draw d uses
/// StreamRng(seed, d), so the estimate is independent of the thread count.
inline ComplexityResult empirical_rademacher_mc(const EvaluatedClass& cls, std::uint64_t draws,
                                                std::uint64_t seed, const Options& opts = {},
                                                bool absolute = true) {
  detail::require_draws(draws);
  const auto view = cls.view();
  const auto values = parallel_map(static_cast<std::size_t>(draws), opts.threads, [&](std::size_t d) {
    StreamRng rng(seed, d);
    std::vector<std::uint64_t> words;
    detail::draw_signs(rng, view.n, words);
    return detail::sign_supremum(view, words, absolute).second;
  });
  const auto est = detail::mean_and_error(values);
  return {est.mean, Method::MonteCarlo, draws, est.std_error, seed};
}

/// Exact expected Rademacher complexity E_{S ~ mu^n}[empirical complexity],
/// enumerating every tuple of support indices.
inline ComplexityResult expected_rademacher(const SupportTable& table, std::size_t n,
                                           const Options& opts = {}) {
  detail::require_sign_cap(n, opts.limits);
  const auto tuples = enumerate_product(table.probs(), n, opts.limits);
  Options inner = opts;
  inner.threads = 1;
  const auto terms = parallel_map(static_cast<std::size_t>(tuples.size()), opts.threads,
                                  [&](std::size_t index) {
                                    std::vector<std::size_t> sample(n);
                                    detail::decode_tuple(index, table.support_size(), sample);
                                    const double w = detail::tuple_weight(sample, table.probs());
                                    std::vector<double> buf(table.m() * n);
                                    table.gather(sample, buf);
                                    return w * detail::sign_average({buf, table.m(), n}, true, inner);
                                  });
  return {deterministic_sum(terms), Method::ExactEnumeration, 0, 0.0, 0};
}

template <FunctionFamily F>
ComplexityResult expected_rademacher(const F& family, const DiscreteDistribution& dist,
                                     std::size_t n, const Options& opts = {}) {
  return expected_rademacher(tabulate(family, dist), n, opts);
}

/// Sampled estimator of the expected Rademacher complexity: the mean over
/// `draws` i.i.d. samples of the empirical complexity. When n exceeds the
/// sign cap, one sign vector per draw is used instead (still unbiased).
template <ClassBuilder B, PointSampler P>
ComplexityResult expected_rademacher_mc(const B& builder, const P& sampler, std::size_t n,
                                        std::uint64_t draws, std::uint64_t seed,
                                        const Options& opts = {}) {
  detail::require_draws(draws);
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  const bool exact_inner = n <= opts.limits.max_sign_bits && n < 63;
  Options inner = opts;
  inner.threads = 1;
  const auto values = parallel_map(static_cast<std::size_t>(draws), opts.threads, [&](std::size_t d) {
    StreamRng rng(seed, d);
    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) points.push_back(sampler(rng));
    const EvaluatedClass cls = builder(std::span<const Point>(points));
    if (exact_inner) return detail::sign_average(cls.view(), true, inner);
    std::vector<std::uint64_t> words;
    detail::draw_signs(rng, n, words);
    return detail::sign_supremum(cls.view(), words, true).second;
  });
  const auto est = detail::mean_and_error(values);
  return {est.mean, Method::MonteCarlo, draws, est.std_error, seed};
}

struct AbsComparison {
  double without_abs = 0.0;
  double with_abs = 0.0;
  double slack = 0.0;  // with_abs - without_abs
};

/// Computes both complexities and checks without_abs <= with_abs.
inline AbsComparison check_without_abs_le_abs(const EvaluatedClass& cls, const Options& opts = {}) {
  AbsComparison r;
  r.without_abs = empirical_rademacher_without_abs(cls, opts).value;
  r.with_abs = empirical_rademacher(cls, opts).value;
  r.slack = r.with_abs - r.without_abs;
  if (r.slack < -opts.tolerances.invariant) {
    json details = {{"class", to_json(cls)}, {"without_abs", r.without_abs}, {"with_abs", r.with_abs}};
    throw InvariantViolation("without-abs complexity exceeds the absolute-value complexity",
                             details.dump());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Grid restriction of a continuously parameterized family.

/// A family {f_theta : theta in box} where theta -> f_theta(x) is continuous.
/// Suprema over the box are approximated by suprema over nested dyadic grids.
struct GridFamily {
  std::vector<std::pair<double, double>> parameter_box;
  std::function<double(std::span<const double> theta, const Point& x)> evaluator;
  std::function<double(std::span<const double> theta)> population_mean;  // optional
  double envelope = 0.0;
  unsigned levels = 12;
  double tolerance = 1e-6;
};

struct GridLevel {
  unsigned depth = 0;
  std::size_t functions = 0;
  double value = 0.0;  // empirical Rademacher complexity of this grid's class
};

struct GridRestriction {
  EvaluatedClass cls;
  std::vector<GridLevel> trace;
  bool converged = false;
  bool truncated = false;  // stopped because the next grid exceeded max_grid_functions
};

namespace detail {

inline void validate_grid_family(const GridFamily& family) {
  if (family.parameter_box.empty()) throw InvalidArgument("parameter box needs at least one axis");
  for (const auto& [lo, hi] : family.parameter_box)
    if (!(lo < hi)) throw InvalidArgument("parameter box requires low < high on every axis");
  if (family.levels < 1) throw InvalidArgument("grid levels must be >= 1");
  if (!(family.tolerance >= 0.0)) throw InvalidArgument("grid tolerance must be nonnegative");
  if (!family.evaluator) throw InvalidArgument("grid family needs an evaluator");
}

inline EvaluatedClass grid_class(const GridFamily& family, const Sample& sample, unsigned depth) {
  const std::size_t dims = family.parameter_box.size();
  const std::uint64_t per_axis = (std::uint64_t{1} << depth) + 1;
  const std::uint64_t count = saturating_pow(per_axis, dims);
  const std::size_t n = sample.size();
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(count) * n);
  std::optional<std::vector<double>> means;
  if (family.population_mean) means.emplace();

  std::vector<std::size_t> digits(dims);
  std::vector<double> theta(dims);
  const double cells = static_cast<double>(std::uint64_t{1} << depth);
  for (std::uint64_t index = 0; index < count; ++index) {
    decode_tuple(index, static_cast<std::size_t>(per_axis), digits);
    for (std::size_t a = 0; a < dims; ++a) {
      const auto [lo, hi] = family.parameter_box[a];
      theta[a] = lo + (hi - lo) * (static_cast<double>(digits[a]) / cells);
    }
    for (std::size_t k = 0; k < n; ++k) buf.push_back(family.evaluator(theta, sample[k]));
    if (means) means->push_back(family.population_mean(theta));
  }
  return EvaluatedClass(static_cast<std::size_t>(count), n, std::move(buf), family.envelope,
                        std::move(means));
}

}  // namespace detail

/// Evaluates the family on nested dyadic grids of depth 1..levels and returns
/// the deepest class built. Stops once two successive depths differ by less
/// than the tolerance.
inline GridRestriction grid_restricted_class(const GridFamily& family, const Sample& sample,
                                             const Options& opts = {}) {
  detail::validate_grid_family(family);
  const std::size_t dims = family.parameter_box.size();
  std::vector<GridLevel> trace;
  std::optional<EvaluatedClass> deepest;
  bool converged = false;
  bool truncated = false;
  for (unsigned depth = 1; depth <= family.levels; ++depth) {
    const std::uint64_t count = detail::saturating_pow((std::uint64_t{1} << depth) + 1, dims);
    if (depth >= 63 || count > opts.limits.max_grid_functions) {
      truncated = true;
      break;
    }
    deepest.emplace(detail::grid_class(family, sample, depth));
    const double value = empirical_rademacher(*deepest, opts).value;
    trace.push_back({depth, static_cast<std::size_t>(count), value});
    if (trace.size() >= 2 && std::abs(trace.back().value - trace[trace.size() - 2].value) <
                                 family.tolerance) {
      converged = true;
      break;
    }
  }
  if (!deepest)
    throw ExactEnumerationLimit("depth-1 parameter grid", detail::saturating_pow(3, dims),
                                opts.limits.max_grid_functions);
  return {std::move(*deepest), std::move(trace), converged, truncated};
}

}  // namespace genbound

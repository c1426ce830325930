#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "genbound/complexity.hpp"
#include "genbound/deviation.hpp"
#include "genbound/errors.hpp"
#include "genbound/families.hpp"
#include "genbound/random.hpp"
#include "genbound/reduce.hpp"
#include "genbound/types.hpp"

namespace genbound {

inline constexpr std::uint64_t kMinTailTrials = 1000;
inline constexpr double kTailConfidence = 0.99;

/// P(UD >= 2 R_n + eps) <= exp(-eps^2 n / (2 b^2)).
inline double mcdiarmid_bound(double epsilon, std::size_t n, double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidEnvelope("McDiarmid bound needs b > 0");
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be nonnegative");
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  return std::exp(-epsilon * epsilon * static_cast<double>(n) / (2.0 * b * b));
}

/// The deviation eps(delta) = b sqrt(2 log(1/delta) / n) at which the
/// McDiarmid bound equals delta.
inline double high_probability_epsilon(double delta, std::size_t n, double b) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta("delta must lie in (0, 1)");
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidEnvelope("envelope b must be positive");
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  return b * std::sqrt(2.0 * std::log(1.0 / delta) / static_cast<double>(n));
}

/// One-sided Clopper-Pearson upper bound on a binomial proportion.
inline double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials,
                                    double confidence = kTailConfidence) {
  if (trials == 0 || successes > trials) throw InvalidArgument("invalid binomial counts");
  if (successes == trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                static_cast<double>(trials - successes), confidence);
}

/// One-sided Clopper-Pearson lower bound on a binomial proportion.
inline double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials,
                                    double confidence = kTailConfidence) {
  if (trials == 0 || successes > trials) throw InvalidArgument("invalid binomial counts");
  if (successes == 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(successes),
                                static_cast<double>(trials - successes + 1), 1.0 - confidence);
}

struct TailExperiment {
  std::size_t n = 0;
  double b = 0.0;
  double epsilon = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t exceed_count = 0;
  double empirical_freq = 0.0;
  double ci_upper = 0.0;     // one-sided 99% Clopper-Pearson
  double theoretical = 0.0;  // mcdiarmid_bound(epsilon, n, b)
  ComplexityResult rademacher;  // R_n fed into the event, with provenance
  double threshold = 0.0;       // the event is UD >= threshold
};

namespace detail {

/// Event threshold 2 R_n + eps. An estimated R_n is raised by four standard
/// errors first.
inline double tail_threshold(const ComplexityResult& r, double epsilon) {
  const double rn = r.method == Method::MonteCarlo ? r.value + 4.0 * r.std_error : r.value;
  return 2.0 * rn + epsilon;
}

inline void validate_tail_inputs(std::size_t n, double epsilon, std::uint64_t trials, double b) {
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be nonnegative");
  if (trials < kMinTailTrials) throw InvalidArgument("tail simulation needs at least 1000 trials");
  if (!(b > 0.0)) throw InvalidEnvelope("tail simulation needs an envelope b > 0");
}

inline TailExperiment finish_experiment(TailExperiment e) {
  e.empirical_freq = static_cast<double>(e.exceed_count) / static_cast<double>(e.trials);
  e.ci_upper = clopper_pearson_upper(e.exceed_count, e.trials);
  e.theoretical = mcdiarmid_bound(e.epsilon, e.n, e.b);
  return e;
}

inline std::uint64_t count_events(const std::vector<std::uint8_t>& hits) {
  return std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
}

}  // namespace detail

/// Simulates P(UD >= 2 R_n + eps) for i.i.d. samples from a tabulated class.
/// Trial t draws its sample from StreamRng(seed, t).
inline TailExperiment simulate_tail(const SupportTable& table, std::size_t n, double epsilon,
                                    std::uint64_t trials, std::uint64_t seed,
                                    const ComplexityResult& rademacher, const Options& opts = {}) {
  detail::validate_tail_inputs(n, epsilon, trials, table.envelope());
  const double threshold = detail::tail_threshold(rademacher, epsilon);
  const DiscreteSampler sampler(table.probs());
  const auto hits = parallel_map(static_cast<std::size_t>(trials), opts.threads, [&](std::size_t t) {
    StreamRng rng(seed, t);
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = sampler.index(rng);
    return static_cast<std::uint8_t>(detail::table_deviation(table, sample) >= threshold);
  });
  TailExperiment e;
  e.n = n;
  e.b = table.envelope();
  e.epsilon = epsilon;
  e.trials = trials;
  e.seed = seed;
  e.exceed_count = detail::count_events(hits);
  e.rademacher = rademacher;
  e.threshold = threshold;
  return detail::finish_experiment(e);
}

/// Same experiment for an arbitrary family and point sampler. Population
/// means must be supplied; they are never estimated.
template <FunctionFamily F, PointSampler P>
TailExperiment simulate_tail(const F& family, const P& sampler, std::vector<double> population_means,
                             std::size_t n, double epsilon, std::uint64_t trials, std::uint64_t seed,
                             const ComplexityResult& rademacher, const Options& opts = {}) {
  detail::validate_tail_inputs(n, epsilon, trials, family.envelope());
  if (population_means.size() != family.size())
    throw DimensionMismatch("population_means must have one entry per function");
  const double threshold = detail::tail_threshold(rademacher, epsilon);
  const auto hits = parallel_map(static_cast<std::size_t>(trials), opts.threads, [&](std::size_t t) {
    StreamRng rng(seed, t);
    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) points.push_back(sampler(rng));
    const auto cls = evaluate(family, std::span<const Point>(points), population_means);
    return static_cast<std::uint8_t>(uniform_deviation(cls) >= threshold);
  });
  TailExperiment e;
  e.n = n;
  e.b = family.envelope();
  e.epsilon = epsilon;
  e.trials = trials;
  e.seed = seed;
  e.exceed_count = detail::count_events(hits);
  e.rademacher = rademacher;
  e.threshold = threshold;
  return detail::finish_experiment(e);
}

struct TailVerdict {
  bool pass = true;
  double empirical_freq = 0.0;
  double theoretical = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

/// A failure needs statistically significant exceedance: the one-sided 99%
/// lower confidence bound of the frequency must sit above the bound.
inline TailVerdict verify_tail_bound(const TailExperiment& e) {
  TailVerdict v;
  v.empirical_freq = e.empirical_freq;
  v.theoretical = e.theoretical;
  v.ci_lower = clopper_pearson_lower(e.exceed_count, e.trials);
  v.ci_upper = clopper_pearson_upper(e.exceed_count, e.trials);
  v.pass = v.empirical_freq <= v.theoretical || v.theoretical >= v.ci_lower;
  return v;
}

}  // namespace genbound

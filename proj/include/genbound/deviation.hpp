#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "genbound/complexity.hpp"
#include "genbound/enumerate.hpp"
#include "genbound/errors.hpp"
#include "genbound/options.hpp"
#include "genbound/reduce.hpp"
#include "genbound/serialize.hpp"
#include "genbound/types.hpp"

namespace genbound {

namespace detail {

inline double uniform_deviation(const ClassView& cls, std::span<const double> means) {
  const double inv_n = 1.0 / static_cast<double>(cls.n);
  double best = 0.0;
  for (std::size_t i = 0; i < cls.m; ++i) {
    double acc = 0.0;
    for (double v : cls.row(i)) acc += v;
    best = std::max(best, std::abs(acc * inv_n - means[i]));
  }
  return best;
}

/// Uniform deviation of the sample given by support indices.
inline double table_deviation(const SupportTable& table, std::span<const std::size_t> sample) {
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  const auto& means = table.population_means();
  double best = 0.0;
  for (std::size_t i = 0; i < table.m(); ++i) {
    double acc = 0.0;
    for (std::size_t s : sample) acc += table.value(i, s);
    best = std::max(best, std::abs(acc * inv_n - means[i]));
  }
  return best;
}

/// UD for every tuple of supportⁿ, in enumeration order.
inline std::vector<double> deviation_per_tuple(const SupportTable& table, std::size_t n,
                                               std::uint64_t count, unsigned threads) {
  return parallel_map(static_cast<std::size_t>(count), threads, [&](std::size_t index) {
    std::vector<std::size_t> sample(n);
    decode_tuple(index, table.support_size(), sample);
    return table_deviation(table, sample);
  });
}

}  // namespace detail

/// max_i |(1/n) sum_k f_i(S_k) - E[f_i]|.
inline double uniform_deviation(const EvaluatedClass& cls) {
  if (!cls.population_means()) throw MissingPopulationMeans();
  return detail::uniform_deviation(cls.view(), *cls.population_means());
}

struct DeviationAudit {
  double max_observed_delta = 0.0;
  double theoretical_cap = 0.0;  // 2b/n
  std::uint64_t perturbations_checked = 0;
  bool violated = false;
};

/// Exhaustive bounded-differences audit: for every sample in supportⁿ, every
/// coordinate and every replacement support point, compares the uniform
/// deviation before and after the replacement against 2b/n, where b is the
/// table's declared envelope.
inline DeviationAudit audit_bounded_difference(const SupportTable& table, std::size_t n,
                                               const Options& opts = {}) {
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  const std::size_t s = table.support_size();
  const std::uint64_t count = detail::saturating_pow(s, n);
  const std::uint64_t work =
      detail::saturating_mul(detail::saturating_mul(count, n), static_cast<std::uint64_t>(s));
  detail::require_tuple_cap("bounded-differences audit over |support|^n * n * |support|", work,
                            opts.limits);

  const auto deviation = detail::deviation_per_tuple(table, n, count, opts.threads);

  // Replacing coordinate k of tuple `index` by support point x' moves the
  // index by (x' - s_k) * s^k.
  const auto worst = parallel_map(static_cast<std::size_t>(count), opts.threads, [&](std::size_t index) {
    std::vector<std::size_t> sample(n);
    detail::decode_tuple(index, s, sample);
    double local = 0.0;
    std::uint64_t stride = 1;
    for (std::size_t k = 0; k < n; ++k, stride *= s) {
      const std::uint64_t base = index - sample[k] * stride;
      for (std::size_t x = 0; x < s; ++x)
        local = std::max(local, std::abs(deviation[index] - deviation[base + x * stride]));
    }
    return local;
  });

  DeviationAudit audit;
  audit.max_observed_delta = worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
  audit.theoretical_cap = 2.0 * table.envelope() / static_cast<double>(n);
  audit.perturbations_checked = work;
  audit.violated = audit.max_observed_delta > audit.theoretical_cap + opts.tolerances.invariant;
  return audit;
}

struct SymmetrizationReport {
  double lhs = 0.0;  // E_{S,S'} max_i |sum_k (f_i(S_k) - f_i(S'_k))|
  double rhs = 0.0;  // same with averaged sign flips inside
  double gap = 0.0;  // |lhs - rhs|
};

/// Exact check of the symmetrization identity by joint enumeration of the
/// sample, its ghost copy, and all sign vectors.
inline SymmetrizationReport check_symmetrization_identity(const SupportTable& table, std::size_t n,
                                                          const Options& opts = {}) {
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  detail::require_sign_cap(n, opts.limits);
  const std::size_t s = table.support_size();
  const std::uint64_t pairs = detail::saturating_pow(s, 2 * n);
  detail::require_tuple_cap("symmetrization enumeration over |support|^(2n) * 2^n",
                            detail::saturating_mul(pairs, std::uint64_t{1} << n), opts.limits);

  const std::size_t m = table.m();
  const std::uint64_t signs = std::uint64_t{1} << n;
  struct Term {
    double lhs = 0.0;
    double rhs = 0.0;
  };
  const auto terms = parallel_map(static_cast<std::size_t>(pairs), opts.threads, [&](std::size_t index) {
    std::vector<std::size_t> both(2 * n);
    detail::decode_tuple(index, s, both);
    const std::span<const std::size_t> sample(both.data(), n);
    const std::span<const std::size_t> ghost(both.data() + n, n);
    const double w = detail::tuple_weight(both, table.probs());

    std::vector<double> diff(m * n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < n; ++k)
        diff[i * n + k] = table.value(i, sample[k]) - table.value(i, ghost[k]);

    auto sup_abs = [&](std::uint64_t bits) {
      double best = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          acc += ((bits >> k) & 1u) ? -diff[i * n + k] : diff[i * n + k];
        best = std::max(best, std::abs(acc));
      }
      return best;
    };

    std::vector<double> per_sign(signs);
    for (std::uint64_t bits = 0; bits < signs; ++bits) per_sign[bits] = sup_abs(bits);
    return Term{w * sup_abs(0), w * (deterministic_sum(per_sign) / static_cast<double>(signs))};
  });

  std::vector<double> lhs(terms.size()), rhs(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    lhs[t] = terms[t].lhs;
    rhs[t] = terms[t].rhs;
  }
  SymmetrizationReport r{deterministic_sum(lhs), deterministic_sum(rhs), 0.0};
  r.gap = std::abs(r.lhs - r.rhs);
  if (r.gap > opts.tolerances.exact_equality) {
    json details = {{"table", to_json(table)}, {"n", n}, {"lhs", r.lhs}, {"rhs", r.rhs}};
    throw InequalityViolation("symmetrization identity fails beyond tolerance", details.dump());
  }
  return r;
}

struct ExpectationBoundReport {
  double lhs = 0.0;    // E[UD]
  double rhs = 0.0;    // 2 * expected Rademacher complexity
  double slack = 0.0;  // rhs - lhs
};

/// Exact check of E[UD] <= 2 R_n over the product measure.
inline ExpectationBoundReport verify_expectation_bound(const SupportTable& table, std::size_t n,
                                                       const Options& opts = {}) {
  const auto tuples = enumerate_product(table.probs(), n, opts.limits);
  const auto deviation = detail::deviation_per_tuple(table, n, tuples.size(), opts.threads);
  std::vector<double> terms(deviation.size());
  std::vector<std::size_t> sample(n);
  for (std::size_t index = 0; index < deviation.size(); ++index) {
    detail::decode_tuple(index, table.support_size(), sample);
    terms[index] = detail::tuple_weight(sample, table.probs()) * deviation[index];
  }
  ExpectationBoundReport r;
  r.lhs = deterministic_sum(terms);
  r.rhs = 2.0 * expected_rademacher(table, n, opts).value;
  r.slack = r.rhs - r.lhs;
  if (r.slack < -opts.tolerances.inequality) {
    json details = {{"table", to_json(table)}, {"n", n}, {"lhs", r.lhs}, {"rhs", r.rhs}};
    throw InequalityViolation("expected uniform deviation exceeds twice the Rademacher complexity",
                              details.dump());
  }
  return r;
}

}  // namespace genbound

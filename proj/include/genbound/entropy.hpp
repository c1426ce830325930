#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "genbound/complexity.hpp"
#include "genbound/errors.hpp"
#include "genbound/options.hpp"
#include "genbound/reduce.hpp"
#include "genbound/serialize.hpp"
#include "genbound/types.hpp"

namespace genbound {

/// sqrt((1/n) sum_k f(S_k)^2).
inline double empirical_norm(std::span<const double> row) {
  if (row.empty()) throw InvalidArgument("empirical norm needs n >= 1");
  double acc = 0.0;
  for (double v : row) acc += v * v;
  return std::sqrt(acc / static_cast<double>(row.size()));
}

/// ||f - g||_S. Zero for distinct functions that agree on the sample.
inline double empirical_dist(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("rows differ in length");
  if (a.empty()) throw InvalidArgument("empirical distance needs n >= 1");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

/// max_i ||f_i||_S.
inline double max_empirical_norm(const EvaluatedClass& cls) {
  double c = 0.0;
  for (std::size_t i = 0; i < cls.m(); ++i) c = std::max(c, empirical_norm(cls.row(i)));
  return c;
}

enum class CoverMethod { ExactMinimal, Greedy };

inline std::string_view to_string(CoverMethod m) {
  return m == CoverMethod::ExactMinimal ? "exact" : "greedy";
}

/// An internal cover under closed balls: every row lies within `radius` of a
/// center, and centers are rows of the class.
struct CoverResult {
  double radius = 0.0;
  std::size_t size = 0;
  std::vector<std::size_t> center_indices;
  CoverMethod method = CoverMethod::ExactMinimal;
};

/// Pairwise empirical distances of a class, with rows at distance zero
/// collapsed to their first occurrence.
class DistanceTable {
 public:
  explicit DistanceTable(const EvaluatedClass& cls) : m_(cls.m()), dist_(cls.m() * cls.m(), 0.0) {
    for (std::size_t a = 0; a < m_; ++a)
      for (std::size_t b = a + 1; b < m_; ++b)
        dist_[a * m_ + b] = dist_[b * m_ + a] = empirical_dist(cls.row(a), cls.row(b));
    for (std::size_t a = 0; a < m_; ++a) {
      const bool duplicate = std::any_of(representatives_.begin(), representatives_.end(),
                                         [&](std::size_t r) { return (*this)(a, r) == 0.0; });
      if (!duplicate) representatives_.push_back(a);
    }
  }

  std::size_t rows() const noexcept { return m_; }
  double operator()(std::size_t a, std::size_t b) const { return dist_[a * m_ + b]; }
  /// Lowest-index row of each distance-zero class, ascending.
  const std::vector<std::size_t>& representatives() const noexcept { return representatives_; }

  /// Distinct positive distances among representatives, ascending.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (std::size_t a = 0; a < representatives_.size(); ++a)
      for (std::size_t b = a + 1; b < representatives_.size(); ++b)
        out.push_back((*this)(representatives_[a], representatives_[b]));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::size_t m_;
  std::vector<double> dist_;
  std::vector<std::size_t> representatives_;
};

namespace detail {

inline void require_radius(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidRadius("cover radius must be positive and finite");
}

inline void require_exact_cover_cap(std::size_t distinct, const Limits& limits) {
  const std::size_t cap = std::min<std::size_t>(limits.max_exact_cover_rows, 63);
  if (distinct > cap)
    throw ExactEnumerationLimit("exact minimal cover over distinct rows", distinct, cap);
}

/// Minimal internal cover by size-ordered lexicographic search over
/// combinations of representatives; the first hit is the lexicographically
/// smallest minimal center set.
inline std::vector<std::size_t> exact_cover(const DistanceTable& table, double epsilon) {
  const auto& reps = table.representatives();
  const std::size_t r = reps.size();
  std::vector<std::uint64_t> ball(r, 0);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      if (table(reps[a], reps[b]) <= epsilon) ball[a] |= std::uint64_t{1} << b;
  const std::uint64_t full = r == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;

  std::vector<std::size_t> combo;
  for (std::size_t k = 1; k <= r; ++k) {
    combo.resize(k);
    for (std::size_t j = 0; j < k; ++j) combo[j] = j;
    while (true) {
      std::uint64_t covered = 0;
      for (std::size_t j : combo) covered |= ball[j];
      if (covered == full) {
        std::vector<std::size_t> centers(k);
        for (std::size_t j = 0; j < k; ++j) centers[j] = reps[combo[j]];
        return centers;
      }
      // Next combination in lexicographic order.
      std::size_t pos = k;
      while (pos > 0 && combo[pos - 1] == r - k + pos - 1) --pos;
      if (pos == 0) break;
      ++combo[pos - 1];
      for (std::size_t j = pos; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return {reps.begin(), reps.end()};  // unreachable: the full set always covers
}

/// Farthest-point-first greedy cover starting from the first representative.
inline std::vector<std::size_t> greedy_cover(const DistanceTable& table, double epsilon) {
  const auto& reps = table.representatives();
  std::vector<std::size_t> centers{reps.front()};
  std::vector<double> nearest(reps.size());
  for (std::size_t a = 0; a < reps.size(); ++a) nearest[a] = table(reps[a], reps.front());
  while (true) {
    std::size_t far = 0;
    for (std::size_t a = 1; a < reps.size(); ++a)
      if (nearest[a] > nearest[far]) far = a;
    if (nearest[far] <= epsilon) break;
    centers.push_back(reps[far]);
    for (std::size_t a = 0; a < reps.size(); ++a)
      nearest[a] = std::min(nearest[a], table(reps[a], reps[far]));
  }
  return centers;
}

inline CoverMethod resolve_cover_method(std::size_t distinct, const Limits& limits,
                                        std::optional<CoverMethod> requested) {
  if (requested) return *requested;
  return distinct <= std::min<std::size_t>(limits.max_exact_cover_rows, 63) ? CoverMethod::ExactMinimal
                                                                           : CoverMethod::Greedy;
}

inline CoverResult make_cover(const DistanceTable& table, double epsilon, CoverMethod method,
                              const Limits& limits) {
  require_radius(epsilon);
  CoverResult r;
  r.radius = epsilon;
  r.method = method;
  if (method == CoverMethod::ExactMinimal) {
    require_exact_cover_cap(table.representatives().size(), limits);
    r.center_indices = exact_cover(table, epsilon);
  } else {
    r.center_indices = greedy_cover(table, epsilon);
  }
  r.size = r.center_indices.size();
  return r;
}

}  // namespace detail

/// Minimal internal cover under closed balls of radius epsilon.
inline CoverResult covering_number_exact(const EvaluatedClass& cls, double epsilon,
                                         const Options& opts = {}) {
  return detail::make_cover(DistanceTable(cls), epsilon, CoverMethod::ExactMinimal, opts.limits);
}

/// Farthest-point greedy cover; its size upper-bounds the minimal one.
inline CoverResult covering_number_greedy(const EvaluatedClass& cls, double epsilon) {
  return detail::make_cover(DistanceTable(cls), epsilon, CoverMethod::Greedy, {});
}

/// u -> N(u) as a right-continuous step function. Both cover methods only
/// compare distances against u, so N changes only at pairwise distances.
class CoverProfile {
 public:
  CoverProfile(const EvaluatedClass& cls, CoverMethod method, const Limits& limits = {})
      : method_(method) {
    const DistanceTable table(cls);
    distinct_ = table.representatives().size();
    breakpoints_ = table.breakpoints();
    sizes_.reserve(breakpoints_.size());
    for (double u : breakpoints_)
      sizes_.push_back(detail::make_cover(table, u, method, limits).size);
  }

  std::size_t size_at(double u) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
    if (it == breakpoints_.begin()) return distinct_;
    return sizes_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
  }

  CoverMethod method() const noexcept { return method_; }
  std::size_t distinct_rows() const noexcept { return distinct_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

 private:
  CoverMethod method_;
  std::size_t distinct_ = 0;
  std::vector<double> breakpoints_;
  std::vector<std::size_t> sizes_;
};

// ---------------------------------------------------------------------------
// Chaining.

struct ChainingLevel {
  unsigned j = 0;
  double epsilon = 0.0;  // c / 2^j
  CoverResult cover;
  std::vector<std::size_t> assignment;  // nearest center (row index) per row
};

struct ChainingTrace {
  double c = 0.0;
  double target_epsilon = 0.0;
  std::vector<ChainingLevel> levels;
  double max_residual = 0.0;  // max_i ||f_i - assigned center||_S at the deepest level
};

namespace detail {

inline double require_nondegenerate(const EvaluatedClass& cls) {
  const double c = max_empirical_norm(cls);
  if (c == 0.0) throw DegenerateClass("every function vanishes on the sample (c = 0)");
  return c;
}

}  // namespace detail

/// Nested covers at dyadic radii c/2^j, j = 1, 2, ..., down to the first
/// radius <= target_epsilon, with each row assigned to its nearest center.
inline ChainingTrace build_chaining(const EvaluatedClass& cls, double target_epsilon,
                                    const Options& opts = {},
                                    std::optional<CoverMethod> method = std::nullopt) {
  const double c = detail::require_nondegenerate(cls);
  if (!(target_epsilon > 0.0) || target_epsilon >= c / 2.0)
    throw InvalidRadius("chaining target must lie in (0, c/2)");
  const DistanceTable table(cls);
  const CoverMethod how =
      detail::resolve_cover_method(table.representatives().size(), opts.limits, method);

  ChainingTrace trace;
  trace.c = c;
  trace.target_epsilon = target_epsilon;
  for (unsigned j = 1;; ++j) {
    ChainingLevel level;
    level.j = j;
    level.epsilon = std::ldexp(c, -static_cast<int>(j));
    level.cover = detail::make_cover(table, level.epsilon, how, opts.limits);
    level.assignment.resize(cls.m());
    for (std::size_t i = 0; i < cls.m(); ++i) {
      std::size_t best = level.cover.center_indices.front();
      for (std::size_t center : level.cover.center_indices)
        if (table(i, center) < table(i, best) ||
            (table(i, center) == table(i, best) && center < best))
          best = center;
      level.assignment[i] = best;
    }
    const bool last = level.epsilon <= target_epsilon;
    trace.levels.push_back(std::move(level));
    if (last) break;
  }
  const auto& deepest = trace.levels.back();
  for (std::size_t i = 0; i < cls.m(); ++i)
    trace.max_residual = std::max(trace.max_residual, table(i, deepest.assignment[i]));
  return trace;
}

// ---------------------------------------------------------------------------
// Dudley entropy integral.

inline constexpr std::size_t kDefaultDudleyGrid = 256;

struct DudleyGridPoint {
  double u = 0.0;
  std::size_t covering_number = 0;
  double integrand = 0.0;  // sqrt(log N(u))
};

struct DudleyResult {
  double bound = 0.0;     // 4 eps + (12 / sqrt(n)) * integral
  double integral = 0.0;  // left-endpoint upper sum of sqrt(log N) over [eps, c/2]
  double c = 0.0;
  double epsilon = 0.0;
  CoverMethod method = CoverMethod::ExactMinimal;
  std::vector<DudleyGridPoint> trace;
};

/// Evaluates the entropy-integral bound from a precomputed cover profile.
/// The integrand is nonincreasing, so the left-endpoint Riemann sum is an
/// upper bound on the integral.
inline DudleyResult dudley_bound(const CoverProfile& profile, double c, std::size_t n, double epsilon,
                                 std::size_t grid_points = kDefaultDudleyGrid) {
  if (c == 0.0) throw DegenerateClass("every function vanishes on the sample (c = 0)");
  if (!(epsilon > 0.0) || epsilon >= c / 2.0) throw InvalidRadius("epsilon must lie in (0, c/2)");
  if (grid_points == 0) throw InvalidArgument("grid needs at least one point");
  if (n == 0) throw InvalidArgument("sample size must be >= 1");

  const double length = c / 2.0 - epsilon;
  const double h = length / static_cast<double>(grid_points);
  DudleyResult r;
  r.c = c;
  r.epsilon = epsilon;
  r.method = profile.method();
  r.trace.reserve(grid_points);
  std::vector<double> terms(grid_points);
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double u = epsilon + length * (static_cast<double>(j) / static_cast<double>(grid_points));
    const std::size_t cover = profile.size_at(u);
    const double integrand = std::sqrt(std::log(static_cast<double>(cover)));
    r.trace.push_back({u, cover, integrand});
    terms[j] = h * integrand;
  }
  r.integral = deterministic_sum(terms);
  r.bound = 4.0 * epsilon + (12.0 / std::sqrt(static_cast<double>(n))) * r.integral;
  return r;
}

inline DudleyResult dudley_bound(const EvaluatedClass& cls, double epsilon,
                                 std::optional<CoverMethod> method = std::nullopt,
                                 std::size_t grid_points = kDefaultDudleyGrid,
                                 const Options& opts = {}) {
  const double c = detail::require_nondegenerate(cls);
  const CoverProfile profile(
      cls, detail::resolve_cover_method(DistanceTable(cls).representatives().size(), opts.limits, method),
      opts.limits);
  return dudley_bound(profile, c, cls.n(), epsilon, grid_points);
}

/// Exact integral of sqrt(log N(u)) over [eps, c/2], integrating the step
/// function piece by piece between breakpoints.
inline double dudley_integral_exact(const CoverProfile& profile, double c, double epsilon) {
  if (!(epsilon > 0.0) || epsilon >= c / 2.0) throw InvalidRadius("epsilon must lie in (0, c/2)");
  const double top = c / 2.0;
  std::vector<double> cuts{epsilon};
  for (double b : profile.breakpoints())
    if (b > epsilon && b < top) cuts.push_back(b);
  cuts.push_back(top);
  std::vector<double> pieces;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const auto cover = static_cast<double>(profile.size_at(cuts[j]));
    pieces.push_back((cuts[j + 1] - cuts[j]) * std::sqrt(std::log(cover)));
  }
  return deterministic_sum(pieces);
}

/// `count` evenly spaced admissible radii (c/2) j / (count + 1), j = 1..count.
inline std::vector<double> admissible_epsilons(const EvaluatedClass& cls, std::size_t count) {
  const double c = detail::require_nondegenerate(cls);
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j)
    out[j] = (c / 2.0) * static_cast<double>(j + 1) / static_cast<double>(count + 1);
  return out;
}

struct DudleyCheck {
  double epsilon = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

struct DudleyVerification {
  double lhs = 0.0;  // exact without-abs complexity
  std::vector<DudleyCheck> checks;
  double best_epsilon = 0.0;
  double best_rhs = 0.0;
  CoverMethod method = CoverMethod::ExactMinimal;
};

/// Checks without-abs complexity <= Dudley bound at every radius of the grid.
inline DudleyVerification verify_dudley(const EvaluatedClass& cls, std::span<const double> epsilons,
                                        std::optional<CoverMethod> method = std::nullopt,
                                        std::size_t grid_points = kDefaultDudleyGrid,
                                        const Options& opts = {}) {
  const double c = detail::require_nondegenerate(cls);
  const CoverProfile profile(
      cls, detail::resolve_cover_method(DistanceTable(cls).representatives().size(), opts.limits, method),
      opts.limits);
  DudleyVerification v;
  v.method = profile.method();
  v.lhs = empirical_rademacher_without_abs(cls, opts).value;
  v.best_rhs = std::numeric_limits<double>::infinity();
  for (double eps : epsilons) {
    const auto r = dudley_bound(profile, c, cls.n(), eps, grid_points);
    v.checks.push_back({eps, r.bound, r.bound - v.lhs});
    if (r.bound < v.best_rhs) {
      v.best_rhs = r.bound;
      v.best_epsilon = eps;
    }
    if (r.bound - v.lhs < -opts.tolerances.inequality) {
      json details = {{"class", to_json(cls)}, {"epsilon", eps}, {"lhs", v.lhs}, {"rhs", r.bound}};
      throw InequalityViolation("without-abs complexity exceeds the Dudley entropy bound",
                                details.dump());
    }
  }
  return v;
}

}  // namespace genbound

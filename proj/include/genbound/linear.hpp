#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "genbound/complexity.hpp"
#include "genbound/errors.hpp"
#include "genbound/random.hpp"
#include "genbound/serialize.hpp"
#include "genbound/types.hpp"

namespace genbound {

/// X W / sqrt(n): empirical Rademacher bound for l2-bounded linear predictors.
inline double l2_bound(double x_radius, double w_radius, std::size_t n) {
  if (!(x_radius >= 0.0) || !(w_radius >= 0.0)) throw InvalidArgument("radii must be nonnegative");
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  return x_radius * w_radius / std::sqrt(static_cast<double>(n));
}

/// (Xinf W / sqrt(n)) sqrt(2 ln(2d)): bound for l1-bounded weights on
/// l-infinity-bounded inputs.
inline double l1_bound(double xinf_radius, double w_radius, std::size_t n, std::size_t d) {
  if (!(xinf_radius >= 0.0) || !(w_radius >= 0.0)) throw InvalidArgument("radii must be nonnegative");
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
  if (d == 0) throw InvalidArgument("dimension must be >= 1");
  return (xinf_radius * w_radius / std::sqrt(static_cast<double>(n))) *
         std::sqrt(2.0 * std::log(2.0 * static_cast<double>(d)));
}

/// Finite-class bound (1/n) max_i ||f_i(S)||_2 sqrt(2 ln m) on the
/// without-abs complexity. Apply it to the class augmented with negations to
/// bound the absolute-value version.
inline double massart_bound(const EvaluatedClass& cls) {
  double max_norm = 0.0;
  for (std::size_t i = 0; i < cls.m(); ++i) {
    double sq = 0.0;
    for (double v : cls.row(i)) sq += v * v;
    max_norm = std::max(max_norm, std::sqrt(sq));
  }
  return max_norm / static_cast<double>(cls.n()) *
         std::sqrt(2.0 * std::log(static_cast<double>(cls.m())));
}

/// {f, -f : f in class}, doubling m.
inline EvaluatedClass with_negations(const EvaluatedClass& cls) {
  auto rows = cls.rows();
  const std::size_t m = rows.size();
  for (std::size_t i = 0; i < m; ++i) {
    auto neg = rows[i];
    for (auto& v : neg) v = -v;
    rows.push_back(std::move(neg));
  }
  return EvaluatedClass(std::move(rows), cls.envelope());
}

enum class BallNorm { L2, L1, Linf };

inline std::string_view to_string(BallNorm b) {
  switch (b) {
    case BallNorm::L2: return "l2";
    case BallNorm::L1: return "l1";
    case BallNorm::Linf: return "linf";
  }
  return "?";
}

inline double norm(BallNorm which, std::span<const double> v) {
  double acc = 0.0;
  switch (which) {
    case BallNorm::L2:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
    case BallNorm::L1:
      for (double x : v) acc += std::abs(x);
      return acc;
    case BallNorm::Linf:
      for (double x : v) acc = std::max(acc, std::abs(x));
      return acc;
  }
  return acc;
}

/// Draws `count` points uniformly from the ball {||v|| <= radius} in R^d.
/// l2: Gaussian direction scaled by radius u^(1/d). l1: random signs on an
/// exponential-spacing point of the simplex, scaled the same way. linf:
/// coordinatewise uniform. Vector j uses StreamRng(seed, j).
inline std::vector<Point> sample_ball(BallNorm which, double radius, std::size_t d,
                                      std::size_t count, std::uint64_t seed) {
  if (!(radius >= 0.0)) throw InvalidArgument("radius must be nonnegative");
  if (d == 0) throw InvalidArgument("dimension must be >= 1");
  std::vector<Point> out;
  out.reserve(count);
  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t j = 0; j < count; ++j) {
    StreamRng rng(seed, j);
    Point v(d, 0.0);
    if (which == BallNorm::Linf) {
      for (auto& x : v) x = radius * (2.0 * rng.uniform() - 1.0);
    } else {
      double total = 0.0;
      do {
        total = 0.0;
        for (auto& x : v) {
          if (which == BallNorm::L2) {
            x = rng.normal();
            total += x * x;
          } else {
            x = -std::log(rng.uniform_positive());
            if (rng() & 1u) x = -x;
            total += std::abs(x);
          }
        }
      } while (total == 0.0);
      const double length = which == BallNorm::L2 ? std::sqrt(total) : total;
      const double scale = radius * std::pow(rng.uniform(), inv_d) / length;
      for (auto& x : v) x *= scale;
    }
    // Rounding in the rescale can overshoot the radius by an ulp.
    const double r = norm(which, v);
    if (r > radius && r > 0.0) {
      for (auto& x : v) x *= radius / r;
    }
    out.push_back(std::move(v));
  }
  return out;
}

struct NormRegime {
  enum class Kind { L2Ball, L1Linf };
  Kind kind = Kind::L2Ball;
  double w_radius = 0.0;  // ||w||_2 <= W or ||w||_1 <= W
  double x_radius = 0.0;  // ||x||_2 <= X or ||x||_inf <= Xinf
};

struct LinearInstance {
  std::size_t d = 0;
  std::vector<Point> weights;
  std::vector<Point> inputs;
  NormRegime regime;
};

struct LinearReport {
  double exact = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - exact
};

inline json to_json(const LinearInstance& inst) {
  return json{{"d", inst.d},
              {"regime", inst.regime.kind == NormRegime::Kind::L2Ball ? "l2" : "l1linf"},
              {"W", inst.regime.w_radius},
              {"X", inst.regime.x_radius},
              {"weights", inst.weights},
              {"inputs", inst.inputs}};
}

/// Builds evals[i][k] = <w_i, x_k> with envelope W X (Cauchy-Schwarz or Hölder).
inline EvaluatedClass linear_class(const LinearInstance& inst) {
  const bool l2 = inst.regime.kind == NormRegime::Kind::L2Ball;
  const BallNorm wn = l2 ? BallNorm::L2 : BallNorm::L1;
  const BallNorm xn = l2 ? BallNorm::L2 : BallNorm::Linf;
  if (inst.weights.empty() || inst.inputs.empty())
    throw InvalidArgument("linear instance needs weights and inputs");
  for (const auto& w : inst.weights) {
    if (w.size() != inst.d) throw DimensionMismatch("weight dimension differs from d");
    if (norm(wn, w) > inst.regime.w_radius + kInvariantSlack)
      throw InvalidArgument("weight vector lies outside its norm ball");
  }
  for (const auto& x : inst.inputs) {
    if (x.size() != inst.d) throw DimensionMismatch("input dimension differs from d");
    if (norm(xn, x) > inst.regime.x_radius + kInvariantSlack)
      throw InvalidArgument("input vector lies outside its norm ball");
  }
  const std::size_t m = inst.weights.size();
  const std::size_t n = inst.inputs.size();
  std::vector<double> buf(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < inst.d; ++j) acc += inst.weights[i][j] * inst.inputs[k][j];
      buf[i * n + k] = acc;
    }
  // |<w,x>| <= W X up to rounding of the dot product; widen by one part in 1e12.
  const double b = inst.regime.w_radius * inst.regime.x_radius * (1.0 + 1e-12);
  return EvaluatedClass(m, n, std::move(buf), b);
}

inline LinearReport verify_linear_bound(const LinearInstance& inst, const Options& opts = {}) {
  const auto cls = linear_class(inst);
  LinearReport r;
  r.exact = empirical_rademacher(cls, opts).value;
  r.bound = inst.regime.kind == NormRegime::Kind::L2Ball
                ? l2_bound(inst.regime.x_radius, inst.regime.w_radius, cls.n())
                : l1_bound(inst.regime.x_radius, inst.regime.w_radius, cls.n(), inst.d);
  r.slack = r.bound - r.exact;
  if (r.slack < -opts.tolerances.inequality) {
    json details = {{"instance", to_json(inst)}, {"exact", r.exact}, {"bound", r.bound}};
    throw InequalityViolation("empirical Rademacher complexity exceeds the linear-predictor bound",
                              details.dump());
  }
  return r;
}

/// Draws a valid instance of the regime from sample_ball.
inline LinearInstance sample_linear_instance(NormRegime regime, std::size_t d, std::size_t m,
                                             std::size_t n, std::uint64_t seed) {
  const bool l2 = regime.kind == NormRegime::Kind::L2Ball;
  LinearInstance inst;
  inst.d = d;
  inst.regime = regime;
  inst.weights = sample_ball(l2 ? BallNorm::L2 : BallNorm::L1, regime.w_radius, d, m,
                             detail::mix64(seed ^ 0x5745494748545321ULL));
  inst.inputs = sample_ball(l2 ? BallNorm::L2 : BallNorm::Linf, regime.x_radius, d, n,
                            detail::mix64(seed ^ 0x494e505554532121ULL));
  return inst;
}

/// The 2d signed coordinate vectors {+W e_j, -W e_j}: the extreme points of
/// the l1 ball of radius W.
inline std::vector<Point> signed_coordinate_weights(std::size_t d, double w_radius) {
  std::vector<Point> out;
  out.reserve(2 * d);
  for (std::size_t j = 0; j < d; ++j) {
    for (double sign : {1.0, -1.0}) {
      Point e(d, 0.0);
      e[j] = sign * w_radius;
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace genbound

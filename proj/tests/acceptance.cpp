// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "genbound/genbound.hpp"
#include "oracles.hpp"
#include "runner.hpp"

using namespace genbound;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> body;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

std::uint64_t seed_for(int criterion, std::uint64_t i) {
  return detail::mix64(0xacce97ULL * static_cast<std::uint64_t>(criterion) + i);
}

Outcome estimator_consistency() {
  int within = 0;
  const int total = 50;
  for (int i = 0; i < total; ++i) {
    const std::size_t m = 1 + i % 6;
    const std::size_t n = 1 + (i * 7) % 10;
    const auto cls = random_class(m, n, 1.0, seed_for(1, i));
    const double exact = empirical_rademacher(cls).value;
    const auto mc = empirical_rademacher_mc(cls, 100000, seed_for(1, 1000 + i));
    if (std::abs(mc.value - exact) <= 4.0 * mc.std_error) ++within;
  }
  return {within >= 48, fmt("%d/%d within 4 standard errors (need 48)", within, total)};
}

Outcome symmetrization() {
  double worst = 0.0, worst_oracle = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto table = random_table(1 + i % 3, 1 + (i / 3) % 4, 1.0, seed_for(2, i));
    const std::size_t n = 1 + (i / 12) % 3;
    try {
      const auto r = check_symmetrization_identity(table, n);
      worst = std::max(worst, r.gap);
      const auto o = oracle::symmetrization(table.rows(), table.probs(), n);
      worst_oracle = std::max({worst_oracle, std::abs(r.lhs - (double)o.lhs), std::abs(r.rhs - (double)o.rhs)});
    } catch (const InequalityViolation& e) {
      return {false, std::string("violation: ") + e.details()};
    }
  }
  return {worst <= 1e-10 && worst_oracle <= 1e-10,
          fmt("500 instances, max gap %.3g, max distance to oracle %.3g", worst, worst_oracle)};
}

Outcome expectation_bound() {
  double min_slack = INFINITY, worst_oracle = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto table = random_table(1 + i % 3, 1 + (i / 3) % 5, 1.0, seed_for(3, i));
    const std::size_t n = 1 + (i / 15) % 5;
    try {
      const auto r = verify_expectation_bound(table, n);
      min_slack = std::min(min_slack, r.slack);
      const double lhs = (double)oracle::expected_deviation(table.rows(), table.probs(), n);
      const double rhs = 2.0 * (double)oracle::expected_rademacher(table.rows(), table.probs(), n);
      worst_oracle = std::max({worst_oracle, std::abs(lhs - r.lhs), std::abs(rhs - r.rhs)});
    } catch (const InequalityViolation& e) {
      return {false, std::string("violation: ") + e.details()};
    }
  }
  return {min_slack >= -1e-10 && worst_oracle <= 1e-10,
          fmt("200 instances, min slack %.3g, max distance to oracle %.3g", min_slack, worst_oracle)};
}

Outcome bounded_differences() {
  double worst_ratio = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto table = random_table(1 + i % 3, 1 + (i / 3) % 4, 1.0, seed_for(4, i));
    const std::size_t n = 1 + (i / 12) % 5;
    const auto audit = audit_bounded_difference(table, n);
    if (audit.max_observed_delta > audit.theoretical_cap + 1e-12)
      return {false, fmt("instance %d: delta %.17g above cap %.17g", i, audit.max_observed_delta,
                         audit.theoretical_cap)};
    worst_ratio = std::max(worst_ratio, audit.max_observed_delta / audit.theoretical_cap);
  }
  // f(x) = x with x uniform on {-1, +1} and n = 2: moving S = (1, 1) to
  // (-1, 1) drops the deviation from 1 to 0, which is exactly 2b/n.
  const SupportTable tight({{-1.0, 1.0}}, {0.5, 0.5}, 1.0);
  const auto audit = audit_bounded_difference(tight, 2);
  const bool attained = audit.max_observed_delta >= 0.5 * audit.theoretical_cap;
  return {attained && !audit.violated,
          fmt("200 instances, max delta/cap %.4f; constructed instance attains %.4f of the cap",
              worst_ratio, audit.max_observed_delta / audit.theoretical_cap)};
}

Outcome mcdiarmid_tail() {
  int cases = 0, passed = 0;
  double worst_margin = INFINITY;
  for (int i = 0; i < 20; ++i) {
    const auto table = random_table(2 + i % 2, 1 + i % 4, 1.0, seed_for(5, i));
    for (std::size_t n : {4u, 8u}) {
      const auto rn = expected_rademacher(table, n);
      for (double eps : {0.1, 0.25, 0.5}) {
        const auto e = simulate_tail(table, n, eps, 100000, seed_for(5, 100 * i + n), rn);
        const auto v = verify_tail_bound(e);
        ++cases;
        if (v.pass) ++passed;
        worst_margin = std::min(worst_margin, v.theoretical - v.ci_lower);
      }
    }
  }
  return {passed == cases, fmt("%d/%d cases pass, min (bound - 99%% lower CI) %.4g", passed, cases,
                               worst_margin)};
}

Outcome epsilon_round_trip() {
  double worst = 0.0;
  for (int j = 0; j < 30; ++j) {
    const double delta = std::exp(std::log(1e-6) + (std::log(0.5) - std::log(1e-6)) * j / 29.0);
    for (std::size_t n : {1u, 10u, 1000u}) {
      for (double b : {0.5, 1.0, 3.0}) {
        const double back = mcdiarmid_bound(high_probability_epsilon(delta, n, b), n, b);
        worst = std::max(worst, std::abs(back - delta) / delta);
      }
    }
  }
  return {worst <= 1e-12, fmt("30-point grid, max relative error %.3g", worst)};
}

Outcome linear_bounds() {
  double min_l2 = INFINITY, min_l1 = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const NormRegime l2{NormRegime::Kind::L2Ball, 0.5 + i % 4, 0.25 + (i / 4) % 3};
    const auto a = sample_linear_instance(l2, 1 + i % 8, 1 + (i / 8) % 8, 1 + (i / 64) % 10, seed_for(7, i));
    const NormRegime l1{NormRegime::Kind::L1Linf, 0.5 + i % 4, 0.25 + (i / 4) % 3};
    const auto b = sample_linear_instance(l1, 1 + i % 16, 1 + (i / 16) % 8, 1 + (i / 128) % 10,
                                          seed_for(7, 5000 + i));
    try {
      min_l2 = std::min(min_l2, verify_linear_bound(a).slack);
      min_l1 = std::min(min_l1, verify_linear_bound(b).slack);
    } catch (const InequalityViolation& e) {
      return {false, std::string("violation: ") + e.details()};
    }
  }
  return {min_l2 >= -1e-10 && min_l1 >= -1e-10,
          fmt("1000 + 1000 instances, min slack l2 %.4g, l1 %.4g", min_l2, min_l1)};
}

Outcome massart() {
  double min_slack = INFINITY, worst_oracle = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto cls = random_class(1 + i % 8, 1 + (i / 8) % 10, 1.0, seed_for(8, i));
    const double lhs = empirical_rademacher_without_abs(cls).value;
    min_slack = std::min(min_slack, massart_bound(cls) - lhs);
    worst_oracle = std::max(worst_oracle, std::abs(lhs - (double)oracle::rademacher(cls.rows(), false)));
  }
  return {min_slack >= -1e-10 && worst_oracle <= 1e-12,
          fmt("500 classes, min slack %.4g, max distance to oracle %.3g", min_slack, worst_oracle)};
}

Outcome covering_numbers() {
  int mismatches = 0, greedy_below = 0, nonmonotone = 0;
  for (int i = 0; i < 100; ++i) {
    const auto cls = random_class(1 + i % 10, 1 + (i / 10) % 6, 1.0, seed_for(9, i));
    double diameter = 0.0;
    for (std::size_t a = 0; a < cls.m(); ++a)
      for (std::size_t b = 0; b < cls.m(); ++b)
        diameter = std::max(diameter, empirical_dist(cls.row(a), cls.row(b)));
    std::vector<double> radii;
    for (double f : {0.05, 0.2, 0.4, 0.65, 1.05}) radii.push_back(diameter > 0 ? f * diameter : f);
    std::size_t previous = SIZE_MAX;
    for (double eps : radii) {
      const auto exact = covering_number_exact(cls, eps).size;
      if (exact != oracle::min_cover(cls.rows(), eps)) ++mismatches;
      if (covering_number_greedy(cls, eps).size < exact) ++greedy_below;
      if (exact > previous) ++nonmonotone;
      previous = exact;
    }
  }
  return {mismatches == 0 && greedy_below == 0 && nonmonotone == 0,
          fmt("500 covers: %d oracle mismatches, %d greedy below exact, %d monotonicity breaks", mismatches,
              greedy_below, nonmonotone)};
}

Outcome dudley() {
  double min_slack = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const auto cls = random_class(1 + i % 10, 1 + (i / 10) % 10, 1.0, seed_for(10, i));
    const auto grid = admissible_epsilons(cls, 16);
    for (auto method : {CoverMethod::ExactMinimal, CoverMethod::Greedy}) {
      try {
        const auto v = verify_dudley(cls, grid, method);
        for (const auto& c : v.checks) min_slack = std::min(min_slack, c.slack);
      } catch (const InequalityViolation& e) {
        return {false, std::string("violation: ") + e.details()};
      }
    }
  }
  const EvaluatedClass single({{0.9, -0.4, 0.2, 0.7}}, 1.0);
  bool four_eps = true;
  for (double eps : admissible_epsilons(single, 16))
    four_eps = four_eps && dudley_bound(single, eps).bound == 4.0 * eps;
  return {min_slack >= -1e-10 && four_eps,
          fmt("200 classes x 16 radii x 2 cover methods, min slack %.4g; single function gives 4 eps: %s",
              min_slack, four_eps ? "yes" : "no")};
}

Outcome determinism() {
  const std::filesystem::path dir = GENBOUND_SMOKE_DIR;
  int configs = 0, differing = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    const auto config = cli::json::parse(in);
    const auto command = config.at("command").get<std::string>();
    const auto one = cli::canonical(cli::run_config(command, config, dir, 1)).dump();
    const auto eight = cli::canonical(cli::run_config(command, config, dir, 8)).dump();
    ++configs;
    if (one != eight) ++differing;
  }
  return {configs > 0 && differing == 0,
          fmt("%d smoke configs, %d differ between 1 and 8 threads", configs, differing)};
}

Outcome grid_restriction() {
  GridFamily family;
  family.parameter_box = {{-1.0, 1.0}, {-1.0, 1.0}};
  family.evaluator = [](std::span<const double> w, const Point& x) { return w[0] * x[0] + w[1] * x[1]; };
  family.envelope = 2.0;
  const Sample sample({{1.0, 0.5}, {-0.3, 1.0}, {0.7, -0.2}, {0.4, 0.4}});
  const auto r = grid_restricted_class(family, sample);

  std::vector<std::vector<double>> corners;
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) {
      std::vector<double> row;
      for (std::size_t k = 0; k < sample.size(); ++k) row.push_back(a * sample[k][0] + b * sample[k][1]);
      corners.push_back(row);
    }
  const double target = (double)oracle::rademacher(corners);
  bool monotone = true;
  for (std::size_t j = 1; j < r.trace.size(); ++j) monotone = monotone && r.trace[j].value >= r.trace[j - 1].value;
  const double error = std::abs(r.trace.back().value - target);
  return {monotone && r.converged && error <= 1e-6,
          fmt("%zu levels, monotone %s, converged %s, |final - corners| %.3g", r.trace.size(),
              monotone ? "yes" : "no", r.converged ? "yes" : "no", error)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "estimator consistency", 60, estimator_consistency},
      {2, "symmetrization identity", 60, symmetrization},
      {3, "expectation bound", 120, expectation_bound},
      {4, "bounded differences", 60, bounded_differences},
      {5, "McDiarmid tail", 300, mcdiarmid_tail},
      {6, "epsilon(delta) round trip", 1, epsilon_round_trip},
      {7, "linear predictor bounds", 120, linear_bounds},
      {8, "Massart bound", 60, massart},
      {9, "covering numbers", 120, covering_numbers},
      {10, "Dudley bound", 300, dudley},
      {11, "thread determinism", 120, determinism},
      {12, "grid restriction", 10, grid_restriction},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s [%2d] %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

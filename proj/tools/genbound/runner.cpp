#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "genbound/genbound.hpp"

namespace genbound::cli {

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands{"rademacher", "deviation", "symmetrize", "tail",
                                                 "linear",     "dudley",    "suite"};
  return commands;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type: " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing required field '") + key + "'");
  return get_or<T>(j, key, T{});
}

const json& require_object(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_object())
    throw ConfigError(std::string("missing required object '") + key + "'");
  return j.at(key);
}

std::uint64_t require_seed(const json& config) {
  if (!config.contains("seed"))
    throw ConfigError("this command draws random numbers; a \"seed\" is required");
  return require<std::uint64_t>(config, "seed");
}

Options parse_options(const json& config, unsigned threads) {
  Options opts;
  opts.threads = threads;
  if (config.contains("caps")) {
    const auto& caps = config.at("caps");
    opts.limits.max_sign_bits = get_or<unsigned>(caps, "sign_bits", opts.limits.max_sign_bits);
    opts.limits.max_product_tuples =
        get_or<std::uint64_t>(caps, "product_tuples", opts.limits.max_product_tuples);
    opts.limits.max_exact_cover_rows =
        get_or<std::size_t>(caps, "exact_cover_rows", opts.limits.max_exact_cover_rows);
    opts.limits.max_grid_functions =
        get_or<std::uint64_t>(caps, "grid_functions", opts.limits.max_grid_functions);
  }
  if (config.contains("tolerances")) {
    const auto& tol = config.at("tolerances");
    opts.tolerances.exact_equality =
        get_or<double>(tol, "exact_equality", opts.tolerances.exact_equality);
    opts.tolerances.inequality = get_or<double>(tol, "inequality", opts.tolerances.inequality);
    opts.tolerances.invariant = get_or<double>(tol, "invariant", opts.tolerances.invariant);
  }
  return opts;
}

NormRegime parse_regime(const json& j) {
  NormRegime r;
  const auto name = require<std::string>(j, "regime");
  if (name == "l2")
    r.kind = NormRegime::Kind::L2Ball;
  else if (name == "l1linf")
    r.kind = NormRegime::Kind::L1Linf;
  else
    throw ConfigError("regime must be \"l2\" or \"l1linf\"");
  r.w_radius = require<double>(j, "W");
  r.x_radius = require<double>(j, "X");
  return r;
}

/// Resolves a class source. `n_override` replaces "n" for sweeps.
EvaluatedClass parse_class(const json& src, const json& config,
                           std::optional<std::size_t> n_override = std::nullopt) {
  const auto source = require<std::string>(src, "source");
  if (source == "inline") return class_from_json(src);
  const std::size_t n = n_override ? *n_override : require<std::size_t>(src, "n");
  const std::uint64_t seed = src.contains("seed") ? require<std::uint64_t>(src, "seed")
                                                   : require_seed(config);
  if (source == "random")
    return random_class(require<std::size_t>(src, "m"), n, get_or<double>(src, "envelope", 1.0), seed);
  if (source == "linear") {
    const auto inst = sample_linear_instance(parse_regime(src), require<std::size_t>(src, "d"),
                                             require<std::size_t>(src, "m"), n, seed);
    return linear_class(inst);
  }
  throw ConfigError("unknown class source '" + source + "' (expected inline, random, linear)");
}

SupportTable parse_table(const json& src, const json& config) {
  const auto source = require<std::string>(src, "source");
  if (source == "table") {
    return SupportTable(require<std::vector<std::vector<double>>>(src, "values"),
                        require<std::vector<double>>(src, "probs"), require<double>(src, "envelope"));
  }
  if (source == "random") {
    const std::uint64_t seed = src.contains("seed") ? require<std::uint64_t>(src, "seed")
                                                     : require_seed(config);
    return random_table(require<std::size_t>(src, "support_size"), require<std::size_t>(src, "m"),
                        get_or<double>(src, "envelope", 1.0), seed);
  }
  if (source == "linear") {
    DiscreteDistribution dist(require<std::vector<Point>>(src, "support"),
                              require<std::vector<double>>(src, "probs"));
    const auto weights = require<std::vector<Point>>(src, "weights");
    double b = 0.0;
    if (src.contains("envelope")) {
      b = require<double>(src, "envelope");
    } else {
      const LinearFamily probe(weights, 0.0);
      for (std::size_t i = 0; i < probe.size(); ++i)
        for (const auto& x : dist.support()) b = std::max(b, std::abs(probe(i, x)));
    }
    return tabulate(LinearFamily(weights, b), dist);
  }
  throw ConfigError("unknown distribution source '" + source + "' (expected table, random, linear)");
}

json complexity_json(const ComplexityResult& r) {
  return json{{"value", r.value},
              {"method", std::string(to_string(r.method))},
              {"draws", r.draws},
              {"std_error", r.std_error},
              {"seed", r.seed}};
}

json violation(const std::string& invariant, const std::string& message, const json& details = {}) {
  json v{{"invariant", invariant}, {"message", message}};
  if (!details.is_null()) v["details"] = details;
  return v;
}

json violation_from(const std::string& invariant, const DetailedError& e) {
  json details;
  try {
    details = json::parse(e.details());
  } catch (const json::exception&) {
    details = e.details();
  }
  return violation(invariant, e.what(), details);
}

struct Outcome {
  json results = json::array();
  json violations = json::array();
};

// --- commands --------------------------------------------------------------

json rademacher_result(const EvaluatedClass& cls, const json& config, const Options& opts) {
  const auto method = get_or<std::string>(config, "method", "auto");
  if (method != "auto" && method != "exact" && method != "mc")
    throw ConfigError("method must be auto, exact, or mc");
  const bool exact = method == "exact" || (method == "auto" && cls.n() <= opts.limits.max_sign_bits);
  json r{{"kind", "rademacher"}, {"n", cls.n()}, {"m", cls.m()}, {"envelope", cls.envelope()}};
  if (exact) {
    const auto cmp = check_without_abs_le_abs(cls, opts);
    r["complexity"] = complexity_json(empirical_rademacher(cls, opts));
    r["without_abs"] = cmp.without_abs;
    r["without_abs_slack"] = cmp.slack;
    r["massart_bound"] = massart_bound(cls);
    r["massart_slack"] = r["massart_bound"].get<double>() - cmp.without_abs;
  } else {
    const auto draws = get_or<std::uint64_t>(config, "draws", 100000);
    r["complexity"] = complexity_json(empirical_rademacher_mc(cls, draws, require_seed(config), opts));
    r["massart_bound"] = massart_bound(cls);
  }
  return r;
}

Outcome run_rademacher(const json& config, const Options& opts) {
  Outcome o;
  const auto& src = require_object(config, "class");
  std::vector<EvaluatedClass> classes;
  if (config.contains("n_values")) {
    for (auto n : require<std::vector<std::size_t>>(config, "n_values"))
      classes.push_back(parse_class(src, config, n));
  } else {
    classes.push_back(parse_class(src, config));
  }
  for (const auto& cls : classes) {
    try {
      auto r = rademacher_result(cls, config, opts);
      if (r.contains("massart_slack") && r["massart_slack"].get<double>() < -opts.tolerances.inequality)
        o.violations.push_back(violation("massart_bound", "without-abs complexity exceeds the Massart bound",
                                         json{{"n", cls.n()}}));
      o.results.push_back(std::move(r));
    } catch (const InvariantViolation& e) {
      o.violations.push_back(violation_from("without_abs_le_abs", e));
    }
  }
  if (config.contains("distribution")) {
    const auto table = parse_table(config.at("distribution"), config);
    const auto n = require<std::size_t>(config, "n");
    json r{{"kind", "expected_rademacher"}, {"n", n}, {"m", table.m()}};
    r["complexity"] = complexity_json(expected_rademacher(table, n, opts));
    o.results.push_back(std::move(r));
  }
  return o;
}

Outcome run_deviation(const json& config, const Options& opts) {
  Outcome o;
  const auto table = parse_table(require_object(config, "distribution"), config);
  const auto n = require<std::size_t>(config, "n");
  const auto audit = audit_bounded_difference(table, n, opts);
  o.results.push_back(json{{"kind", "bounded_difference"},
                           {"n", n},
                           {"envelope", table.envelope()},
                           {"envelope_holds", table.envelope_holds()},
                           {"max_observed_delta", audit.max_observed_delta},
                           {"theoretical_cap", audit.theoretical_cap},
                           {"perturbations_checked", audit.perturbations_checked},
                           {"violated", audit.violated}});
  if (audit.violated) {
    o.violations.push_back(violation(
        "bounded_difference", "a single-coordinate replacement moved the uniform deviation by more than 2b/n",
        json{{"max_observed_delta", audit.max_observed_delta},
             {"theoretical_cap", audit.theoretical_cap},
             {"table", to_json(table)}}));
  }
  try {
    const auto r = verify_expectation_bound(table, n, opts);
    o.results.push_back(json{{"kind", "expectation_bound"},
                             {"n", n},
                             {"lhs", r.lhs},
                             {"rhs", r.rhs},
                             {"slack", r.slack},
                             {"method", "exact"}});
  } catch (const InequalityViolation& e) {
    o.violations.push_back(violation_from("expectation_le_two_rademacher", e));
  }
  return o;
}

Outcome run_symmetrize(const json& config, const Options& opts) {
  Outcome o;
  const auto table = parse_table(require_object(config, "distribution"), config);
  const auto n = require<std::size_t>(config, "n");
  try {
    const auto r = check_symmetrization_identity(table, n, opts);
    o.results.push_back(json{{"kind", "symmetrization"},
                             {"n", n},
                             {"lhs", r.lhs},
                             {"rhs", r.rhs},
                             {"gap", r.gap},
                             {"method", "exact"}});
  } catch (const InequalityViolation& e) {
    o.violations.push_back(violation_from("symmetrization_identity", e));
  }
  return o;
}

// The table viewed as a family on index points {0}, {1}, ...; used when the
// exact expected complexity is over its caps.
class TableIndexFamily {
 public:
  explicit TableIndexFamily(const SupportTable& table) : table_(&table) {}
  std::size_t size() const { return table_->m(); }
  double envelope() const { return table_->envelope(); }
  double operator()(std::size_t i, const Point& x) const {
    return table_->value(i, static_cast<std::size_t>(x.front()));
  }

 private:
  const SupportTable* table_;
};

Outcome run_tail(const json& config, const Options& opts) {
  Outcome o;
  const auto table = parse_table(require_object(config, "distribution"), config);
  const auto n = require<std::size_t>(config, "n");
  const auto seed = require_seed(config);
  const auto trials = get_or<std::uint64_t>(config, "trials", 100000);
  std::vector<double> epsilons;
  if (config.contains("epsilons"))
    epsilons = require<std::vector<double>>(config, "epsilons");
  else
    epsilons.push_back(require<double>(config, "epsilon"));

  ComplexityResult rn;
  try {
    rn = expected_rademacher(table, n, opts);
  } catch (const ExactEnumerationLimit&) {
    std::vector<Point> atoms;
    for (std::size_t s = 0; s < table.support_size(); ++s) atoms.push_back({static_cast<double>(s)});
    const DiscretePointSampler sampler(DiscreteDistribution(atoms, table.probs()));
    rn = expected_rademacher_mc(builder_for(TableIndexFamily(table)), sampler, n,
                                get_or<std::uint64_t>(config, "rademacher_draws", 10000),
                                detail::mix64(seed ^ 0x52414445ULL), opts);
  }

  for (double eps : epsilons) {
    const auto e = simulate_tail(table, n, eps, trials, seed, rn, opts);
    const auto v = verify_tail_bound(e);
    json r{{"kind", "tail"},
           {"n", n},
           {"epsilon", eps},
           {"b", e.b},
           {"trials", e.trials},
           {"seed", e.seed},
           {"exceed_count", e.exceed_count},
           {"empirical_freq", e.empirical_freq},
           {"ci_lower", v.ci_lower},
           {"ci_upper", e.ci_upper},
           {"theoretical", e.theoretical},
           {"threshold", e.threshold},
           {"rademacher", complexity_json(rn)},
           {"pass", v.pass}};
    if (!v.pass)
      o.violations.push_back(violation("mcdiarmid_tail",
                                       "simulated exceedance frequency is significantly above the bound",
                                       r));
    o.results.push_back(std::move(r));
  }
  return o;
}

Outcome run_linear(const json& config, const Options& opts) {
  Outcome o;
  const auto regime = parse_regime(config);
  const auto seed = require_seed(config);
  const auto d = require<std::size_t>(config, "d");
  const auto n = require<std::size_t>(config, "n");
  const auto m = require<std::size_t>(config, "m");
  const auto instances = get_or<std::size_t>(config, "instances", 100);
  for (std::size_t t = 0; t < instances; ++t) {
    const auto inst = sample_linear_instance(regime, d, m, n, detail::mix64(seed + t));
    try {
      const auto r = verify_linear_bound(inst, opts);
      o.results.push_back(json{{"kind", "linear"},
                               {"instance", t},
                               {"regime", regime.kind == NormRegime::Kind::L2Ball ? "l2" : "l1linf"},
                               {"exact", r.exact},
                               {"bound", r.bound},
                               {"slack", r.slack},
                               {"method", "exact"}});
    } catch (const InequalityViolation& e) {
      o.violations.push_back(violation_from("linear_predictor_bound", e));
    }
  }
  return o;
}

Outcome run_dudley(const json& config, const Options& opts) {
  Outcome o;
  const auto cls = parse_class(require_object(config, "class"), config);
  const auto cover = get_or<std::string>(config, "cover", "auto");
  std::optional<CoverMethod> method;
  if (cover == "exact")
    method = CoverMethod::ExactMinimal;
  else if (cover == "greedy")
    method = CoverMethod::Greedy;
  else if (cover != "auto")
    throw ConfigError("cover must be auto, exact, or greedy");
  const auto grid = get_or<std::size_t>(config, "grid_points", kDefaultDudleyGrid);

  std::vector<double> epsilons;
  if (config.contains("epsilons"))
    epsilons = require<std::vector<double>>(config, "epsilons");
  else
    epsilons = admissible_epsilons(cls, get_or<std::size_t>(config, "epsilon_count", 16));
  std::sort(epsilons.begin(), epsilons.end());

  try {
    const auto v = verify_dudley(cls, epsilons, method, grid, opts);
    const double c = max_empirical_norm(cls);
    const CoverProfile profile(cls, v.method, opts.limits);
    for (const auto& check : v.checks) {
      o.results.push_back(json{{"kind", "dudley"},
                               {"epsilon", check.epsilon},
                               {"bound", check.rhs},
                               {"lhs", v.lhs},
                               {"slack", check.slack},
                               {"c", c},
                               {"covering_number", profile.size_at(check.epsilon)},
                               {"method", std::string(to_string(v.method))}});
    }
  } catch (const InequalityViolation& e) {
    o.violations.push_back(violation_from("dudley_entropy_bound", e));
  }
  return o;
}

json resolve_suite(json config, const std::filesystem::path& base_dir) {
  if (!config.contains("experiments") || !config.at("experiments").is_array())
    throw ConfigError("suite config needs an \"experiments\" array");
  for (auto& entry : config["experiments"]) {
    if (entry.is_string()) {
      const auto path = base_dir / entry.get<std::string>();
      auto sub = read_json_file(path);
      if (!sub.contains("name")) sub["name"] = path.stem().string();
      entry = std::move(sub);
    }
    if (!entry.is_object()) throw ConfigError("suite experiments must be objects or paths");
    if (!entry.contains("command")) throw ConfigError("every suite experiment needs a \"command\"");
  }
  return config;
}

Outcome run_suite(const json& config, const std::filesystem::path& base_dir, unsigned threads) {
  Outcome o;
  std::size_t index = 0;
  for (const auto& entry : config.at("experiments")) {
    json sub = entry;
    const auto command = require<std::string>(sub, "command");
    if (command == "suite") throw ConfigError("suites cannot nest");
    if (!sub.contains("seed") && config.contains("seed")) sub["seed"] = config.at("seed");
    const auto name = get_or<std::string>(sub, "name", "experiment-" + std::to_string(index));
    json report = canonical(run_config(command, sub, base_dir, threads));
    for (const auto& v : report.at("violations")) {
      json tagged = v;
      tagged["experiment"] = name;
      o.violations.push_back(std::move(tagged));
    }
    o.results.push_back(json{{"kind", "experiment"}, {"name", name}, {"report", std::move(report)}});
    ++index;
  }
  return o;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json run_config(const std::string& command, json config, const std::filesystem::path& base_dir,
                unsigned threads) {
  if (std::find(known_commands().begin(), known_commands().end(), command) == known_commands().end())
    throw ConfigError("unknown command '" + command + "'");
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (config.contains("command") && config.at("command") != command)
    throw ConfigError("config is for command '" + config.at("command").get<std::string>() +
                      "', not '" + command + "'");
  config["command"] = command;
  config.erase("threads");
  if (command == "suite") config = resolve_suite(std::move(config), base_dir);

  const Options opts = parse_options(config, threads);
  const auto start = Clock::now();
  Outcome outcome;
  if (command == "rademacher")
    outcome = run_rademacher(config, opts);
  else if (command == "deviation")
    outcome = run_deviation(config, opts);
  else if (command == "symmetrize")
    outcome = run_symmetrize(config, opts);
  else if (command == "tail")
    outcome = run_tail(config, opts);
  else if (command == "linear")
    outcome = run_linear(config, opts);
  else if (command == "dudley")
    outcome = run_dudley(config, opts);
  else
    outcome = run_suite(config, base_dir, threads);
  const auto wall = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  json report;
  report["command"] = command;
  report["config"] = config;
  report["config_hash"] = config_hash(config);
  report["seed"] = config.contains("seed") ? config.at("seed") : json(nullptr);
  report["results"] = std::move(outcome.results);
  report["violations"] = std::move(outcome.violations);
  report["wall_ms"] = wall;
  report["threads"] = threads;
  report["timestamp"] = utc_timestamp();
  return report;
}

json canonical(json report) {
  report.erase("wall_ms");
  report.erase("timestamp");
  report.erase("threads");
  return report;
}

bool has_violations(const json& report) {
  return report.contains("violations") && !report.at("violations").empty();
}

std::string emit_curve(const std::vector<json>& reports) {
  std::vector<json> results;
  for (const auto& report : reports) {
    for (const auto& r : report.at("results")) {
      if (r.at("kind") == "experiment") {
        for (const auto& inner : r.at("report").at("results")) results.push_back(inner);
      } else {
        results.push_back(r);
      }
    }
  }
  if (results.empty()) throw ConfigError("no results to plot");
  const auto kind = results.front().at("kind").get<std::string>();
  for (const auto& r : results)
    if (r.at("kind") != kind) throw ConfigError("cannot emit a curve from mixed result kinds");

  struct Row {
    double x;
    double value;
    std::string method;
    std::uint64_t seed;
    std::optional<double> theoretical;
  };
  std::vector<Row> rows;
  for (const auto& r : results) {
    if (kind == "dudley") {
      rows.push_back({r.at("epsilon"), r.at("bound"), r.at("method"), 0, std::nullopt});
    } else if (kind == "tail") {
      rows.push_back({r.at("epsilon"), r.at("empirical_freq"), r.at("rademacher").at("method"),
                      r.at("seed"), r.at("theoretical").get<double>()});
    } else if (kind == "rademacher") {
      const auto& c = r.at("complexity");
      rows.push_back({static_cast<double>(r.at("n").get<std::size_t>()), c.at("value"), c.at("method"),
                      c.at("seed"), std::nullopt});
    } else {
      throw ConfigError("no curve is defined for result kind '" + kind + "'");
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.x < b.x; });

  std::ostringstream os;
  os << "x,value,method,seed";
  if (kind == "tail") os << ",theoretical";
  os << '\n';
  for (const auto& row : rows) {
    os << format_number(row.x) << ',' << format_number(row.value) << ',' << row.method << ','
       << row.seed;
    if (row.theoretical) os << ',' << format_number(*row.theoretical);
    os << '\n';
  }
  return os.str();
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  json report;
  std::string payload;
  try {
    if (inv.format != "json" && inv.format != "csv") throw ConfigError("format must be json or csv");
    json config = read_json_file(inv.config);
    if (inv.seed) config["seed"] = *inv.seed;
    report = run_config(inv.command, std::move(config), inv.config.parent_path(),
                        inv.threads.value_or(1));
    payload = inv.format == "csv" ? emit_curve({report}) : report.dump(2) + "\n";
  } catch (const ConfigError& e) {
    err << "genbound: " << e.what() << '\n';
    return kExitUsage;
  } catch (const genbound::Error& e) {
    err << "genbound: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "genbound: malformed config: " << e.what() << '\n';
    return kExitUsage;
  }

  if (inv.out) {
    std::ofstream file(*inv.out, std::ios::binary);
    if (!file) {
      err << "genbound: cannot write '" << inv.out->string() << "'\n";
      return kExitUsage;
    }
    file << payload;
  } else {
    out << payload;
  }
  if (has_violations(report)) {
    for (const auto& v : report.at("violations"))
      err << "genbound: violated " << v.at("invariant").get<std::string>() << ": "
          << v.at("message").get<std::string>() << '\n';
    return kExitViolation;
  }
  return kExitOk;
}

}  // namespace genbound::cli

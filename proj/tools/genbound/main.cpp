#include <iostream>

#include <CLI11.hpp>

#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generalization bounds: compute and verify from a JSON config."};
  app.require_subcommand(1);

  genbound::cli::Invocation inv;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  const char* commands[][2] = {
      {"rademacher", "Empirical and expected Rademacher complexity"},
      {"deviation", "Bounded-differences audit and expectation bound"},
      {"symmetrize", "Exact symmetrization identity"},
      {"tail", "Simulated tail against the concentration bound"},
      {"linear", "Linear predictor bounds over random instances"},
      {"dudley", "Covering numbers and the chaining bound"},
      {"suite", "Run a list of experiments"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out, "Write the report here instead of stdout");
    sub->add_option("--format", inv.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : genbound::cli::kExitUsage;
  }

  auto* sub = app.get_subcommands().front();
  inv.command = sub->get_name();
  inv.config = config;
  if (sub->count("--seed")) inv.seed = seed;
  if (sub->count("--out")) inv.out = out;
  if (sub->count("--threads")) inv.threads = threads;
  return genbound::cli::run(inv, std::cout, std::cerr);
}

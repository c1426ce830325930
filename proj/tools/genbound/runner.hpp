#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace genbound::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

/// Unreadable, malformed, or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Invocation {
  std::string command;
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;  // stdout when absent
  std::string format = "json";               // json | csv
  std::optional<unsigned> threads;
};

/// Runs one configuration and returns the report document. `base_dir`
/// resolves relative paths inside suite configs. Throws ConfigError or a
/// genbound::Error on invalid input; inequality violations are recorded in
/// the report, not thrown.
json run_config(const std::string& command, json config, const std::filesystem::path& base_dir,
                unsigned threads);

/// Report without the fields that legitimately change between runs
/// (timestamp, wall_ms, threads).
json canonical(json report);

/// CSV rows "x,value,method,seed[,theoretical]" from a homogeneous report
/// set, ascending in x, numbers with 17 significant digits. Throws
/// ConfigError on mixed or unsupported result kinds.
std::string emit_curve(const std::vector<json>& reports);

/// FNV-1a 64 of the compact dump of `config`, as 16 hex digits.
std::string config_hash(const json& config);

/// Full CLI behavior: read config, run, write the report. Returns the exit
/// code; messages go to `err`.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

bool has_violations(const json& report);

}  // namespace genbound::cli

#pragma once

// Batch jobs: JSON configuration in, JSON result document and CSV grid
// dumps out.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace rca::jobs {

using Json = nlohmann::ordered_json;

/// Malformed or out-of-range configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFailure = 3;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"approx", "hull", "siciak", "select", "okaweil"};
  return c;
}

struct JobOutcome {
  int exit_code = kExitOk;
  Json result;
  /// Extra artifacts by file name (CSV grid dumps).
  std::map<std::string, std::string> files;
};

/// Runs one job. Relative file references in the config resolve against
/// `base_dir`. Config problems throw ConfigError; computation failures are
/// reported in the result with exit code 3.
JobOutcome run_job(const std::string& command, const Json& config, const std::filesystem::path& base_dir = {});

Json load_json(const std::filesystem::path& path);

/// Writes result.json and every extra file into `dir`, creating it.
void write_outputs(const JobOutcome& outcome, const std::filesystem::path& dir);

/// Empty when the document satisfies the result schema.
std::vector<std::string> result_schema_problems(const Json& result);

/// Result document as written to disk.
std::string dump_result(const Json& result);

}  // namespace rca::jobs

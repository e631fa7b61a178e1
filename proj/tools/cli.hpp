#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agdn/model.hpp"
#include "agdn/train.hpp"

namespace agdn::cli {

enum ExitCode : int { kOk = 0, kRuntime = 1, kConfig = 2, kVerifyFailed = 3 };

/// Raised for bad configuration: unknown keys, wrong types, invalid values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::filesystem::path dataset;
  std::filesystem::path out = "run";
  std::optional<std::filesystem::path> log;  // metrics.jsonl under out by default

  /// Applies the keys of a config object on top of the current values.
  void merge(const nlohmann::json& j);
  void validate() const;
  nlohmann::json to_json() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Runs one command line (argv[0] excluded) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agdn::cli

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "sqlrl/reward.hpp"

namespace sqlrl {

/// Tunables shared by the CLI and the service. Resolution order, lowest
/// first: built-in defaults, JSON config file, SQLRL_* environment
/// variables, command-line flags (applied by the caller).
struct Settings {
  std::chrono::milliseconds reward_limit = kRewardExecLimit;
  std::chrono::milliseconds eval_limit = kEvalExecLimit;
  std::size_t row_cap = kDefaultRowCap;
  std::size_t max_length = 2048;
  std::size_t jobs = 0;  ///< 0 = hardware concurrency
  OverlongMode overlong = OverlongMode::kAsPrinted;
  RowSemantics semantics = RowSemantics::kSet;
  bool strict_format = false;

  std::size_t worker_count() const;
  RewardConfig reward_config() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

/// Config file keys: reward_limit_ms, eval_limit_ms, row_cap, max_length,
/// jobs, overlong ("as_printed" | "strict_penalty"), semantics ("set" |
/// "bag"), strict_format. Environment: SQLRL_REWARD_LIMIT_MS,
/// SQLRL_EVAL_LIMIT_MS, SQLRL_ROW_CAP, SQLRL_MAX_LENGTH, SQLRL_JOBS,
/// SQLRL_OVERLONG, SQLRL_SEMANTICS, SQLRL_STRICT_FORMAT.
/// Throws InvalidInput on unreadable files or bad values.
Settings load_settings(const std::optional<std::filesystem::path>& config_file,
                       const EnvLookup& env = process_env);

OverlongMode parse_overlong(std::string_view text);
RowSemantics parse_semantics(std::string_view text);

}  // namespace sqlrl

#include "sqlrl/settings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "sqlrl/errors.hpp"

namespace sqlrl {

std::size_t Settings::worker_count() const {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

RewardConfig Settings::reward_config() const {
  RewardConfig c;
  c.max_length = max_length;
  c.execution_limit = reward_limit;
  c.overlong = overlong;
  c.semantics = semantics;
  c.parse.strict = strict_format;
  return c;
}

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

OverlongMode parse_overlong(std::string_view text) {
  if (text == "as_printed") return OverlongMode::kAsPrinted;
  if (text == "strict_penalty") return OverlongMode::kStrictPenalty;
  throw InvalidInput("overlong must be 'as_printed' or 'strict_penalty', got '" + std::string(text) + "'");
}

RowSemantics parse_semantics(std::string_view text) {
  if (text == "set") return RowSemantics::kSet;
  if (text == "bag") return RowSemantics::kBag;
  throw InvalidInput("semantics must be 'set' or 'bag', got '" + std::string(text) + "'");
}

namespace {

std::size_t parse_count(const std::string& key, std::string_view text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidInput(key + ": expected a non-negative integer, got '" +
                                                          std::string(text) + "'");
  return v;
}

bool parse_bool(const std::string& key, std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw InvalidInput(key + ": expected a boolean, got '" + std::string(text) + "'");
}

void check(const Settings& s, const std::string& origin) {
  if (s.reward_limit.count() <= 0 || s.eval_limit.count() <= 0) {
    throw InvalidInput(origin + ": execution limits must be positive");
  }
  if (s.row_cap == 0) throw InvalidInput(origin + ": row_cap must be positive");
  if (s.max_length == 0) throw InvalidInput(origin + ": max_length must be positive");
}

void apply_file(Settings& s, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidInput(path.string() + ": top level must be an object");
  const auto where = [&](const std::string& key) { return path.string() + ": " + key; };
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "reward_limit_ms") {
        s.reward_limit = std::chrono::milliseconds(value.get<std::int64_t>());
      } else if (key == "eval_limit_ms") {
        s.eval_limit = std::chrono::milliseconds(value.get<std::int64_t>());
      } else if (key == "row_cap") {
        s.row_cap = value.get<std::size_t>();
      } else if (key == "max_length") {
        s.max_length = value.get<std::size_t>();
      } else if (key == "jobs") {
        s.jobs = value.get<std::size_t>();
      } else if (key == "overlong") {
        s.overlong = parse_overlong(value.get<std::string>());
      } else if (key == "semantics") {
        s.semantics = parse_semantics(value.get<std::string>());
      } else if (key == "strict_format") {
        s.strict_format = value.get<bool>();
      } else {
        throw InvalidInput("unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(where(key) + ": " + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput(where(key) + ": " + e.what());
    }
  }
  check(s, path.string());
}

void apply_env(Settings& s, const EnvLookup& env) {
  if (auto v = env("SQLRL_REWARD_LIMIT_MS")) {
    s.reward_limit = std::chrono::milliseconds(parse_count("SQLRL_REWARD_LIMIT_MS", *v));
  }
  if (auto v = env("SQLRL_EVAL_LIMIT_MS")) {
    s.eval_limit = std::chrono::milliseconds(parse_count("SQLRL_EVAL_LIMIT_MS", *v));
  }
  if (auto v = env("SQLRL_ROW_CAP")) s.row_cap = parse_count("SQLRL_ROW_CAP", *v);
  if (auto v = env("SQLRL_MAX_LENGTH")) s.max_length = parse_count("SQLRL_MAX_LENGTH", *v);
  if (auto v = env("SQLRL_JOBS")) s.jobs = parse_count("SQLRL_JOBS", *v);
  if (auto v = env("SQLRL_OVERLONG")) s.overlong = parse_overlong(*v);
  if (auto v = env("SQLRL_SEMANTICS")) s.semantics = parse_semantics(*v);
  if (auto v = env("SQLRL_STRICT_FORMAT")) s.strict_format = parse_bool("SQLRL_STRICT_FORMAT", *v);
  check(s, "environment");
}

}  // namespace

Settings load_settings(const std::optional<std::filesystem::path>& config_file, const EnvLookup& env) {
  Settings s;
  if (config_file) apply_file(s, *config_file);
  apply_env(s, env);
  return s;
}

}  // namespace sqlrl
